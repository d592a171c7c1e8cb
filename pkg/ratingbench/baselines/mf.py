""" Matrix factorization trained with Alternating Least Squares.

Ratings are mean-centered before factorization; there are no per-user or per-item bias terms. The
model minimizes

    sum over observed (u, i) of (r_ui - mean - u.v)^2 + lambda * (|U|^2 + |V|^2)

by alternately solving the ridge regression of every user vector with the item vectors fixed, then
every item vector with the user vectors fixed. Each solve is an exact minimizer of its block, so
the objective never increases from one half-sweep to the next. """

import json
from dataclasses import dataclass, field
from logging import getLogger, INFO
from typing import Dict, List, Union

import numpy as np

from ratingbench.errors import BaselineError

_log = getLogger(__name__)
_log.setLevel(INFO)

MF_FORMAT_HEADER = 'ratingbench-mf'
MF_FORMAT_VERSION = 1

_INIT_SCALE = 0.1


@dataclass(frozen=True)
class MFHyper:
    d: int = 8
    lam: float = 0.1
    iterations: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise BaselineError('Latent dimension must be at least 1, got {}'.format(self.d))
        if not self.lam > 0:
            raise BaselineError('Regularization must be positive, got {}'.format(self.lam))
        if self.iterations < 1:
            raise BaselineError('Need at least one ALS iteration, got {}'.format(self.iterations))


@dataclass(frozen=True)
class RatingTriple:
    user_id: str
    item_id: str
    rating: Union[int, float]


@dataclass
class MFModel:
    user_factors: Dict[str, np.ndarray]
    item_factors: Dict[str, np.ndarray]
    global_mean: float
    hyper: MFHyper
    # Objective after initialization and after every half-sweep.
    objective_history: List[float] = field(default_factory=list)


def _index(ids):
    ordered = sorted(set(ids))
    return ordered, {key: n for n, key in enumerate(ordered)}


def _objective(residuals, U, V, u_idx, i_idx, lam):
    errors = residuals - np.einsum('ij,ij->i', U[u_idx], V[i_idx])
    return float(errors @ errors + lam * (np.sum(U * U) + np.sum(V * V)))


def _solve_block(target, fixed, groups, residuals, lam):
    """ Ridge solve of every row of target with the other side fixed. groups[n] holds the
    (observation indices, fixed-side indices) of row n. """

    d = fixed.shape[1]
    ridge = lam * np.eye(d)
    for n, (obs, other) in enumerate(groups):
        F = fixed[other]
        target[n] = np.linalg.solve(F.T @ F + ridge, F.T @ residuals[obs])


def _initial_factors(residuals, u_idx, i_idx, n_users, n_items, hyper):
    """ Starting factors from the truncated SVD of the residual matrix (unobserved cells zero,
    duplicated cells averaged), with the singular values split evenly between both sides. Latent
    dimensions the SVD leaves (near) empty get seeded uniform noise instead. """

    totals = np.zeros((n_users, n_items))
    counts = np.zeros((n_users, n_items))
    np.add.at(totals, (u_idx, i_idx), residuals)
    np.add.at(counts, (u_idx, i_idx), 1.0)
    matrix = np.divide(totals, counts, out=np.zeros_like(totals), where=counts > 0)

    left, singular, right_t = np.linalg.svd(matrix, full_matrices=False)

    rng = np.random.default_rng(hyper.seed)
    U = rng.uniform(-_INIT_SCALE, _INIT_SCALE, size=(n_users, hyper.d))
    V = rng.uniform(-_INIT_SCALE, _INIT_SCALE, size=(n_items, hyper.d))

    for k in range(min(hyper.d, len(singular))):
        root = float(np.sqrt(singular[k]))
        if root > _INIT_SCALE:
            U[:, k] = left[:, k] * root
            V[:, k] = right_t[k] * root
    return U, V


def train_mf(triples, hyper=None):
    """ Fits an MFModel. Deterministic for a fixed seed and independent of the order of triples;
    duplicated triples count once per occurrence. """

    hyper = hyper or MFHyper()
    if not triples:
        raise BaselineError('Cannot train matrix factorization on zero ratings.')

    triples = sorted(triples, key=lambda t: (str(t.user_id), str(t.item_id), float(t.rating)))
    users, user_pos = _index(str(t.user_id) for t in triples)
    items, item_pos = _index(str(t.item_id) for t in triples)

    u_idx = np.array([user_pos[str(t.user_id)] for t in triples])
    i_idx = np.array([item_pos[str(t.item_id)] for t in triples])
    ratings = np.array([float(t.rating) for t in triples])

    global_mean = float(ratings.mean())
    residuals = ratings - global_mean

    U, V = _initial_factors(residuals, u_idx, i_idx, len(users), len(items), hyper)

    user_groups = [(obs, i_idx[obs]) for obs in (np.flatnonzero(u_idx == n)
                                                 for n in range(len(users)))]
    item_groups = [(obs, u_idx[obs]) for obs in (np.flatnonzero(i_idx == n)
                                                 for n in range(len(items)))]

    history = [_objective(residuals, U, V, u_idx, i_idx, hyper.lam)]
    for _ in range(hyper.iterations):
        _solve_block(U, V, user_groups, residuals, hyper.lam)
        history.append(_objective(residuals, U, V, u_idx, i_idx, hyper.lam))
        _solve_block(V, U, item_groups, residuals, hyper.lam)
        history.append(_objective(residuals, U, V, u_idx, i_idx, hyper.lam))

    _log.info('Trained MF on {} ratings ({} users, {} items): objective {:.6g} -> {:.6g}'.format(
        len(triples), len(users), len(items), history[0], history[-1]))

    return MFModel(
        user_factors={user: U[n].copy() for n, user in enumerate(users)},
        item_factors={item: V[n].copy() for n, item in enumerate(items)},
        global_mean=global_mean,
        hyper=hyper,
        objective_history=history
    )


def ridge_objective(model, triples):
    """ The training objective of model over triples. """

    total = 0.0
    for t in triples:
        error = float(t.rating) - model.global_mean - float(
            model.user_factors[str(t.user_id)] @ model.item_factors[str(t.item_id)])
        total += error * error

    penalty = sum(float(u @ u) for u in model.user_factors.values()) + \
        sum(float(v @ v) for v in model.item_factors.values())
    return total + model.hyper.lam * penalty


def predict_mf(model, user_id, item_id, scale):
    """ global mean + u.v when both the user and the item were seen in training, the global mean
    otherwise; clamped to the scale. """

    user = model.user_factors.get(str(user_id))
    item = model.item_factors.get(str(item_id))

    raw = model.global_mean
    if user is not None and item is not None:
        raw += float(user @ item)

    return scale.clamp(raw)


def save_mf(model, path):
    """ Writes model in a versioned plain-text format. Floats are written with repr so they read
    back bit-exact. """

    def row(key, vector):
        return '{}\t{}'.format(json.dumps(key), ' '.join(repr(float(x)) for x in vector))

    hyper = model.hyper
    lines = [
        '{} {}'.format(MF_FORMAT_HEADER, MF_FORMAT_VERSION),
        'd {}'.format(hyper.d),
        'lambda {}'.format(repr(float(hyper.lam))),
        'iterations {}'.format(hyper.iterations),
        'seed {}'.format(hyper.seed),
        'global_mean {}'.format(repr(model.global_mean)),
        'users {}'.format(len(model.user_factors))
    ]
    lines += [row(key, model.user_factors[key]) for key in sorted(model.user_factors)]
    lines.append('items {}'.format(len(model.item_factors)))
    lines += [row(key, model.item_factors[key]) for key in sorted(model.item_factors)]

    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(lines) + '\n')
    except OSError as e:
        raise BaselineError('Could not write MF model to {}: {}'.format(path, e))


def load_mf(path):
    try:
        with open(path, encoding='utf-8') as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise BaselineError('Could not read MF model from {}: {}'.format(path, e))

    try:
        header, version = lines[0].split()
        if header != MF_FORMAT_HEADER or int(version) != MF_FORMAT_VERSION:
            raise ValueError('unsupported header {!r}'.format(lines[0]))

        values = dict(line.split(' ', 1) for line in lines[1:6])
        hyper = MFHyper(d=int(values['d']), lam=float(values['lambda']),
                        iterations=int(values['iterations']), seed=int(values['seed']))

        def table(start):
            label, count = lines[start].split()
            rows = dict()
            for line in lines[start + 1:start + 1 + int(count)]:
                key, vector = line.split('\t')
                rows[json.loads(key)] = np.array([float(x) for x in vector.split()])
            return label, rows, start + 1 + int(count)

        label_u, user_factors, next_line = table(6)
        label_i, item_factors, _ = table(next_line)
        if (label_u, label_i) != ('users', 'items'):
            raise ValueError('factor tables out of order')

    except (ValueError, KeyError, IndexError) as e:
        raise BaselineError('Malformed MF model file {}: {}'.format(path, e))

    for vector in list(user_factors.values()) + list(item_factors.values()):
        if vector.shape != (hyper.d,):
            raise BaselineError('Factor of length {} in a d={} model'.format(len(vector), hyper.d))

    return MFModel(user_factors=user_factors, item_factors=item_factors,
                   global_mean=float(values['global_mean']), hyper=hyper)
