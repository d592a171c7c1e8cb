import os
import random
import tempfile
from unittest import TestCase

import numpy as np

from ratingbench.baselines.mf import (
    MFHyper,
    RatingTriple,
    load_mf,
    predict_mf,
    ridge_objective,
    save_mf,
    train_mf
)
from ratingbench.corpus.models import RatingScale
from ratingbench.errors import BaselineError

WIDE_SCALE = RatingScale(-100, 100)


def _raw(model, user, item):
    return model.global_mean + float(model.user_factors[user] @ model.item_factors[item])


def _rank_one_triples():
    a = np.linspace(1.0, 3.0, 10)
    b = np.linspace(0.5, 2.5, 10)
    return [RatingTriple('u{}'.format(i), 'v{}'.format(j), float(a[i] * b[j]))
            for i in range(10) for j in range(10)]


def _noisy_rank_two():
    """ 20 x 20 ratings 3 + u.v with rank-2 factors; 70% observed with noise 0.05 for training,
    the rest held out clean. """

    rng = np.random.default_rng(42)
    U = rng.normal(size=(20, 2))
    V = rng.normal(size=(20, 2))
    observed = rng.random((20, 20)) < 0.7

    train, held_out = list(), list()
    for i in range(20):
        for j in range(20):
            clean = 3.0 + float(U[i] @ V[j])
            if observed[i, j]:
                noisy = clean + float(rng.normal(scale=0.05))
                train.append(RatingTriple('u{}'.format(i), 'v{}'.format(j), noisy))
            else:
                held_out.append(('u{}'.format(i), 'v{}'.format(j), clean))
    return train, held_out


def _user_gradient(model, triples):
    grads = {user: 2 * model.hyper.lam * u for user, u in model.user_factors.items()}
    for t in triples:
        v = model.item_factors[t.item_id]
        error = t.rating - _raw(model, t.user_id, t.item_id)
        grads[t.user_id] = grads[t.user_id] - 2 * error * v
    return grads


def _item_gradient(model, triples):
    grads = {item: 2 * model.hyper.lam * v for item, v in model.item_factors.items()}
    for t in triples:
        u = model.user_factors[t.user_id]
        error = t.rating - _raw(model, t.user_id, t.item_id)
        grads[t.item_id] = grads[t.item_id] - 2 * error * u
    return grads


class TrainMfTests(TestCase):

    def test_recovers_rank_one_matrix(self):
        triples = _rank_one_triples()

        for seed in range(5):
            model = train_mf(triples, MFHyper(d=2, lam=0.05, iterations=50, seed=seed))

            errors = [t.rating - _raw(model, t.user_id, t.item_id) for t in triples]
            assert float(np.sqrt(np.mean(np.square(errors)))) < 1e-2

    def test_generalizes_on_noisy_rank_two_matrix(self):
        train, held_out = _noisy_rank_two()

        model = train_mf(train, MFHyper(d=3, lam=0.1, iterations=50, seed=1))

        errors = [clean - predict_mf(model, u, v, WIDE_SCALE) for u, v, clean in held_out]
        assert float(np.sqrt(np.mean(np.square(errors)))) < 0.15

    def test_objective_never_increases(self):
        triples = _rank_one_triples()[::3]

        model = train_mf(triples, MFHyper(d=3, lam=0.1, iterations=15, seed=3))

        history = model.objective_history
        assert len(history) == 1 + 2 * 15
        for before, after in zip(history, history[1:]):
            assert after <= before + 1e-9 * max(1.0, before)
        assert abs(history[-1] - ridge_objective(model, triples)) < 1e-8 * max(1.0, history[-1])

    def test_last_half_sweep_is_stationary_for_items(self):
        triples = _rank_one_triples()[::2]

        model = train_mf(triples, MFHyper(d=2, lam=0.2, iterations=5, seed=0))

        for item, grad in _item_gradient(model, triples).items():
            assert float(np.linalg.norm(grad)) < 1e-8

    def test_user_gradient_matches_finite_differences(self):
        train, _ = _noisy_rank_two()
        model = train_mf(train, MFHyper(d=3, lam=0.1, iterations=50, seed=1))
        step = 1e-5

        for user, grad in _user_gradient(model, train).items():
            vector = model.user_factors[user]
            for k in range(len(vector)):
                original = vector[k]
                vector[k] = original + step
                above = ridge_objective(model, train)
                vector[k] = original - step
                below = ridge_objective(model, train)
                vector[k] = original

                assert abs((above - below) / (2 * step) - grad[k]) < 1e-5

    def test_independent_of_triple_order(self):
        triples = _rank_one_triples()
        shuffled = list(triples)
        random.Random(5).shuffle(shuffled)
        hyper = MFHyper(d=2, lam=0.1, iterations=5, seed=9)

        a = train_mf(triples, hyper)
        b = train_mf(shuffled, hyper)

        assert a.global_mean == b.global_mean
        for user in a.user_factors:
            assert np.array_equal(a.user_factors[user], b.user_factors[user])
        for item in a.item_factors:
            assert np.array_equal(a.item_factors[item], b.item_factors[item])

    def test_single_triple(self):
        model = train_mf([RatingTriple('u', 'i', 4)], MFHyper(d=2, iterations=3))

        assert model.global_mean == 4.0
        assert predict_mf(model, 'u', 'i', RatingScale(1, 5)) == 4.0

    def test_no_triples(self):
        with self.assertRaises(BaselineError):
            train_mf([])

    def test_bad_hyper(self):
        with self.assertRaises(BaselineError):
            MFHyper(d=0)
        with self.assertRaises(BaselineError):
            MFHyper(lam=0)
        with self.assertRaises(BaselineError):
            MFHyper(iterations=0)


class PredictMfTests(TestCase):

    def setUp(self):
        self.model = train_mf(_rank_one_triples(), MFHyper(d=2, lam=0.05, iterations=10))

    def test_unknown_user_or_item_gets_global_mean(self):
        scale = RatingScale(1, 10)

        assert predict_mf(self.model, 'nobody', 'v1', scale) == scale.clamp(self.model.global_mean)
        assert predict_mf(self.model, 'u1', 'nothing', scale) == \
            scale.clamp(self.model.global_mean)

    def test_clamped_to_scale(self):
        tight = RatingScale(3, 4)

        for user in self.model.user_factors:
            for item in self.model.item_factors:
                assert 3.0 <= predict_mf(self.model, user, item, tight) <= 4.0


class SaveLoadTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'model.txt')

    def tearDown(self):
        self.tmp.cleanup()

    def test_reads_back_bit_exact(self):
        triples = _rank_one_triples() + [RatingTriple('user "quoted"\tid', 'v1', 2.0)]
        model = train_mf(triples, MFHyper(d=3, lam=0.3, iterations=4, seed=11))

        save_mf(model, self.path)
        loaded = load_mf(self.path)

        assert loaded.hyper == model.hyper
        assert loaded.global_mean == model.global_mean
        assert set(loaded.user_factors) == set(model.user_factors)
        for user, vector in model.user_factors.items():
            assert np.array_equal(loaded.user_factors[user], vector)
        for item, vector in model.item_factors.items():
            assert np.array_equal(loaded.item_factors[item], vector)

    def test_file_starts_with_versioned_header(self):
        save_mf(train_mf([RatingTriple('u', 'i', 3)]), self.path)

        with open(self.path) as f:
            assert f.readline() == 'ratingbench-mf 1\n'

    def test_malformed_file(self):
        with open(self.path, 'w') as f:
            f.write('something else\n')

        with self.assertRaises(BaselineError):
            load_mf(self.path)

    def test_missing_file(self):
        with self.assertRaises(BaselineError):
            load_mf(os.path.join(self.tmp.name, 'missing.txt'))
