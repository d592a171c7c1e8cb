""" Construction of evaluation datasets from ingested records, and the difficult-setting variants
(shuffled review texts, fewer in-context examples). """

import random
from dataclasses import dataclass, replace
from logging import getLogger, INFO
from typing import Optional

from ratingbench.corpus.models import EvalInstance, RatingScale
from ratingbench.errors import CorpusError

_log = getLogger(__name__)
_log.setLevel(INFO)

_INSTANCE_ID_TEMPLATE = '{source}:{user_id}'


@dataclass(frozen=True)
class ConstructionParams:
    scale: RatingScale
    k: int = 5
    n: int = 1000
    min_len: int = 200
    max_len: Optional[int] = None
    seed: int = 0
    source_dataset: str = 'dataset'

    def __post_init__(self):
        if self.k < 1:
            raise CorpusError('k must be at least 1, got {}'.format(self.k))
        if self.n < 1:
            raise CorpusError('n must be at least 1, got {}'.format(self.n))
        if self.min_len < 0:
            raise CorpusError('min_len must be non-negative, got {}'.format(self.min_len))
        if self.max_len is not None and self.max_len <= self.min_len:
            raise CorpusError('max_len ({}) must exceed min_len ({})'.format(
                self.max_len, self.min_len))

    def length_ok(self, review_text):
        length = len(review_text)
        if length < self.min_len:
            return False
        return self.max_len is None or length < self.max_len

    def describe_filter(self):
        if self.max_len is None:
            return '{} <= review length'.format(self.min_len)
        return '{} <= review length < {}'.format(self.min_len, self.max_len)


def _pick_reviews(indexed_reviews, k, rng):
    """ Chooses the k+1 reviews of one user, target last. With timestamps on every review: the
    chronological run ending at the most recent one. Otherwise a seeded uniform sample. """

    if all(r.timestamp is not None for _, r in indexed_reviews):
        ordered = sorted(indexed_reviews, key=lambda pair: (pair[1].timestamp, pair[0]))
        return [r for _, r in ordered[-(k + 1):]]

    return [r for _, r in rng.sample(indexed_reviews, k + 1)]


def construct_instances(records, params):
    """ Builds at most params.n instances, one per sampled user, from users with at least k+1
    reviews passing the length filter. Deterministic for fixed records and params. """

    # Eligible reviews per user, remembering each review's position in the corpus so ties in
    # timestamps resolve in file order.
    eligible_by_user = dict()
    for index, record in enumerate(records):
        if params.length_ok(record.review_text):
            eligible_by_user.setdefault(record.user_id, []).append((index, record))

    if not eligible_by_user:
        raise CorpusError('No review satisfies the length filter ({}).'.format(
            params.describe_filter()))

    candidates = sorted(u for u, reviews in eligible_by_user.items()
                        if len(reviews) >= params.k + 1)

    if not candidates:
        raise CorpusError('No user has k+1={} reviews satisfying the length filter ({}).'.format(
            params.k + 1, params.describe_filter()))

    rng = random.Random(params.seed)
    chosen_users = rng.sample(candidates, min(params.n, len(candidates)))

    instances = list()
    for user_id in chosen_users:
        picked = _pick_reviews(eligible_by_user[user_id], params.k, rng)
        instances.append(EvalInstance(
            instance_id=_INSTANCE_ID_TEMPLATE.format(source=params.source_dataset, user_id=user_id),
            context=tuple(picked[:-1]),
            target=picked[-1],
            scale=params.scale,
            source_dataset=params.source_dataset
        ))

    _log.info('Constructed {} instances from {} candidate users ({}).'.format(
        len(instances), len(candidates), params.describe_filter()))

    return instances


def _is_derangement(order):
    return all(source != slot for slot, source in enumerate(order))


def make_shuffle_variant(dataset, seed):
    """ Reassigns every in-context review text to another (instance, position) slot. Ratings,
    item descriptions, targets and instance order stay put; only the texts move. """

    if not dataset:
        raise CorpusError('Cannot build a shuffle variant of an empty dataset.')

    ks = {instance.k for instance in dataset}
    if len(ks) != 1:
        raise CorpusError('Shuffle needs every instance to have the same k, got {}'.format(
            sorted(ks)))
    k = ks.pop()

    texts = [record.review_text for instance in dataset for record in instance.context]
    order = list(range(len(texts)))

    if len(texts) < 2:
        _log.warning('Only one in-context review in the dataset; the shuffle is the identity.')
    else:
        # Rejection sampling is uniform over derangements and needs e tries on average.
        rng = random.Random(seed)
        rng.shuffle(order)
        while not _is_derangement(order):
            rng.shuffle(order)

    shuffled = list()
    for i, instance in enumerate(dataset):
        context = tuple(
            replace(record, review_text=texts[order[i * k + j]])
            for j, record in enumerate(instance.context)
        )
        shuffled.append(replace(instance, context=context))

    return shuffled


def reduce_context(dataset, k_new):
    """ Keeps the first k_new in-context records of every instance. """

    reduced = list()
    for instance in dataset:
        if k_new < 1 or k_new > instance.k:
            raise CorpusError('Cannot reduce instance {} from k={} to k={}'.format(
                instance.instance_id, instance.k, k_new))
        reduced.append(replace(instance, context=instance.context[:k_new]))

    return reduced
