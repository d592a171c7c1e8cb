""" Similarity between the target item and the in-context items of an instance, and the median
split of a dataset into Similar and Dissimilar halves. """

import csv
from dataclasses import dataclass
from enum import Enum
from logging import getLogger, INFO

import numpy as np

from ratingbench.errors import SimilarityError

_log = getLogger(__name__)
_log.setLevel(INFO)

SIMILAR = 'similar'
DISSIMILAR = 'dissimilar'
CSV_COLUMNS = ('instance_id', 'score', 'subset')

# SimCSE sentence encoder, served behind any embeddings endpoint.
DEFAULT_EMBEDDING_MODEL = 'princeton-nlp/sup-simcse-roberta-large'


class Pooling(str, Enum):
    MEAN = 'mean'
    MAX = 'max'


@dataclass(frozen=True)
class SimilarityScore:
    instance_id: str
    score: float


def cosine(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape or a.shape[0] < 1:
        raise SimilarityError('Vectors must share one dimension >= 1, got {} and {}'.format(
            a.shape, b.shape))

    norms = np.linalg.norm(a) * np.linalg.norm(b)
    if norms == 0:
        raise SimilarityError('Cosine similarity is undefined for a zero vector.')

    return float(np.clip(a @ b / norms, -1.0, 1.0))


def _vector(embeddings, text):
    try:
        return embeddings[text]
    except KeyError:
        raise SimilarityError('No embedding for text {!r}'.format(text[:80]))


def instance_similarity(instance, embeddings, pooling=Pooling.MEAN):
    """ Pools the cosines between the target item description and each in-context item
    description (mean by default). embeddings maps description text -> vector. """

    target = _vector(embeddings, instance.target.item_description)
    cosines = [cosine(target, _vector(embeddings, record.item_description))
               for record in instance.context]

    pooled = max(cosines) if Pooling(pooling) is Pooling.MAX else float(np.mean(cosines))
    return SimilarityScore(instance.instance_id, pooled)


def embed_dataset(dataset, gateway, config):
    """ Embeds every distinct item description of the dataset once. """

    texts = sorted({record.item_description
                    for instance in dataset for record in instance.all_records})
    _log.info('Embedding {} distinct item descriptions with {}'.format(
        len(texts), config.model_name))
    return dict(zip(texts, gateway.embed(texts, config)))


def score_dataset(dataset, embeddings, pooling=Pooling.MEAN):
    return [instance_similarity(instance, embeddings, pooling) for instance in dataset]


def split_by_similarity(dataset, scores):
    """ Sorts by score descending (ties by instance_id ascending); the top n // 2 instances are
    Similar, the rest Dissimilar, so an odd median instance lands in Dissimilar. """

    score_by_id = {s.instance_id: s.score for s in scores}
    missing = [i.instance_id for i in dataset if i.instance_id not in score_by_id]
    if missing:
        raise SimilarityError('No similarity score for instances {}'.format(missing[:5]))

    ordered = sorted(dataset, key=lambda i: (-score_by_id[i.instance_id], i.instance_id))
    half = len(ordered) // 2
    return ordered[:half], ordered[half:]


def write_similarity_csv(path, scores, similar, dissimilar):
    subset = {i.instance_id: SIMILAR for i in similar}
    subset.update({i.instance_id: DISSIMILAR for i in dissimilar})

    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_COLUMNS)
            for s in sorted(scores, key=lambda s: s.instance_id):
                writer.writerow([s.instance_id, repr(s.score), subset.get(s.instance_id, '')])
    except OSError as e:
        raise SimilarityError('Could not write similarity scores to {}: {}'.format(path, e))
