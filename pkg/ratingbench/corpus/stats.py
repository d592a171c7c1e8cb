""" Dataset-level statistics: lengths, per-user score spread, label distribution and how
representative the sampled in-context scores are of each user's full history. """

from collections import Counter

import numpy as np

from ratingbench.corpus.models import DatasetStats
from ratingbench.errors import CorpusError
from ratingbench.evalmetrics.stats import spearman


def user_history(records):
    """ Returns user_id -> (mean rating, review count) over a full corpus. """

    ratings = dict()
    for record in records:
        ratings.setdefault(record.user_id, []).append(record.rating)

    return {user_id: (float(np.mean(values)), len(values)) for user_id, values in ratings.items()}


def dataset_stats(dataset, history=None):
    """ Computes DatasetStats over all k+1 reviews of every instance. When the full-corpus
    history of the users is supplied, also the representativeness correlation (Spearman between a
    user's overall mean and the mean of their k context scores) and the average total number of
    reviews per user. """

    if not dataset:
        raise CorpusError('Cannot compute statistics of an empty dataset.')

    records = [record for instance in dataset for record in instance.all_records]

    # Population stddev of each instance's k+1 ratings, averaged over instances.
    per_user_sd = [float(np.std([r.rating for r in instance.all_records])) for instance in dataset]

    stats = DatasetStats(
        n_instances=len(dataset),
        avg_item_description_len=float(np.mean([len(r.item_description) for r in records])),
        avg_review_len=float(np.mean([len(r.review_text) for r in records])),
        avg_per_user_score_stddev=float(np.mean(per_user_sd)),
        label_histogram=dict(sorted(Counter(r.rating for r in records).items()))
    )

    if history:
        covered = [i for i in dataset if i.target.user_id in history]
        if covered:
            stats.avg_total_reviews_per_user = float(np.mean(
                [history[i.target.user_id][1] for i in covered]))
        if len(covered) >= 2:
            stats.representativeness_rho = spearman(
                [history[i.target.user_id][0] for i in covered],
                [float(np.mean(i.context_scores)) for i in covered]
            )

    return stats
