""" Extrapolation classes: a score below the lowest (l_low) or above the highest (l_high) of the
in-context scores, and how well predictions land in the same class as the ground truth. """

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ratingbench.errors import MetricsError


class ExtrapolationLabel(str, Enum):
    L_LOW = 'l_low'
    L_IN = 'l_in'
    L_HIGH = 'l_high'

    @property
    def extrapolated(self):
        return self is not ExtrapolationLabel.L_IN


@dataclass(frozen=True)
class ExtrapolationStats:
    precision: Optional[float]
    recall: Optional[float]
    n_pred_extrapolated: int
    n_truth_extrapolated: int
    n_true_positive: int

    def to_json(self):
        return {
            'precision': self.precision,
            'recall': self.recall,
            'n_pred_extrapolated': self.n_pred_extrapolated,
            'n_truth_extrapolated': self.n_truth_extrapolated,
            'n_true_positive': self.n_true_positive
        }


def classify_extrapolation(context_scores, value):
    """ Bounds are inclusive: a value equal to the context min or max is l_in. """

    if not context_scores:
        raise MetricsError('Cannot classify against an empty context.')

    if value < min(context_scores):
        return ExtrapolationLabel.L_LOW
    if value > max(context_scores):
        return ExtrapolationLabel.L_HIGH
    return ExtrapolationLabel.L_IN


def extrapolation_pr(records):
    """ Micro-averaged precision and recall over l_low and l_high jointly. A prediction is a true
    positive when it falls in the same extrapolation class as the ground truth. Records without a
    prediction are skipped. """

    n_pred = n_truth = n_tp = 0
    for record in records:
        if record.prediction is None:
            continue

        truth = classify_extrapolation(record.context_scores, record.ground_truth)
        pred = classify_extrapolation(record.context_scores, record.prediction)

        n_truth += truth.extrapolated
        n_pred += pred.extrapolated
        n_tp += pred.extrapolated and pred is truth

    return ExtrapolationStats(
        precision=n_tp / n_pred if n_pred else None,
        recall=n_tp / n_truth if n_truth else None,
        n_pred_extrapolated=n_pred,
        n_truth_extrapolated=n_truth,
        n_true_positive=n_tp
    )
