""" Rank correlations, RMSE and Welch's t-test.

Undefined results (a constant ranking, a degenerate test) come back as None rather than NaN so
they survive serialization and are easy to exclude from cross-run means. """

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as sp_stats

from ratingbench.errors import MetricsError

ALPHA = 0.05


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: Optional[float]
    p: float
    degenerate: bool = False

    def significant(self, alpha=ALPHA):
        return self.p < alpha

    def to_json(self):
        return {'t': self.t, 'df': self.df, 'p': self.p, 'degenerate': self.degenerate}


def _check_paired(xs, ys, minimum):
    if len(xs) != len(ys):
        raise MetricsError('Paired samples differ in length: {} vs {}'.format(len(xs), len(ys)))
    if len(xs) < minimum:
        raise MetricsError('Need at least {} paired values, got {}'.format(minimum, len(xs)))


def _is_constant(values):
    return len(set(values)) < 2


def _clip_unit(value):
    return max(-1.0, min(1.0, float(value)))


def spearman(xs, ys):
    """ Pearson correlation of average-ranked values. None when either side is constant. """

    _check_paired(xs, ys, 2)
    if _is_constant(xs) or _is_constant(ys):
        return None

    rho, _ = sp_stats.spearmanr(xs, ys)
    return _clip_unit(rho)


def kendall_tau(xs, ys):
    """ Kendall's tau-b, tie-corrected on both sides. None when either side is all tied. """

    _check_paired(xs, ys, 2)
    if _is_constant(xs) or _is_constant(ys):
        return None

    tau, _ = sp_stats.kendalltau(xs, ys, variant='b')
    return _clip_unit(tau)


def rmse(preds, truths):
    _check_paired(preds, truths, 1)
    diff = np.asarray(preds, dtype=float) - np.asarray(truths, dtype=float)
    return float(np.sqrt(np.mean(diff ** 2)))


def welch_t_test(a, b):
    """ Two-sided Welch's t-test with Welch-Satterthwaite degrees of freedom. """

    if len(a) < 2 or len(b) < 2:
        raise MetricsError('Welch\'s t-test needs at least 2 values per sample, got {} and {}'
                           .format(len(a), len(b)))

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mean_a, mean_b = float(a.mean()), float(b.mean())

    if a.var(ddof=1) == 0 and b.var(ddof=1) == 0:
        if mean_a == mean_b:
            return WelchResult(t=0.0, df=None, p=1.0, degenerate=True)
        return WelchResult(t=math.copysign(math.inf, mean_a - mean_b), df=None, p=0.0,
                           degenerate=True)

    result = sp_stats.ttest_ind(a, b, equal_var=False)
    df = float(result.df)

    # Equal means give t = 0 exactly; pin p to 1 instead of trusting 2 * sf(0) rounding.
    if mean_a == mean_b:
        return WelchResult(t=0.0, df=df, p=1.0)

    return WelchResult(t=float(result.statistic), df=df, p=min(1.0, float(result.pvalue)))
