""" Per-arm aggregation of prediction records into a MetricsReport, and Welch comparisons between
arms. """

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from ratingbench.errors import MetricsError
from ratingbench.evalmetrics.extrapolation import ExtrapolationStats, extrapolation_pr
from ratingbench.evalmetrics.stats import ALPHA, kendall_tau, rmse, spearman, welch_t_test

METRICS = ('rho', 'tau', 'rmse')

CSV_COLUMNS = ('arm', 'dataset', 'format', 'strategy', 'rho_mean', 'rho_sd', 'tau_mean', 'tau_sd',
               'rmse_mean', 'rmse_sd', 'failure_rate', 'extrap_precision', 'extrap_recall',
               'avg_pred_sd', 'n')

# Below this many per-run values per side, Welch p-values come with a small-sample caveat.
SMALL_SAMPLE_RUNS = 30


@dataclass(frozen=True)
class ReportLabels:
    dataset: str = ''
    format: str = ''
    strategy: str = ''


@dataclass(frozen=True)
class RunMetrics:
    run_index: int
    rho: Optional[float]
    tau: Optional[float]
    rmse: Optional[float]
    n_evaluated: int
    n_failed: int

    def to_json(self):
        return {
            'run_index': self.run_index,
            'rho': self.rho,
            'tau': self.tau,
            'rmse': self.rmse,
            'n_evaluated': self.n_evaluated,
            'n_failed': self.n_failed
        }


@dataclass
class MetricsReport:
    arm_id: str
    labels: ReportLabels
    per_run: List[RunMetrics]
    mean_sd: Dict[str, tuple]
    failure_rate: float
    n_evaluated: int
    n_records: int
    extrapolation: ExtrapolationStats
    avg_prediction_stddev: Optional[float]
    histogram: Dict[int, int] = field(default_factory=dict)

    @property
    def rho(self):
        return self.mean_sd['rho'][0]

    @property
    def tau(self):
        return self.mean_sd['tau'][0]

    @property
    def rmse(self):
        return self.mean_sd['rmse'][0]

    def per_run_values(self, metric):
        """ Defined per-run values of one metric, in run order. """

        if metric not in METRICS:
            raise MetricsError('Unknown metric "{}"; choose from {}'.format(metric, METRICS))
        return [getattr(r, metric) for r in self.per_run if getattr(r, metric) is not None]

    def csv_row(self):
        return {
            'arm': self.arm_id,
            'dataset': self.labels.dataset,
            'format': self.labels.format,
            'strategy': self.labels.strategy,
            'rho_mean': self.mean_sd['rho'][0],
            'rho_sd': self.mean_sd['rho'][1],
            'tau_mean': self.mean_sd['tau'][0],
            'tau_sd': self.mean_sd['tau'][1],
            'rmse_mean': self.mean_sd['rmse'][0],
            'rmse_sd': self.mean_sd['rmse'][1],
            'failure_rate': self.failure_rate,
            'extrap_precision': self.extrapolation.precision,
            'extrap_recall': self.extrapolation.recall,
            'avg_pred_sd': self.avg_prediction_stddev,
            'n': self.n_evaluated
        }

    def to_json(self):
        return {
            'arm': self.arm_id,
            'labels': {'dataset': self.labels.dataset, 'format': self.labels.format,
                       'strategy': self.labels.strategy},
            'per_run': [r.to_json() for r in self.per_run],
            'mean_sd': {metric: list(values) for metric, values in self.mean_sd.items()},
            'failure_rate': self.failure_rate,
            'n_evaluated': self.n_evaluated,
            'n_records': self.n_records,
            'extrapolation': self.extrapolation.to_json(),
            'avg_prediction_stddev': self.avg_prediction_stddev,
            'histogram': {str(k): v for k, v in sorted(self.histogram.items())}
        }


@dataclass(frozen=True)
class Comparison:
    metric: str
    arm_a: str
    arm_b: str
    result: object
    n_a: int
    n_b: int
    alpha: float = ALPHA

    @property
    def small_sample(self):
        return min(self.n_a, self.n_b) < SMALL_SAMPLE_RUNS

    def to_json(self):
        data = {'metric': self.metric, 'arm_a': self.arm_a, 'arm_b': self.arm_b,
                'n_a': self.n_a, 'n_b': self.n_b, 'alpha': self.alpha,
                'significant': self.result.significant(self.alpha),
                'small_sample': self.small_sample}
        data.update(self.result.to_json())
        return data


def mean_and_sd(values):
    """ Mean and sample stddev (ddof=1) of the defined values. None where undefined. """

    values = [v for v in values if v is not None]
    if not values:
        return None, None
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else None
    return mean, sd


def round_half_up(value):
    return int(math.floor(value + 0.5))


def _run_metrics(run_index, records):
    parsed = [r for r in records if r.prediction is not None]
    preds = [r.prediction for r in parsed]
    truths = [r.ground_truth for r in parsed]

    defined = len(parsed) >= 2
    return RunMetrics(
        run_index=run_index,
        rho=spearman(preds, truths) if defined else None,
        tau=kendall_tau(preds, truths) if defined else None,
        rmse=rmse(preds, truths) if parsed else None,
        n_evaluated=len(parsed),
        n_failed=len(records) - len(parsed)
    )


def aggregate(records, arm_id=None, labels=None):
    """ Computes the MetricsReport of one arm. Per-run correlations and RMSE only use that run's
    parsed records; failure rate, extrapolation and the histogram pool all runs. """

    records = list(records)
    if not records:
        raise MetricsError('Cannot aggregate an empty record set.')

    arm_id = arm_id or records[0].arm_id
    labels = labels or ReportLabels()

    by_run = defaultdict(list)
    for record in sorted(records, key=lambda r: (r.run_index, r.instance_id)):
        by_run[record.run_index].append(record)

    per_run = [_run_metrics(run_index, by_run[run_index]) for run_index in sorted(by_run)]

    parsed = [r for r in records if r.prediction is not None]
    n_failed = len(records) - len(parsed)

    by_instance = defaultdict(list)
    for record in parsed:
        by_instance[record.instance_id].append(record.prediction)
    spreads = [float(np.std(preds, ddof=1)) for _, preds in sorted(by_instance.items())
               if len(preds) >= 2]

    return MetricsReport(
        arm_id=arm_id,
        labels=labels,
        per_run=per_run,
        mean_sd={metric: mean_and_sd([getattr(r, metric) for r in per_run]) for metric in METRICS},
        failure_rate=n_failed / len(records),
        n_evaluated=len(parsed),
        n_records=len(records),
        extrapolation=extrapolation_pr(parsed),
        avg_prediction_stddev=float(np.mean(spreads)) if spreads else None,
        histogram=dict(sorted(Counter(round_half_up(r.prediction) for r in parsed).items()))
    )


def restrict_to_parsed(baseline_records, llm_records):
    """ Pairs a baseline with an LLM arm: for every run of the LLM arm, one copy of the baseline
    record of each instance that run parsed successfully, carrying that run's index. """

    baseline_by_instance = {r.instance_id: r for r in baseline_records}

    restricted = list()
    for record in sorted(llm_records, key=lambda r: (r.run_index, r.instance_id)):
        if record.prediction is None or record.instance_id not in baseline_by_instance:
            continue
        restricted.append(replace(baseline_by_instance[record.instance_id],
                                  run_index=record.run_index))
    return restricted


def compare(report_a, report_b, metric='rho', alpha=ALPHA):
    """ Welch's t-test on the per-run values of one metric of two arms. """

    a = report_a.per_run_values(metric)
    b = report_b.per_run_values(metric)
    return Comparison(metric=metric, arm_a=report_a.arm_id, arm_b=report_b.arm_id,
                      result=welch_t_test(a, b), n_a=len(a), n_b=len(b), alpha=alpha)
