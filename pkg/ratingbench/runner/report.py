""" Writing MetricsReports out as CSV rows, markdown tables, histogram data and flat key-value text.

Floats go to CSV and text files via repr, so re-evaluating unchanged records reproduces the files
byte for byte. """

import csv
import io
from enum import Enum
from logging import getLogger, INFO

from ratingbench.errors import RatingBenchError
from ratingbench.evalmetrics.aggregate import CSV_COLUMNS

_log = getLogger(__name__)
_log.setLevel(INFO)

HISTOGRAM_COLUMNS = ('arm', 'rating', 'count')
MARKDOWN_HEADER = ('Arm', 'ρ', 'τ', 'RMSE', 'FR')
NOT_A_VALUE = 'n/a'


class ReportLayout(str, Enum):
    CSV = 'csv'
    MARKDOWN_TABLE = 'markdown-table'
    HISTOGRAM_DATA = 'histogram-data'


def _csv_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _mean_sd(mean, sd):
    if mean is None:
        return NOT_A_VALUE
    if sd is None:
        return '{:.3f}'.format(mean)
    return '{:.3f} ± {:.3f}'.format(mean, sd)


def _write_csv(rows, header):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_csv(reports):
    rows = list()
    for report in reports:
        row = report.csv_row()
        rows.append([_csv_value(row[column]) for column in CSV_COLUMNS])
    return _write_csv(rows, CSV_COLUMNS)


def render_markdown_table(reports):
    lines = ['| {} |'.format(' | '.join(MARKDOWN_HEADER)),
             '| {} |'.format(' | '.join('---' for _ in MARKDOWN_HEADER))]
    for report in reports:
        cells = [report.arm_id] + [_mean_sd(*report.mean_sd[m]) for m in ('rho', 'tau', 'rmse')]
        cells.append('{:.3f}'.format(report.failure_rate))
        lines.append('| {} |'.format(' | '.join(cells)))
    return '\n'.join(lines) + '\n'


def render_histogram_data(reports):
    rows = [[report.arm_id, rating, count]
            for report in reports for rating, count in sorted(report.histogram.items())]
    return _write_csv(rows, HISTOGRAM_COLUMNS)


def render_flat_text(report):
    """ One "key: value" line per statistic, per-run values included. """

    lines = ['{}: {}'.format(key, _csv_value(value)) for key, value in report.csv_row().items()]
    lines.append('n_records: {}'.format(report.n_records))
    for run in report.per_run:
        for key, value in run.to_json().items():
            if key != 'run_index':
                lines.append('run.{}.{}: {}'.format(run.run_index, key, _csv_value(value)))
    extrapolation = report.extrapolation
    lines.append('extrap_n_pred: {}'.format(extrapolation.n_pred_extrapolated))
    lines.append('extrap_n_truth: {}'.format(extrapolation.n_truth_extrapolated))
    for rating, count in sorted(report.histogram.items()):
        lines.append('histogram.{}: {}'.format(rating, count))
    return '\n'.join(lines) + '\n'


_RENDERERS = {
    ReportLayout.CSV: render_csv,
    ReportLayout.MARKDOWN_TABLE: render_markdown_table,
    ReportLayout.HISTOGRAM_DATA: render_histogram_data
}


def write_text(path, text):
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise RatingBenchError('Could not write report file {}: {}'.format(path, e))
    _log.info('Wrote {}'.format(path))


def emit_report(reports, layout, path=None):
    """ Renders reports in one layout; writes it to path when given. Returns the text. """

    reports = list(reports)
    if not reports:
        raise RatingBenchError('No metrics reports to emit.')

    text = _RENDERERS[ReportLayout(layout)](reports)
    if path is not None:
        write_text(path, text)
    return text
