import os
import tempfile
from unittest import TestCase

from ratingbench.errors import RatingBenchError
from ratingbench.evalmetrics.aggregate import MetricsReport, ReportLabels, RunMetrics
from ratingbench.evalmetrics.extrapolation import ExtrapolationStats
from ratingbench.runner.report import (
    ReportLayout,
    emit_report,
    render_csv,
    render_flat_text,
    render_histogram_data,
    render_markdown_table
)


def _report(arm_id='a'):
    return MetricsReport(
        arm_id=arm_id,
        labels=ReportLabels('movies', 'rs->s', 'plain'),
        per_run=[RunMetrics(0, 0.5, 0.25, 1.5, 3, 1)],
        mean_sd={'rho': (0.5, None), 'tau': (0.25, None), 'rmse': (1.5, 0.125)},
        failure_rate=0.25,
        n_evaluated=3,
        n_records=4,
        extrapolation=ExtrapolationStats(None, 0.5, 0, 2, 0),
        avg_prediction_stddev=None,
        histogram={3: 2, 7: 1}
    )


class RenderTests(TestCase):

    def test_csv(self):
        assert render_csv([_report()]) == (
            'arm,dataset,format,strategy,rho_mean,rho_sd,tau_mean,tau_sd,rmse_mean,rmse_sd,'
            'failure_rate,extrap_precision,extrap_recall,avg_pred_sd,n\n'
            'a,movies,rs->s,plain,0.5,,0.25,,1.5,0.125,0.25,,0.5,,3\n')

    def test_markdown_table(self):
        assert render_markdown_table([_report()]) == (
            '| Arm | ρ | τ | RMSE | FR |\n'
            '| --- | --- | --- | --- | --- |\n'
            '| a | 0.500 | 0.250 | 1.500 ± 0.125 | 0.250 |\n')

    def test_undefined_mean_in_table(self):
        report = _report()
        report.mean_sd['rho'] = (None, None)

        assert '| a | n/a | 0.250 |' in render_markdown_table([report])

    def test_histogram_data(self):
        assert render_histogram_data([_report('a'), _report('b')]) == \
            'arm,rating,count\na,3,2\na,7,1\nb,3,2\nb,7,1\n'

    def test_flat_text(self):
        lines = render_flat_text(_report()).splitlines()

        assert lines[0] == 'arm: a'
        assert 'rho_sd: ' in lines
        assert 'run.0.rho: 0.5' in lines
        assert 'run.0.n_failed: 1' in lines
        assert 'histogram.7: 1' in lines


class EmitReportTests(TestCase):

    def test_writes_and_returns_text(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.md')

            text = emit_report([_report()], 'markdown-table', path)

            with open(path, encoding='utf-8') as f:
                assert f.read() == text
        assert text == render_markdown_table([_report()])

    def test_layouts(self):
        assert emit_report([_report()], ReportLayout.CSV) == render_csv([_report()])
        assert emit_report([_report()], 'histogram-data') == render_histogram_data([_report()])

    def test_no_reports(self):
        with self.assertRaises(RatingBenchError):
            emit_report([], ReportLayout.CSV)

    def test_unknown_layout(self):
        with self.assertRaises(ValueError):
            emit_report([_report()], 'pdf')
