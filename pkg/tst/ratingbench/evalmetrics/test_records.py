from unittest import TestCase

from ratingbench.errors import MetricsError
from ratingbench.evalmetrics.records import PredictionRecord
from ratingbench.extract.parser import ParseResult


def _record(**kwargs):
    values = dict(instance_id='i0', run_index=2, arm_id='arm', config_fingerprint='fp',
                  ground_truth=7, context_scores=[6, 8])
    values.update(kwargs)
    return PredictionRecord(**values)


class PredictionRecordTests(TestCase):

    def test_parsed_record(self):
        record = _record(parse=ParseResult.success(7), prediction=7)

        assert record.key == ('i0', 2, 'fp')
        assert record.context_scores == (6, 8)
        assert not record.is_baseline
        assert not record.is_failure

    def test_failed_record(self):
        record = _record(parse=ParseResult.failure('out_of_scale'))

        assert record.is_failure
        assert record.prediction is None

    def test_baseline_record(self):
        record = _record(prediction=6.5)

        assert record.is_baseline
        assert not record.is_failure

    def test_baseline_needs_prediction(self):
        with self.assertRaises(MetricsError):
            _record()

    def test_prediction_must_match_parsed_score(self):
        with self.assertRaises(MetricsError):
            _record(parse=ParseResult.success(7), prediction=6)
        with self.assertRaises(MetricsError):
            _record(parse=ParseResult.success(7))

    def test_failure_cannot_carry_prediction(self):
        with self.assertRaises(MetricsError):
            _record(parse=ParseResult.failure('out_of_scale'), prediction=7)
