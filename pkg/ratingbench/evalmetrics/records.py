""" The per-prediction record every experiment arm and baseline produces. """

from dataclasses import dataclass
from typing import Optional, Tuple

from ratingbench.errors import MetricsError
from ratingbench.extract.parser import ParseResult


@dataclass(frozen=True)
class PredictionRecord:
    """ One prediction for one instance in one run. LLM records carry the ParseResult and have a
    prediction exactly when parsing succeeded; baseline records have no ParseResult and always a
    prediction. """

    instance_id: str
    run_index: int
    arm_id: str
    config_fingerprint: str
    ground_truth: int
    context_scores: Tuple[int, ...]
    parse: Optional[ParseResult] = None
    prediction: Optional[float] = None
    seed: Optional[int] = None
    raw_ref: Optional[str] = None
    prompt_fingerprint: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'context_scores', tuple(self.context_scores))

        if self.parse is None:
            if self.prediction is None:
                raise MetricsError('Baseline record {} has no prediction'.format(self.key))
        elif self.parse.ok:
            if self.prediction is None or float(self.prediction) != float(self.parse.score):
                raise MetricsError('Record {} must predict its parsed score {}'.format(
                    self.key, self.parse.score))
        elif self.prediction is not None:
            raise MetricsError('Failed parse in record {} cannot carry a prediction'.format(
                self.key))

    @property
    def key(self):
        return self.instance_id, self.run_index, self.config_fingerprint

    @property
    def is_baseline(self):
        return self.parse is None

    @property
    def is_failure(self):
        return self.parse is not None and not self.parse.ok
