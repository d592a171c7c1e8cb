""" Domain types shared by corpus ingestion, dataset construction and everything downstream. """

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple


@dataclass(frozen=True)
class RatingScale:
    """ Lowest and highest permissible integer rating of a dataset. """

    y_min: int
    y_max: int

    def __post_init__(self):
        for bound in (self.y_min, self.y_max):
            if isinstance(bound, bool) or not isinstance(bound, int):
                raise ValueError('Rating scale bounds must be integers, got {!r}'.format(bound))
        if self.y_min >= self.y_max:
            raise ValueError('Rating scale needs y_min < y_max, got [{}, {}]'.format(
                self.y_min, self.y_max))

    def contains(self, value):
        return self.y_min <= value <= self.y_max

    def clamp(self, value):
        return float(min(max(value, self.y_min), self.y_max))

    def to_json(self):
        return {'y_min': self.y_min, 'y_max': self.y_max}


@dataclass(frozen=True)
class ReviewRecord:
    """ One (user, item, review text, rating) interaction. The item is already reduced to its
    unified description text. """

    user_id: str
    item_id: str
    item_description: str
    review_text: str
    rating: int
    timestamp: Optional[int] = None


@dataclass(frozen=True)
class EvalInstance:
    """ k in-context reviews of one user plus the target review whose rating is predicted. """

    instance_id: str
    context: Tuple[ReviewRecord, ...]
    target: ReviewRecord
    scale: RatingScale
    source_dataset: str

    @property
    def k(self):
        return len(self.context)

    @property
    def context_scores(self):
        return [r.rating for r in self.context]

    @property
    def all_records(self):
        return list(self.context) + [self.target]


@dataclass
class DatasetStats:
    n_instances: int
    avg_item_description_len: float
    avg_review_len: float
    avg_per_user_score_stddev: float
    label_histogram: Dict[int, int] = field(default_factory=dict)
    representativeness_rho: Optional[float] = None
    avg_total_reviews_per_user: Optional[float] = None

    def to_json(self):
        return {
            'n_instances': self.n_instances,
            'avg_item_description_len': self.avg_item_description_len,
            'avg_review_len': self.avg_review_len,
            'avg_per_user_score_stddev': self.avg_per_user_score_stddev,
            'label_histogram': {str(k): v for k, v in sorted(self.label_histogram.items())},
            'representativeness_rho': self.representativeness_rho,
            'avg_total_reviews_per_user': self.avg_total_reviews_per_user
        }
