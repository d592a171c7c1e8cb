""" User profiles: the in-context preference information placed in a prompt. """

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from ratingbench.errors import ProfileError


class ProfileKind(str, Enum):
    SCORE_ONLY = 'score_only'              # S -> S
    REVIEW_SCORE = 'review_score'          # RS -> S and RS -> RS
    DESCRIPTION_ONLY = 'description_only'  # (none) -> S


@dataclass(frozen=True)
class ProfileFormat:
    kind: ProfileKind
    with_description: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kind', ProfileKind(self.kind))
        if self.kind is ProfileKind.DESCRIPTION_ONLY and not self.with_description:
            raise ProfileError('The description-only format always carries a description.')

    @property
    def label(self):
        return '{}{}'.format(self.kind.value, '+description' if self.with_description else '')


@dataclass(frozen=True)
class ProfileEntry:
    item_description: str
    review_text: Optional[str]
    rating: int


@dataclass(frozen=True)
class UserProfile:
    entries: Tuple[ProfileEntry, ...]
    description: Optional[str] = None

    @property
    def has_reviews(self):
        return bool(self.entries) and all(e.review_text is not None for e in self.entries)


def assemble_profile(instance, profile_format, description=None):
    """ Projects the instance's context onto the fields the format shows the model, and attaches
    the self-described preference text when the format asks for it. """

    if profile_format.with_description and not description:
        raise ProfileError('Format {} needs a self-description for instance {}'.format(
            profile_format.label, instance.instance_id))

    if profile_format.kind is ProfileKind.DESCRIPTION_ONLY:
        entries = ()
    else:
        keep_review = profile_format.kind is ProfileKind.REVIEW_SCORE
        entries = tuple(
            ProfileEntry(
                item_description=record.item_description,
                review_text=record.review_text if keep_review else None,
                rating=record.rating
            )
            for record in instance.context
        )

    return UserProfile(
        entries=entries,
        description=description if profile_format.with_description else None
    )
