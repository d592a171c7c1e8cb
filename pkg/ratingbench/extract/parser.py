""" The extraction function: turns a raw model output into an integer score (and, for
review-writing prompts, the hypothetical review) or a typed parse failure. """

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

SCORE_KEY = 'Score'
REVIEW_KEY = 'Review'

# A generation loop is a tail of at least LOOP_MIN_TAIL characters made of LOOP_MIN_REPEATS or
# more back-to-back copies of one unit of at most LOOP_MAX_UNIT characters.
LOOP_MIN_TAIL = 200
LOOP_MIN_REPEATS = 4
LOOP_MAX_UNIT = 200

_FENCE = re.compile(r'```[A-Za-z]*')
_INTEGER_LITERAL = re.compile(r'^[+-]?\d+$')
_DECODER = json.JSONDecoder(strict=False)


class FailureReason(str, Enum):
    NO_STRUCTURED_BLOCK = 'no_structured_block'
    MISSING_SCORE_KEY = 'missing_score_key'
    NON_INTEGER_SCORE = 'non_integer_score'
    OUT_OF_SCALE = 'out_of_scale'
    GENERATION_LOOP = 'generation_loop'


@dataclass(frozen=True)
class ParseResult:
    """ Exactly one of: a score within the scale (with an optional review), or a failure
    reason. """

    score: Optional[int] = None
    review: Optional[str] = None
    reason: Optional[FailureReason] = None

    @classmethod
    def success(cls, score, review=None):
        return cls(score=score, review=review)

    @classmethod
    def failure(cls, reason):
        return cls(reason=FailureReason(reason))

    @property
    def ok(self):
        return self.reason is None

    def to_json(self):
        if self.ok:
            return {'outcome': 'score', 'score': self.score, 'review': self.review}
        return {'outcome': 'failure', 'reason': self.reason.value}

    @classmethod
    def from_json(cls, data):
        if data['outcome'] == 'score':
            return cls.success(data['score'], data.get('review'))
        return cls.failure(data['reason'])


def _json_objects(text):
    """ Yields every top-level JSON object embedded in text, in order of appearance. """

    pos = text.find('{')
    while pos != -1:
        try:
            obj, end = _DECODER.raw_decode(text, pos)
        except ValueError:
            pos = text.find('{', pos + 1)
            continue

        if isinstance(obj, dict):
            yield obj
        pos = text.find('{', end)


def _score_value(obj):
    if SCORE_KEY in obj:
        return obj[SCORE_KEY]
    for key, value in obj.items():
        if key.strip().lower() == SCORE_KEY.lower():
            return value
    raise KeyError(SCORE_KEY)


def _has_score_key(obj):
    try:
        _score_value(obj)
    except KeyError:
        return False
    return True


def _scored_objects(value):
    """ The objects carrying a "Score" key in value, in document order. An object with the key is
    taken as a whole; only objects without it are searched for nested ones. """

    if isinstance(value, dict):
        if _has_score_key(value):
            yield value
            return
        value = value.values()
    elif not isinstance(value, list):
        return

    for child in value:
        yield from _scored_objects(child)


def _as_integer(value):
    """ Returns the integer a score value denotes, or None for anything that is not a whole
    number. Booleans are not numbers here. """

    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return int(value) if value.is_integer() else None
    if isinstance(value, str) and _INTEGER_LITERAL.match(value.strip()):
        return int(value.strip())
    return None


def has_generation_loop(text):
    """ True when the end of text is one short unit repeated over and over. """

    text = text.rstrip()
    n = len(text)
    if n < LOOP_MIN_TAIL:
        return False

    for unit in range(1, min(LOOP_MAX_UNIT, n // LOOP_MIN_REPEATS) + 1):
        tail = text[n - unit:]
        repeats = 1
        start = n - 2 * unit
        while start >= 0 and text[start:start + unit] == tail:
            repeats += 1
            start -= unit
        if repeats >= LOOP_MIN_REPEATS and repeats * unit >= LOOP_MIN_TAIL:
            return True

    return False


def extract_score(raw, scale, expects_review=False):
    """ Parses the last JSON object carrying a "Score" key out of raw, including one nested in a
    wrapper such as {"answer": {"Score": 7}}. Code fences and prose around the object are ignored.
    Never raises: every input maps to one ParseResult. """

    text = _FENCE.sub(' ', raw or '')
    objects = list(_json_objects(text))
    scored = [found for obj in objects for found in _scored_objects(obj)]

    if not scored:
        if objects:
            return ParseResult.failure(FailureReason.MISSING_SCORE_KEY)
        if has_generation_loop(raw or ''):
            return ParseResult.failure(FailureReason.GENERATION_LOOP)
        return ParseResult.failure(FailureReason.NO_STRUCTURED_BLOCK)

    final = scored[-1]
    score = _as_integer(_score_value(final))

    if score is None:
        return ParseResult.failure(FailureReason.NON_INTEGER_SCORE)
    if not scale.contains(score):
        return ParseResult.failure(FailureReason.OUT_OF_SCALE)

    review = None
    if expects_review and isinstance(final.get(REVIEW_KEY), str):
        review = final[REVIEW_KEY]

    return ParseResult.success(score, review)
