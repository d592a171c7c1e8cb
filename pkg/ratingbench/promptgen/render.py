""" Rendering of rating-prediction prompts and of the intermediate prompts some strategies need
before the final prediction.

Templates are plain text files under templates/ with named placeholders; everything conditional
(which output format, which in-context unit, which extra sections) is decided here so the
templates stay literal. """

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ratingbench.errors import PromptError
from ratingbench.promptgen.config import DOMAIN_CONFIG, TEMPLATE_DIR

ROLE_SYSTEM = 'system'
ROLE_USER = 'user'
ROLE_ASSISTANT_PREFIX = 'assistant-prefix'

PLAIN_ASSISTANT_PREFIX = '[Review] Here is the Json format of the review:'
COT_ASSISTANT_PREFIX = 'Let\'s think step by step.'

DESCRIPTION_PREFIX = 'His / her self-description of the preference is as follows:'
SCORE_RANGE_PREFIX = 'The trend of review scores given by this user is analyzed as follows:'
PREFERENCE_PREFIX = 'The preference of him/her is analyzed as follows:'
RECOMMENDATION_START = '[The Start of Recommendation Text]'
RECOMMENDATION_END = '[The End of Recommendation Text]'

_SECTION_SEPARATOR = '\n\n'

_env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    undefined=StrictUndefined,
    keep_trailing_newline=False,
    autoescape=False
)


class OutputFormat(str, Enum):
    SCORE_ONLY = 'score_only'
    REVIEW_AND_SCORE = 'review_and_score'

    @property
    def expects_review(self):
        return self is OutputFormat.REVIEW_AND_SCORE


class IntermediateKind(str, Enum):
    SCORE_RANGE = 'score_range'
    PREFERENCE_SUMMARY = 'preference_summary'
    ITEM_RECOMMENDATION = 'item_recommendation'
    SELF_DESCRIPTION = 'self_description'

    @property
    def needs_reviews(self):
        return self is not IntermediateKind.ITEM_RECOMMENDATION


class Strategy(str, Enum):
    PLAIN = 'plain'
    ZERO_SHOT_COT = 'zero_shot_cot'
    SCORE_RANGE_SUMMARY = 'score_range_summary'
    PREFERENCE_SUMMARY = 'preference_summary'
    PREFERENCE_SUMMARY_PLUS_ITEM_REC = 'preference_summary_plus_item_rec'

    @property
    def required_intermediates(self):
        """ Intermediate texts to generate first, in the order they are requested. """

        return {
            Strategy.SCORE_RANGE_SUMMARY: (IntermediateKind.SCORE_RANGE,),
            Strategy.PREFERENCE_SUMMARY: (IntermediateKind.PREFERENCE_SUMMARY,),
            Strategy.PREFERENCE_SUMMARY_PLUS_ITEM_REC: (IntermediateKind.PREFERENCE_SUMMARY,
                                                        IntermediateKind.ITEM_RECOMMENDATION),
        }.get(self, ())

    @property
    def assistant_prefix(self):
        if self is Strategy.ZERO_SHOT_COT:
            return COT_ASSISTANT_PREFIX
        return PLAIN_ASSISTANT_PREFIX


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def to_json(self):
        return {'role': self.role, 'content': self.content}


@dataclass(frozen=True)
class RenderedPrompt:
    messages: Tuple[Message, ...]
    domain_label: str
    config_fingerprint: str

    def __post_init__(self):
        roles = [m.role for m in self.messages]
        if roles.count(ROLE_SYSTEM) != 1:
            raise PromptError('A prompt needs exactly one system message, got {}'.format(roles))
        if ROLE_ASSISTANT_PREFIX in roles[:-1] or roles.count(ROLE_ASSISTANT_PREFIX) > 1:
            raise PromptError('The assistant prefix must be the single last message')


def fingerprint_messages(messages):
    payload = json.dumps([[m.role, m.content] for m in messages], ensure_ascii=False,
                         separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def _build_prompt(messages, domain_label):
    messages = tuple(messages)
    return RenderedPrompt(messages=messages, domain_label=domain_label,
                          config_fingerprint=fingerprint_messages(messages))


def _system_message():
    return Message(ROLE_SYSTEM, _env.get_template('system.txt').render())


def _render_icl(entries, words, with_reviews):
    """ One in-context unit per profile entry, numbered from 1 in context order. """

    template = _env.get_template('icl_review_score.txt' if with_reviews else 'icl_score_only.txt')
    units = list()
    for n, entry in enumerate(entries, start=1):
        values = {'w': words, 'n': n, 'description': entry.item_description, 'score': entry.rating}
        if with_reviews:
            values['review_json'] = json.dumps(entry.review_text, ensure_ascii=False)
        units.append(template.render(**values))
    return _SECTION_SEPARATOR.join(units)


def render(instance, profile, output_format, strategy, intermediates=None, scale=None,
           domain_label='movie'):
    """ Renders the rating-prediction prompt: system message, the user message with the task
    instruction, in-context units, optional self-description and intermediate texts, output
    format and target item, then the assistant prefix of the strategy. """

    output_format = OutputFormat(output_format)
    strategy = Strategy(strategy)
    scale = scale or instance.scale
    intermediates = dict(intermediates or {})
    words = DOMAIN_CONFIG.words(domain_label)

    required = set(strategy.required_intermediates)
    given = {IntermediateKind(k) for k in intermediates}
    if required - given:
        raise PromptError('Strategy {} needs intermediate texts {}'.format(
            strategy.value, sorted(k.value for k in required - given)))
    if given - required:
        raise PromptError('Strategy {} takes no intermediate texts {}'.format(
            strategy.value, sorted(k.value for k in given - required)))
    intermediates = {IntermediateKind(k): v for k, v in intermediates.items()}

    if not profile.entries and not profile.description:
        raise PromptError('Instance {} has an empty profile'.format(instance.instance_id))
    if output_format.expects_review and not profile.has_reviews:
        raise PromptError('Review-writing output needs a profile with review texts')

    sections = list()
    if profile.entries:
        sections.append(_render_icl(profile.entries, words, profile.has_reviews))
    if profile.description:
        sections.append('{}\n{}'.format(DESCRIPTION_PREFIX, profile.description))
    if IntermediateKind.SCORE_RANGE in intermediates:
        sections.append('{}\n{}'.format(SCORE_RANGE_PREFIX,
                                        intermediates[IntermediateKind.SCORE_RANGE]))
    if IntermediateKind.PREFERENCE_SUMMARY in intermediates:
        sections.append('{}\n{}'.format(PREFERENCE_PREFIX,
                                        intermediates[IntermediateKind.PREFERENCE_SUMMARY]))

    recommendation = ''
    if IntermediateKind.ITEM_RECOMMENDATION in intermediates:
        recommendation = '\n\n{}\n{}\n{}'.format(
            RECOMMENDATION_START, intermediates[IntermediateKind.ITEM_RECOMMENDATION],
            RECOMMENDATION_END)

    output_template = ('output_review_and_score.txt' if output_format.expects_review
                       else 'output_score_only.txt')
    output_text = _env.get_template(output_template).render(y_min=scale.y_min, y_max=scale.y_max)

    user_text = _env.get_template('query.txt').render(
        w=words,
        body=_SECTION_SEPARATOR.join(sections),
        output_format=output_text,
        target=instance.target.item_description,
        recommendation=recommendation
    )

    return _build_prompt([
        _system_message(),
        Message(ROLE_USER, user_text),
        Message(ROLE_ASSISTANT_PREFIX, strategy.assistant_prefix)
    ], domain_label)


def render_intermediate(kind, instance, profile, domain_label='movie'):
    """ Renders one of the single-turn prompts whose output is embedded in a later prompt:
    score range summary, preference summary, item recommendation or self-description. """

    kind = IntermediateKind(kind)
    words = DOMAIN_CONFIG.words(domain_label)

    if kind.needs_reviews:
        if not profile.has_reviews:
            raise PromptError('Intermediate prompt {} needs profile entries with reviews'.format(
                kind.value))
        text = _env.get_template('{}.txt'.format(kind.value)).render(
            w=words, icl=_render_icl(profile.entries, words, True))
    else:
        text = _env.get_template('{}.txt'.format(kind.value)).render(
            w=words, target=instance.target.item_description)

    return _build_prompt([_system_message(), Message(ROLE_USER, text)], domain_label)


def format_transcript(prompt):
    """ Plain-text transcript of a prompt, one "=== role ===" header per message. """

    blocks = ['=== {} ===\n{}'.format(m.role, m.content) for m in prompt.messages]
    return '\n'.join(blocks) + '\n'
