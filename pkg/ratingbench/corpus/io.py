""" Persistence of constructed datasets: the source line format plus instance_id and role. """

import json
from logging import getLogger, INFO

from marshmallow import Schema, ValidationError, fields, validate

from ratingbench.corpus.models import EvalInstance, RatingScale, ReviewRecord
from ratingbench.errors import CorpusError

_log = getLogger(__name__)
_log.setLevel(INFO)

ROLE_TARGET = 'target'
_ROLE_CONTEXT_PREFIX = 'context:'
_DESCRIPTION = 'description'


class DatasetLineSchema(Schema):
    instance_id = fields.String(required=True)
    role = fields.String(required=True, validate=validate.Regexp(r'^(context:\d+|target)$'))
    user_id = fields.String(required=True)
    item_id = fields.String(required=True)
    item = fields.Dict(keys=fields.String(), values=fields.String(), required=True)
    review = fields.String(required=True)
    rating = fields.Integer(required=True, strict=True)
    timestamp = fields.Integer(load_default=None, allow_none=True, strict=True)
    source_dataset = fields.String(required=True)
    scale = fields.List(fields.Integer(strict=True), required=True,
                        validate=validate.Length(equal=2))


_LINE_SCHEMA = DatasetLineSchema()


def _to_line(instance, role, record):
    return {
        'instance_id': instance.instance_id,
        'role': role,
        'user_id': record.user_id,
        'item_id': record.item_id,
        'item': {_DESCRIPTION: record.item_description},
        'review': record.review_text,
        'rating': record.rating,
        'timestamp': record.timestamp,
        'source_dataset': instance.source_dataset,
        'scale': [instance.scale.y_min, instance.scale.y_max]
    }


def save_dataset(dataset, path):
    """ Writes one line per review: the k context records of an instance in order, then its
    target. """

    try:
        with open(path, 'w', encoding='utf-8') as f:
            for instance in dataset:
                for i, record in enumerate(instance.context):
                    line = _to_line(instance, '{}{}'.format(_ROLE_CONTEXT_PREFIX, i), record)
                    f.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + '\n')
                line = _to_line(instance, ROLE_TARGET, instance.target)
                f.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + '\n')

    except OSError as e:
        raise CorpusError('Could not write dataset to {}: {}'.format(path, e))

    _log.info('Wrote {} instances to {}.'.format(len(dataset), path))


def load_dataset(path):
    """ Reads a persisted dataset back. Instances keep the order of their first line; context
    records are ordered by their role index. """

    grouped = dict()

    try:
        with open(path, encoding='utf-8') as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    data = _LINE_SCHEMA.load(json.loads(line))
                except (ValueError, ValidationError) as e:
                    raise CorpusError('Malformed dataset line {} in {}: {}'.format(
                        line_no, path, e))
                grouped.setdefault(data['instance_id'], []).append(data)

    except OSError as e:
        raise CorpusError('Could not read dataset from {}: {}'.format(path, e))

    return [_build_instance(instance_id, lines) for instance_id, lines in grouped.items()]


def _build_instance(instance_id, lines):
    context = list()
    targets = list()

    for data in lines:
        record = ReviewRecord(
            user_id=data['user_id'],
            item_id=data['item_id'],
            item_description=data['item'].get(_DESCRIPTION, ''),
            review_text=data['review'],
            rating=data['rating'],
            timestamp=data['timestamp']
        )
        if data['role'] == ROLE_TARGET:
            targets.append(record)
        else:
            context.append((int(data['role'][len(_ROLE_CONTEXT_PREFIX):]), record))

    if len(targets) != 1:
        raise CorpusError('Instance {} has {} target lines, expected 1'.format(
            instance_id, len(targets)))
    if not context:
        raise CorpusError('Instance {} has no context lines'.format(instance_id))

    first = lines[0]
    scale = RatingScale(*first['scale'])
    context.sort(key=lambda pair: pair[0])

    for record in [r for _, r in context] + targets:
        if not record.item_description:
            raise CorpusError('Instance {} has an empty item description'.format(instance_id))
        if not scale.contains(record.rating):
            raise CorpusError('Instance {} has rating {} outside [{}, {}]'.format(
                instance_id, record.rating, scale.y_min, scale.y_max))

    return EvalInstance(
        instance_id=instance_id,
        context=tuple(r for _, r in context),
        target=targets[0],
        scale=scale,
        source_dataset=first['source_dataset']
    )
