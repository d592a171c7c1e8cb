""" Ingestion of line-delimited review corpora into ReviewRecords. """

import json
from logging import getLogger, INFO

from marshmallow import EXCLUDE, Schema, ValidationError, fields, validate

from ratingbench.corpus.models import ReviewRecord
from ratingbench.errors import CorpusError, UnusableItemError

_log = getLogger(__name__)
_log.setLevel(INFO)

ITEM_FIELD_SEPARATOR = '\n\n'


class LoadedRecords(list):
    """ The records parsed from a source file, in file order, plus an account of the lines that
    had to be skipped. """

    def __init__(self, *args):
        super().__init__(*args)
        self.skip_reasons = list()

    @property
    def skipped(self):
        return len(self.skip_reasons)

    def skip(self, line_no, reason):
        self.skip_reasons.append((line_no, str(reason)))


class _Identifier(fields.Field):
    """ Opaque identifier. Integer ids from numeric crawls are accepted and kept as text. """

    default_error_messages = {'invalid': 'Not a valid identifier.'}

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise self.make_error('invalid')
        value = str(value)
        if not value:
            raise self.make_error('invalid')
        return value


class _WholeNumber(fields.Field):
    """ Integer field that also takes floats with no fractional part, e.g. 5.0 ratings. """

    default_error_messages = {'invalid': 'Not a whole number.'}

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, bool):
            raise self.make_error('invalid')
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise self.make_error('invalid')


def _non_blank(value):
    if value is None or not value.strip():
        raise ValidationError('Review text is blank.')


def _line_schema(schema):
    """ Builds the marshmallow schema validating one source line under the given SourceSchema. """

    names = schema.source_fields
    scale = schema.scale

    if schema.score_only:
        review = fields.String(load_default='', allow_none=True, data_key=names['review'])
    else:
        review = fields.String(required=True, data_key=names['review'], validate=_non_blank)

    field_map = {
        'user_id': _Identifier(required=True, data_key=names['user_id']),
        'item_id': _Identifier(required=True, data_key=names['item_id']),
        'item': fields.Dict(keys=fields.String(), required=True, data_key=names['item']),
        'review': review,
        'rating': _WholeNumber(required=True, data_key=names['rating'],
                               validate=validate.Range(min=scale.y_min, max=scale.y_max)),
        'timestamp': _WholeNumber(load_default=None, allow_none=True,
                                  data_key=names['timestamp'])
    }

    return Schema.from_dict(field_map, name='ReviewLineSchema')(unknown=EXCLUDE)


def _field_text(value):
    if value is None:
        return ''
    if isinstance(value, (list, tuple)):
        return '\n'.join(str(v) for v in value if v is not None and str(v).strip())
    value = str(value)
    return value if value.strip() else ''


def build_item_description(raw_item, recipe):
    """ Concatenates the recipe's fields present in raw_item, in recipe order, separated by a
    blank line. List-valued fields (features, steps) are joined one entry per line. """

    parts = [_field_text(raw_item.get(name)) for name in recipe]
    parts = [p for p in parts if p]

    if not parts:
        raise UnusableItemError('None of the item fields ({}) are present'.format(
            ', '.join(recipe)))

    return ITEM_FIELD_SEPARATOR.join(parts)


def load_records(path, schema):
    """ Reads every parseable record from a line-delimited source file. Lines that fail to decode,
    fail schema validation, lack a review (unless the corpus is score-only), carry an out-of-scale
    rating or describe an unusable item are skipped and counted in the returned LoadedRecords. """

    line_schema = _line_schema(schema)
    records = LoadedRecords()

    try:
        with open(path, encoding='utf-8') as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue

                try:
                    data = line_schema.load(json.loads(line))
                    description = build_item_description(data['item'], schema.item_fields)
                except (ValueError, ValidationError, CorpusError) as e:
                    _log.debug('Skipping line {} of {}: {}'.format(line_no, path, e))
                    records.skip(line_no, e)
                    continue

                records.append(ReviewRecord(
                    user_id=data['user_id'],
                    item_id=data['item_id'],
                    item_description=description,
                    review_text=data['review'] or '',
                    rating=data['rating'],
                    timestamp=data['timestamp']
                ))

    except (OSError, UnicodeDecodeError) as e:
        raise CorpusError('Could not read records from {}: {}'.format(path, e))

    _log.info('Loaded {} records from {} ({} lines skipped).'.format(
        len(records), path, records.skipped))

    return records
