""" Append-only JSONL stores for prediction records, infrastructure failures and raw model outputs.

One arm directory holds:

    records.jsonl       one PredictionRecord per line
    failures.jsonl      transport failures, retried on resume, never counted as parse failures
    raw/outputs.jsonl   every raw model output with latency and attempt count """

import json
import os
from logging import getLogger, INFO
from os.path import exists, join
from threading import Lock

from marshmallow import Schema, fields, post_load, ValidationError

from ratingbench.errors import RecordStoreError
from ratingbench.evalmetrics.records import PredictionRecord
from ratingbench.extract.parser import ParseResult

_log = getLogger(__name__)
_log.setLevel(INFO)

RECORDS_FILE = 'records.jsonl'
FAILURES_FILE = 'failures.jsonl'
RAW_DIR = 'raw'
RAW_FILE = 'outputs.jsonl'


class PredictionRecordSchema(Schema):
    instance_id = fields.String(required=True)
    run_index = fields.Integer(required=True)
    arm_id = fields.String(required=True)
    config_fingerprint = fields.String(required=True)
    ground_truth = fields.Integer(required=True)
    context_scores = fields.List(fields.Integer(), required=True)
    parse = fields.Method('dump_parse', deserialize='load_parse', allow_none=True)
    prediction = fields.Float(allow_none=True)
    seed = fields.Integer(allow_none=True)
    raw_ref = fields.String(allow_none=True)
    prompt_fingerprint = fields.String(allow_none=True)

    def dump_parse(self, record):
        return record.parse.to_json() if record.parse is not None else None

    def load_parse(self, value):
        try:
            return ParseResult.from_json(value)
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError('Invalid parse result: {}'.format(e))

    @post_load
    def make_record(self, data, **kwargs):
        return PredictionRecord(**data)


_RECORD_SCHEMA = PredictionRecordSchema()


def record_to_json(record):
    return _RECORD_SCHEMA.dump(record)


def record_from_json(data):
    return _RECORD_SCHEMA.load(data)


class JsonlFile:
    """ A JSONL file written one flushed and fsynced line at a time. A final line cut short by a
    crash is ignored when reading and dropped before the next append. """

    def __init__(self, path):
        self.path = path
        self._lock = Lock()
        self._repaired = False

    def _drop_partial_tail(self):
        if not exists(self.path):
            return
        with open(self.path, 'rb+') as f:
            data = f.read()
            if not data or data.endswith(b'\n'):
                return
            keep = data.rfind(b'\n') + 1
            f.seek(keep)
            f.truncate()
            _log.warning('Dropped a truncated trailing line from {}'.format(self.path))

    def append(self, obj):
        line = json.dumps(obj, sort_keys=True, ensure_ascii=False) + '\n'
        with self._lock:
            if not self._repaired:
                self._drop_partial_tail()
                self._repaired = True
            with open(self.path, 'a', encoding='utf-8') as f:
                f.write(line)
                f.flush()
                os.fsync(f.fileno())

    def read(self):
        if not exists(self.path):
            return []

        with open(self.path, encoding='utf-8') as f:
            lines = f.read().split('\n')

        rows = list()
        last = len(lines) - 1
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except ValueError as e:
                if i == last:
                    _log.warning('Ignoring truncated last line of {}'.format(self.path))
                    continue
                raise RecordStoreError('Corrupt line {} in {}: {}'.format(i + 1, self.path, e))
        return rows


class RecordStore:
    """ The on-disk state of one experiment arm. run_experiment is its only writer. """

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(join(directory, RAW_DIR), exist_ok=True)
        self.records_file = JsonlFile(join(directory, RECORDS_FILE))
        self.failures_file = JsonlFile(join(directory, FAILURES_FILE))
        self.raw_file = JsonlFile(join(directory, RAW_DIR, RAW_FILE))

    def load_records(self):
        records = list()
        for row in self.records_file.read():
            try:
                records.append(record_from_json(row))
            except ValidationError as e:
                raise RecordStoreError('Invalid record in {}: {}'.format(
                    self.records_file.path, e.messages))
        return records

    def completed_keys(self):
        return {record.key for record in self.load_records()}

    def append_record(self, record):
        self.records_file.append(record_to_json(record))

    def append_failure(self, instance_id, run_index, config_fingerprint, error):
        self.failures_file.append({
            'instance_id': instance_id,
            'run_index': run_index,
            'config_fingerprint': config_fingerprint,
            'error': str(error),
            'status': getattr(error, 'status', None),
            'attempts': getattr(error, 'attempts', None)
        })

    def load_failures(self):
        return self.failures_file.read()

    def append_raw(self, tag, raw_output):
        row = raw_output.to_json()
        row['tag'] = tag
        self.raw_file.append(row)
