""" Backends that actually answer chat-completion and embedding requests: an OpenAI-compatible HTTP
endpoint, or a scripted in-process mock for deterministic runs. Both take the same wire payloads
and raise the same errors, so the retrying client on top does not care which one it drives. """

import hashlib
import json
from collections import Counter
from logging import getLogger, INFO
from os import environ
from threading import Lock

import numpy as np
import requests

from ratingbench.errors import (
    GatewayConfigError,
    GatewayTransportError,
    TransientTransportError
)

_log = getLogger(__name__)
_log.setLevel(INFO)

TAG_HEADER = 'X-Request-Tag'
TAG_SEPARATOR = '#'

DEFAULT_EMBEDDING_DIM = 16


def request_fingerprint(payload):
    """ sha256 over the canonical JSON of a request payload. """

    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def raise_for_status(status, detail=''):
    """ 429 and 5xx are worth retrying; any other 4xx means the request itself is wrong. """

    if status == 429 or status >= 500:
        raise TransientTransportError('Endpoint answered {}: {}'.format(status, detail),
                                      status=status)
    if status >= 400:
        raise GatewayConfigError('Endpoint rejected the request with {}: {}'.format(
            status, detail), status=status)


class HttpBackend:
    """ POSTs to {endpoint_url}/chat/completions and {endpoint_url}/embeddings. """

    def __init__(self, session=None):
        self.session = session or requests.Session()

    def _headers(self, config, tag):
        headers = {'Content-Type': 'application/json'}
        api_key = environ.get(config.auth_env_var)
        if api_key:
            headers['Authorization'] = 'Bearer {}'.format(api_key)
        else:
            _log.debug('No API key in ${}, sending the request unauthenticated'.format(
                config.auth_env_var))
        if tag:
            headers[TAG_HEADER] = tag
        return headers

    def _post(self, path, payload, config, tag=None):
        url = '{}/{}'.format(config.endpoint_url.rstrip('/'), path)
        try:
            response = self.session.post(url, json=payload, headers=self._headers(config, tag),
                                         timeout=config.timeout_s)
        except (requests.Timeout, requests.ConnectionError) as e:
            raise TransientTransportError('Could not reach {}: {}'.format(url, e))

        raise_for_status(response.status_code, response.text[:200])

        try:
            return response.json()
        except ValueError as e:
            raise GatewayTransportError('Endpoint {} returned invalid JSON: {}'.format(url, e),
                                        status=response.status_code)

    def chat(self, payload, config, tag=None):
        data = self._post('chat/completions', payload, config, tag)
        try:
            return data['choices'][0]['message']['content'] or ''
        except (KeyError, IndexError, TypeError) as e:
            raise GatewayTransportError('Malformed chat completion response: {}'.format(e),
                                        status=200)

    def embed(self, payload, config):
        data = self._post('embeddings', payload, config)
        try:
            rows = sorted(data['data'], key=lambda row: row['index'])
            return [row['embedding'] for row in rows]
        except (KeyError, TypeError) as e:
            raise GatewayTransportError('Malformed embedding response: {}'.format(e), status=200)


class MockBackend:
    """ Answers from a script instead of a model.

    Script layout (JSON):

        {
          "responses": {
            "<request fingerprint> | <instance_id>#<run>[#<stage>] | <instance_id>":
                "canned text"  or  {"text": "canned text", "fail": [503, 429]}
          },
          "default": "text served when nothing matches" (optional),
          "embeddings": {"<text>": [3, 4]} (optional),
          "embedding_dim": 16 (optional)
        }

    A "fail" schedule lists statuses returned, in order, before the canned text is served. Texts
    with no scripted embedding get a deterministic vector derived from their hash. """

    def __init__(self, script=None):
        script = script or {}
        self.responses = {key: self._entry(value)
                          for key, value in script.get('responses', {}).items()}
        default = script.get('default')
        self.default = self._entry(default) if default is not None else None
        self.embeddings = {text: list(v) for text, v in script.get('embeddings', {}).items()}
        self.embedding_dim = int(script.get('embedding_dim', DEFAULT_EMBEDDING_DIM))

        self.call_count = 0
        self.embed_call_count = 0
        self._served = Counter()
        self._lock = Lock()

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as f:
                return cls(json.loads(f.read()))
        except (OSError, ValueError) as e:
            raise GatewayConfigError('Could not load mock script {}: {}'.format(path, e))

    @staticmethod
    def _entry(value):
        if isinstance(value, str):
            return {'text': value, 'fail': []}
        return {'text': value['text'], 'fail': list(value.get('fail', []))}

    def _lookup(self, fingerprint, tag):
        candidates = [fingerprint]
        if tag:
            candidates += [tag, tag.split(TAG_SEPARATOR)[0]]

        for key in candidates:
            if key in self.responses:
                return key, self.responses[key]
        if self.default is not None:
            return None, self.default
        return None, None

    def respond(self, fingerprint, tag=None):
        """ Returns (status, text) for one request; text is None unless status is 200. """

        with self._lock:
            self.call_count += 1
            key, entry = self._lookup(fingerprint, tag)
            if entry is None:
                raise GatewayTransportError('No scripted response for request {} (tag {})'.format(
                    fingerprint, tag))

            served = self._served[key]
            self._served[key] += 1

        if served < len(entry['fail']):
            return entry['fail'][served], None
        return 200, entry['text']

    def chat(self, payload, config, tag=None):
        status, text = self.respond(request_fingerprint(payload), tag)
        raise_for_status(status, 'scripted failure')
        return text

    def embedding_vectors(self, texts):
        with self._lock:
            self.embed_call_count += 1

        vectors = list()
        for text in texts:
            if text in self.embeddings:
                vectors.append(self.embeddings[text])
                continue
            seed = int.from_bytes(hashlib.sha256(text.encode('utf-8')).digest()[:8], 'big')
            vectors.append(np.random.default_rng(seed).standard_normal(self.embedding_dim).tolist())
        return vectors

    def embed(self, payload, config):
        return self.embedding_vectors(payload['input'])
