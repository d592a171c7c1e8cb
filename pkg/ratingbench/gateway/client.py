""" The retrying chat-completion and embedding client every model call goes through. """

import time
from dataclasses import dataclass
from logging import getLogger, INFO

import backoff
import numpy as np

from ratingbench.errors import GatewayError, GatewayTransportError, TransientTransportError
from ratingbench.gateway.backends import HttpBackend, request_fingerprint
from ratingbench.gateway.config import RetryPolicy
from ratingbench.promptgen.render import ROLE_ASSISTANT_PREFIX

_log = getLogger(__name__)
_log.setLevel(INFO)

# The assistant-prefix message is sent as a regular assistant turn for the model to continue.
_WIRE_ROLES = {ROLE_ASSISTANT_PREFIX: 'assistant'}


@dataclass(frozen=True)
class RawOutput:
    text: str
    request_fingerprint: str
    latency_ms: int
    attempt_count: int

    def to_json(self):
        return {
            'text': self.text,
            'request_fingerprint': self.request_fingerprint,
            'latency_ms': self.latency_ms,
            'attempt_count': self.attempt_count
        }


def build_chat_payload(prompt, config, seed=None):
    payload = {
        'model': config.model_name,
        'messages': [{'role': _WIRE_ROLES.get(m.role, m.role), 'content': m.content}
                     for m in prompt.messages],
        'temperature': config.temperature,
        'max_tokens': config.max_tokens
    }
    payload.update(config.extra_params)
    if config.forward_seed and seed is not None:
        payload['seed'] = seed
    return payload


class ChatGateway:
    """ Safe for concurrent use: all state lives in the backend, which serializes what it must. """

    def __init__(self, backend=None, retry_policy=None, embed_batch_size=64):
        self.backend = backend or HttpBackend()
        self.retry_policy = retry_policy or RetryPolicy()
        self.embed_batch_size = embed_batch_size

    def _with_retries(self, send, description):
        """ Calls send until it stops raising TransientTransportError or the policy runs out.
        Returns (result, attempts). """

        policy = self.retry_policy
        attempts = [0]

        def log_backoff(details):
            _log.warning('{} failed (attempt {}), retrying in {:.1f}s'.format(
                description, details['tries'], details['wait']))

        @backoff.on_exception(backoff.expo,
                              TransientTransportError,
                              max_tries=policy.max_attempts,
                              on_backoff=log_backoff,
                              jitter=None,
                              base=policy.factor,
                              factor=policy.initial_delay_s,
                              max_value=policy.max_delay_s)
        def attempt():
            attempts[0] += 1
            return send()

        try:
            return attempt(), attempts[0]
        except TransientTransportError as e:
            raise GatewayTransportError('{} failed after {} attempts: {}'.format(
                description, attempts[0], e), status=e.status, attempts=attempts[0])

    def complete(self, prompt, config, tag=None, seed=None):
        """ Sends one chat-completion request and returns the first choice's text. """

        payload = build_chat_payload(prompt, config, seed)
        fingerprint = request_fingerprint(payload)
        description = 'Chat request {}'.format(tag or fingerprint[:12])

        started = time.monotonic()
        text, attempts = self._with_retries(
            lambda: self.backend.chat(payload, config, tag), description)
        latency_ms = int(round((time.monotonic() - started) * 1000))

        _log.debug('{} answered in {} ms after {} attempt(s)'.format(
            description, latency_ms, attempts))

        return RawOutput(text=text, request_fingerprint=fingerprint, latency_ms=latency_ms,
                         attempt_count=attempts)

    def embed(self, texts, config):
        """ Embeds texts in batches; every returned vector is L2-normalized. """

        texts = list(texts)
        if not texts:
            raise GatewayError('Cannot embed an empty list of texts.')

        vectors = list()
        dimension = None
        for start in range(0, len(texts), self.embed_batch_size):
            batch = texts[start:start + self.embed_batch_size]
            payload = {'model': config.model_name, 'input': batch}
            rows, _ = self._with_retries(lambda: self.backend.embed(payload, config),
                                         'Embedding batch at {}'.format(start))

            if len(rows) != len(batch):
                raise GatewayError('Asked for {} embeddings, got {}'.format(len(batch), len(rows)))

            for text, row in zip(batch, rows):
                vector = np.asarray(row, dtype=float)
                if dimension is None:
                    dimension = vector.shape[0]
                if vector.ndim != 1 or vector.shape[0] != dimension:
                    raise GatewayError('Embedding dimension mismatch: expected {}, got {}'.format(
                        dimension, vector.shape))

                norm = np.linalg.norm(vector)
                if norm == 0:
                    raise GatewayError('Zero embedding vector returned for {!r}'.format(text[:50]))
                vectors.append(vector / norm)

        return vectors
