""" API routes of the mock endpoint. """

from logging import getLogger, INFO

from flask import current_app, request

from ratingbench.api import app, MOCK_BACKEND
from ratingbench.errors import GatewayTransportError
from ratingbench.gateway.backends import TAG_HEADER, request_fingerprint

_log = getLogger(__name__)
_log.setLevel(INFO)

MOCK_MODELS = ('mock',)


def _error(message, status):
    return {'error': {'message': message, 'code': status}}, status


def _backend():
    return current_app.config[MOCK_BACKEND]


@app.route('/v1/chat/completions', methods=['POST'])
def chat_completions():
    """ Answers a chat-completion request from the mock script.

    Ex: {
        "id": "mock-3f1c0a9be2d4",
        "object": "chat.completion",
        "model": "llama-3.1-8b",
        "choices": [
            {
                "index": 0,
                "message": {"role": "assistant", "content": "{\"Score\": 7}"},
                "finish_reason": "stop"
            }
        ]
    } """

    payload = request.get_json(silent=True)
    if not isinstance(payload, dict) or 'model' not in payload or \
            not isinstance(payload.get('messages'), list):
        return _error('Request body must be JSON with "model" and "messages".', 400)

    fingerprint = request_fingerprint(payload)
    tag = request.headers.get(TAG_HEADER)

    # Unscripted requests are a mistake in the script, not a transient condition.
    try:
        status, text = _backend().respond(fingerprint, tag)
    except GatewayTransportError as e:
        return _error(str(e), 404)

    if status != 200:
        _log.info('Scripted failure {} for tag {}'.format(status, tag))
        return _error('Scripted failure.', status)

    return {
        'id': 'mock-{}'.format(fingerprint[:12]),
        'object': 'chat.completion',
        'model': payload['model'],
        'choices': [{
            'index': 0,
            'message': {'role': 'assistant', 'content': text},
            'finish_reason': 'stop'
        }]
    }


@app.route('/v1/embeddings', methods=['POST'])
def embeddings():
    """ Returns one embedding per input text: the scripted vector or a hash-derived one. """

    payload = request.get_json(silent=True)
    if not isinstance(payload, dict) or 'input' not in payload:
        return _error('Request body must be JSON with "input".', 400)

    texts = payload['input']
    if isinstance(texts, str):
        texts = [texts]
    if not isinstance(texts, list) or not texts or not all(isinstance(t, str) for t in texts):
        return _error('"input" must be a string or a non-empty list of strings.', 400)

    vectors = _backend().embedding_vectors(texts)
    return {
        'object': 'list',
        'model': payload.get('model', MOCK_MODELS[0]),
        'data': [{'object': 'embedding', 'index': i, 'embedding': vector}
                 for i, vector in enumerate(vectors)]
    }


@app.route('/v1/models', methods=['GET'])
def models_list():
    return {
        'object': 'list',
        'data': [{'id': name, 'object': 'model'} for name in MOCK_MODELS]
    }
