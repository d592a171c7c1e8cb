""" Flask app serving the scripted mock backend over the OpenAI-compatible wire protocol, so the
HTTP client path can be exercised without a real model. """

from flask import Flask

from ratingbench.gateway.backends import MockBackend

MOCK_BACKEND = 'MOCK_BACKEND'

app = Flask(__name__)

# An empty script answers nothing; serve-mock installs the real one.
app.config[MOCK_BACKEND] = MockBackend()


def install_backend(backend):
    app.config[MOCK_BACKEND] = backend
    return app


from ratingbench.api.routes import *
