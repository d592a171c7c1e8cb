""" Exception types raised across the benchmark harness. """


class RatingBenchError(RuntimeError):
    """ Base class for every error the harness raises on purpose. """


class ConfigError(RatingBenchError):
    """ An experiment or packaged config file could not be loaded or is inconsistent. """


class CorpusError(RatingBenchError):
    """ Raw corpora could not be read or no dataset could be built from them. """


class UnusableItemError(CorpusError):
    """ None of the fields of an item description recipe are present in the raw item. """


class ProfileError(RatingBenchError):
    """ A user profile cannot be assembled for the requested format. """


class PromptError(RatingBenchError):
    """ A prompt cannot be rendered from the given inputs. """


class GatewayError(RatingBenchError):
    """ Base class for chat/embedding endpoint failures. """


class GatewayTransportError(GatewayError):
    """ The endpoint could not be reached, or kept failing until retries were exhausted. """

    def __init__(self, message, status=None, attempts=1):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class GatewayConfigError(GatewayError):
    """ The endpoint rejected the request in a way retrying will not fix (4xx other than 429). """

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class BaselineError(RatingBenchError):
    """ A classical baseline cannot be trained or applied. """


class MetricsError(RatingBenchError):
    """ Evaluation statistics cannot be computed from the given inputs. """


class SimilarityError(RatingBenchError):
    """ Similarity scores cannot be computed from the given vectors. """


class TransientTransportError(GatewayTransportError):
    """ One attempt failed with a timeout, 429 or 5xx; the request is worth sending again. """


class RecordStoreError(RatingBenchError):
    """ A record file is corrupt somewhere other than its last, possibly half-written, line. """
