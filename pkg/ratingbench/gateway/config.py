""" Settings for talking to a model endpoint: which model, how to sample, how to retry and how many
runs to make. """

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ratingbench.errors import ConfigError

DEFAULT_ENDPOINT = 'https://api.openai.com/v1'
DEFAULT_AUTH_ENV_VAR = 'OPENAI_API_KEY'
DEFAULT_MAX_TOKENS = 768
DEFAULT_TEMPERATURE = 0.01

OPEN_MODEL_RUNS = 6
CLOSED_MODEL_RUNS = 1


@dataclass(frozen=True)
class ModelConfig:
    model_name: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    endpoint_url: str = DEFAULT_ENDPOINT
    auth_env_var: str = DEFAULT_AUTH_ENV_VAR
    extra_params: Dict[str, object] = field(default_factory=dict)
    timeout_s: float = 120.0
    forward_seed: bool = False

    def __post_init__(self):
        if not self.model_name:
            raise ConfigError('A model config needs a model name.')
        if isinstance(self.max_tokens, bool) or not isinstance(self.max_tokens, int) \
                or self.max_tokens < 1:
            raise ConfigError('max_tokens must be a positive integer, got {!r}'.format(
                self.max_tokens))
        if not math.isfinite(self.temperature) or self.temperature < 0:
            raise ConfigError('temperature must be finite and >= 0, got {!r}'.format(
                self.temperature))

    def to_json(self):
        """ The sampling-relevant part of the config. Endpoint, credentials and timeouts are left
        out so moving an arm to another host does not change its fingerprint. """

        return {
            'model_name': self.model_name,
            'temperature': self.temperature,
            'max_tokens': self.max_tokens,
            'extra_params': dict(sorted(self.extra_params.items())),
            'forward_seed': self.forward_seed
        }


@dataclass(frozen=True)
class RetryPolicy:
    """ Exponential backoff without jitter: initial_delay_s * factor ** n, capped at max_delay_s,
    for at most max_attempts attempts in total. """

    initial_delay_s: float = 1.0
    factor: float = 2.0
    max_delay_s: float = 60.0
    max_attempts: int = 6

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ConfigError('max_attempts must be at least 1, got {}'.format(self.max_attempts))
        if self.initial_delay_s < 0 or self.max_delay_s < 0 or self.factor < 1:
            raise ConfigError('Retry delays must be >= 0 and the factor >= 1.')


@dataclass(frozen=True)
class RunPlan:
    n_runs: int = OPEN_MODEL_RUNS
    seeds: Optional[List[int]] = None
    max_parallel: int = 4

    def __post_init__(self):
        if self.n_runs < 1:
            raise ConfigError('n_runs must be at least 1, got {}'.format(self.n_runs))
        if self.max_parallel < 1:
            raise ConfigError('max_parallel must be at least 1, got {}'.format(self.max_parallel))

        seeds = list(range(self.n_runs)) if self.seeds is None else list(self.seeds)
        if len(seeds) != self.n_runs:
            raise ConfigError('Expected {} seeds, got {}'.format(self.n_runs, len(seeds)))
        if len(set(seeds)) != len(seeds):
            raise ConfigError('Run seeds must be distinct, got {}'.format(seeds))
        object.__setattr__(self, 'seeds', seeds)

    @classmethod
    def for_model(cls, closed_model, n_runs=None, seeds=None, max_parallel=4):
        """ Closed (paid API) models run once, open models six times, unless overridden. """

        if n_runs is None:
            n_runs = CLOSED_MODEL_RUNS if closed_model else OPEN_MODEL_RUNS
        return cls(n_runs=n_runs, seeds=seeds, max_parallel=max_parallel)
