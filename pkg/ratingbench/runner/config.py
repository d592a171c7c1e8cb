""" Experiment configuration, read from a TOML file.

    [experiment]            name, out_dir, seed
    [gateway]               endpoint_url, auth_env_var, max_parallel, timeout_s, mock_script
    [gateway.retry]         initial_delay_s, factor, max_delay_s, max_attempts
    [datasets.<name>]       path, domain
    [models.<name>]         model_name, closed, temperature, max_tokens, forward_seed, extra_params
    [arms.<arm_id>]         dataset, model, profile, with_description, output, strategy,
                            n_runs, seeds, description_model
    [baselines.<id>]        dataset, method (user-average | mf), paired_with, d, lam, iterations
    [metrics]               alpha
    [embedding]             model, pooling

Relative paths are resolved against the directory of the config file. """

from os.path import abspath, dirname, join

import tomli

from ratingbench.baselines.mf import MFHyper
from ratingbench.baselines.records import MATRIX_FACTORIZATION, USER_AVERAGE
from ratingbench.errors import ConfigError
from ratingbench.evalmetrics.aggregate import ReportLabels
from ratingbench.evalmetrics.stats import ALPHA
from ratingbench.gateway.backends import HttpBackend, MockBackend
from ratingbench.gateway.client import ChatGateway
from ratingbench.gateway.config import DEFAULT_AUTH_ENV_VAR, ModelConfig, RetryPolicy, RunPlan
from ratingbench.gateway.experiment import Pipeline
from ratingbench.profile.profile import ProfileFormat
from ratingbench.promptgen.config import DOMAIN_CONFIG
from ratingbench.promptgen.render import OutputFormat, Strategy
from ratingbench.similarity.score import DEFAULT_EMBEDDING_MODEL, Pooling

_EXPERIMENT = 'experiment'
_GATEWAY = 'gateway'
_RETRY = 'retry'
_DATASETS = 'datasets'
_MODELS = 'models'
_ARMS = 'arms'
_BASELINES = 'baselines'
_METRICS = 'metrics'
_EMBEDDING = 'embedding'

DESCRIPTIONS_DB = 'descriptions.sqlite'


class GatewaySection:
    """ Where requests go and how they are retried and parallelized. """

    def __init__(self, data, base_dir):
        self.endpoint_url = data.get('endpoint_url', 'https://api.openai.com/v1')
        self.auth_env_var = data.get('auth_env_var', DEFAULT_AUTH_ENV_VAR)
        self.max_parallel = int(data.get('max_parallel', 4))
        self.timeout_s = float(data.get('timeout_s', 120.0))
        self.mock_script = data.get('mock_script')
        if self.mock_script:
            self.mock_script = join(base_dir, self.mock_script)
        self.retry = RetryPolicy(**data.get(_RETRY, {}))


class DatasetConfig:

    def __init__(self, name, data, base_dir):
        self.name = name
        self.path = join(base_dir, data['path'])
        self.domain = data.get('domain', 'movie')
        DOMAIN_CONFIG.words(self.domain)


class ModelSection:
    """ A model as named in the config; turned into a ModelConfig against the gateway section. """

    def __init__(self, name, data):
        self.name = name
        self.model_name = data.get('model_name', name)
        self.closed = bool(data.get('closed', False))
        self.temperature = float(data.get('temperature', 0.01))
        self.max_tokens = int(data.get('max_tokens', 768))
        self.forward_seed = bool(data.get('forward_seed', False))
        self.extra_params = dict(data.get('extra_params', {}))

    def model_config(self, gateway):
        return ModelConfig(
            model_name=self.model_name,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            endpoint_url=gateway.endpoint_url,
            auth_env_var=gateway.auth_env_var,
            extra_params=self.extra_params,
            timeout_s=gateway.timeout_s,
            forward_seed=self.forward_seed
        )


class ArmConfig:
    """ One cell of a results table: dataset x prompting format x strategy x model. """

    def __init__(self, arm_id, data):
        self.arm_id = arm_id
        self.dataset = data['dataset']
        self.model = data['model']
        self.profile_format = ProfileFormat(data.get('profile', 'review_score'),
                                            bool(data.get('with_description', False)))
        self.output_format = OutputFormat(data.get('output', 'score_only'))
        self.strategy = Strategy(data.get('strategy', 'plain'))
        self.n_runs = data.get('n_runs')
        self.seeds = data.get('seeds')
        self.description_model = data.get('description_model')

        if self.profile_format.with_description and self.description_model is None:
            self.description_model = self.model

    @property
    def labels(self):
        return ReportLabels(dataset=self.dataset, format='{}->{}'.format(
            self.profile_format.label, self.output_format.value), strategy=self.strategy.value)


class BaselineConfig:

    def __init__(self, baseline_id, data):
        self.baseline_id = baseline_id
        self.dataset = data['dataset']
        self.method = data.get('method', USER_AVERAGE)
        self.paired_with = data.get('paired_with')
        if self.method not in (USER_AVERAGE, MATRIX_FACTORIZATION):
            raise ConfigError('Baseline {}: unknown method "{}"'.format(baseline_id, self.method))
        self.hyper = MFHyper(d=int(data.get('d', 8)), lam=float(data.get('lam', 0.1)),
                             iterations=int(data.get('iterations', 20)),
                             seed=int(data.get('seed', 0)))

    @property
    def labels(self):
        return ReportLabels(dataset=self.dataset, format='baseline', strategy=self.method)


class ExperimentConfig:
    """ Top-level config of one experiment: its datasets, models, arms and baselines. """

    def __init__(self, config_path):
        try:
            with open(config_path, 'rb') as f:
                data = tomli.load(f)

            base_dir = dirname(abspath(config_path))
            experiment = data.get(_EXPERIMENT, {})
            self.name = experiment['name']
            self.out_dir = join(base_dir, experiment.get('out_dir', 'out'))
            self.seed = int(experiment.get('seed', 0))

            self.gateway = GatewaySection(data.get(_GATEWAY, {}), base_dir)
            self.datasets = {name: DatasetConfig(name, d, base_dir)
                             for name, d in data.get(_DATASETS, {}).items()}
            self.models = {name: ModelSection(name, m) for name, m in data.get(_MODELS, {}).items()}
            self.arms = {arm_id: ArmConfig(arm_id, a) for arm_id, a in data.get(_ARMS, {}).items()}
            self.baselines = {bid: BaselineConfig(bid, b)
                              for bid, b in data.get(_BASELINES, {}).items()}
            self.alpha = float(data.get(_METRICS, {}).get('alpha', ALPHA))

            embedding = data.get(_EMBEDDING, {})
            self.embedding_model = embedding.get('model', DEFAULT_EMBEDDING_MODEL)
            self.pooling = Pooling(embedding.get('pooling', Pooling.MEAN.value))

            self._check_references()
            for arm_id in self.arms:
                self.pipeline(arm_id)

        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError('Could not load experiment config {}: {}'.format(config_path, e))

    def _check_references(self):
        for arm in self.arms.values():
            if arm.dataset not in self.datasets:
                raise ConfigError('Arm {} uses unknown dataset "{}"'.format(arm.arm_id, arm.dataset))
            for model in (arm.model, arm.description_model):
                if model is not None and model not in self.models:
                    raise ConfigError('Arm {} uses unknown model "{}"'.format(arm.arm_id, model))

        for baseline in self.baselines.values():
            if baseline.dataset not in self.datasets:
                raise ConfigError('Baseline {} uses unknown dataset "{}"'.format(
                    baseline.baseline_id, baseline.dataset))
            if baseline.paired_with is not None and baseline.paired_with not in self.arms:
                raise ConfigError('Baseline {} is paired with unknown arm "{}"'.format(
                    baseline.baseline_id, baseline.paired_with))

        clash = set(self.arms) & set(self.baselines)
        if clash:
            raise ConfigError('Arm and baseline ids must differ: {}'.format(sorted(clash)))

    def arm(self, arm_id):
        try:
            return self.arms[arm_id]
        except KeyError:
            raise ConfigError('Unknown arm "{}"; known arms: {}'.format(
                arm_id, ', '.join(sorted(self.arms))))

    def baseline(self, baseline_id):
        try:
            return self.baselines[baseline_id]
        except KeyError:
            raise ConfigError('Unknown baseline "{}"; known baselines: {}'.format(
                baseline_id, ', '.join(sorted(self.baselines))))

    def model_config(self, model_name):
        return self.models[model_name].model_config(self.gateway)

    def embedding_config(self):
        return ModelConfig(model_name=self.embedding_model, endpoint_url=self.gateway.endpoint_url,
                           auth_env_var=self.gateway.auth_env_var, timeout_s=self.gateway.timeout_s)

    def pipeline(self, arm_id):
        arm = self.arm(arm_id)
        description_model = None
        if arm.description_model is not None:
            description_model = self.models[arm.description_model].model_name
        return Pipeline(
            arm_id=arm.arm_id,
            profile_format=arm.profile_format,
            output_format=arm.output_format,
            strategy=arm.strategy,
            domain_label=self.datasets[arm.dataset].domain,
            description_model=description_model
        )

    def run_plan(self, arm_id):
        arm = self.arm(arm_id)
        seeds = arm.seeds
        if seeds is None:
            n_runs = arm.n_runs or RunPlan.for_model(self.models[arm.model].closed).n_runs
            seeds = [self.seed + n for n in range(n_runs)]
        return RunPlan.for_model(self.models[arm.model].closed, n_runs=arm.n_runs or len(seeds),
                                 seeds=seeds, max_parallel=self.gateway.max_parallel)

    def make_gateway(self):
        if self.gateway.mock_script:
            backend = MockBackend.from_file(self.gateway.mock_script)
        else:
            backend = HttpBackend()
        return ChatGateway(backend=backend, retry_policy=self.gateway.retry)

    @property
    def experiment_dir(self):
        return join(self.out_dir, self.name)

    def arm_dir(self, arm_id):
        return join(self.experiment_dir, arm_id)

    @property
    def descriptions_path(self):
        return join(self.experiment_dir, DESCRIPTIONS_DB)
