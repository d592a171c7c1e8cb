import json
import os
import tempfile
from os.path import exists, join
from unittest import TestCase

from click.testing import CliRunner

from ratingbench.corpus.io import load_dataset, save_dataset
from ratingbench.persistence.record_store import RecordStore
from ratingbench.runner.cli import EXIT_ERROR, EXIT_OK, EXIT_USAGE, main, run_cli

from tst.ratingbench.helpers import FIXTURES_DIR, make_dataset

CONFIG_TOML = '''
[experiment]
name = "exp"

[gateway]
mock_script = "mock.json"
max_parallel = 2

[gateway.retry]
initial_delay_s = 0
max_attempts = 2

[datasets.movies]
path = "data.jsonl"
domain = "movie"

[models.mock]
model_name = "mock-model"

[arms.rs2s]
dataset = "movies"
model = "mock"
n_runs = 2

[arms.cot]
dataset = "movies"
model = "mock"
strategy = "zero_shot_cot"
n_runs = 2

[baselines.avg]
dataset = "movies"
method = "user-average"
paired_with = "rs2s"

[baselines.mf]
dataset = "movies"
method = "mf"
d = 2
iterations = 3
'''


def write_experiment(directory, n_instances=4):
    """ A dataset, a mock script answering (n % 10) + 1 for instance iNN and a config using
    both. Returns the config path. """

    save_dataset(make_dataset(n_instances), join(directory, 'data.jsonl'))
    script = {'responses': {'i{:02d}'.format(i): '{{"Score": {}}}'.format(i % 10 + 1)
                            for i in range(n_instances)}}
    with open(join(directory, 'mock.json'), 'w') as f:
        json.dump(script, f)

    path = join(directory, 'experiment.toml')
    with open(path, 'w') as f:
        f.write(CONFIG_TOML)
    return path


class ExperimentCommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = write_experiment(self.tmp.name)
        self.experiment_dir = join(self.tmp.name, 'out', 'exp')

    def tearDown(self):
        self.tmp.cleanup()

    def _read(self, *parts):
        with open(join(self.experiment_dir, *parts), encoding='utf-8') as f:
            return f.read()

    def test_run_evaluate_report(self):
        assert run_cli(['run', '--config', self.config]) == EXIT_OK
        assert len(RecordStore(join(self.experiment_dir, 'rs2s')).load_records()) == 8
        assert len(RecordStore(join(self.experiment_dir, 'cot')).load_records()) == 8

        assert run_cli(['baseline', '--config', self.config]) == EXIT_OK
        assert exists(join(self.experiment_dir, 'mf', 'mf_model.txt'))

        assert run_cli(['evaluate', '--config', self.config]) == EXIT_OK
        report = self._read('report.md')
        for arm_id in ('avg', 'cot', 'mf', 'rs2s', 'avg@rs2s'):
            assert '| {} |'.format(arm_id) in report
        assert self._read('metrics.csv').startswith('arm,dataset,format,strategy,rho_mean')
        assert self._read('histograms.csv').startswith('arm,rating,count\n')
        assert self._read('rs2s', 'metrics.txt').startswith('arm: rs2s\n')

        # Evaluating unchanged records reproduces the files exactly.
        first = (report, self._read('metrics.csv'), self._read('histograms.csv'))
        assert run_cli(['evaluate', '--config', self.config]) == EXIT_OK
        assert (self._read('report.md'), self._read('metrics.csv'),
                self._read('histograms.csv')) == first

        output = join(self.tmp.name, 'table.csv')
        assert run_cli(['report', '--config', self.config, '--layout', 'csv',
                        '--output', output]) == EXIT_OK
        with open(output) as f:
            assert f.read() == self._read('metrics.csv')

    def test_run_resumes(self):
        runner = CliRunner(mix_stderr=False)
        runner.invoke(main, ['run', '--config', self.config, '--arm', 'rs2s'])

        result = runner.invoke(main, ['run', '--config', self.config, '--arm', 'rs2s'])

        assert result.exit_code == 0
        assert result.output == 'rs2s: 0 new records\n'

    def test_compare(self):
        run_cli(['run', '--config', self.config])

        runner = CliRunner(mix_stderr=False)
        result = runner.invoke(main, ['compare', '--config', self.config, '--a', 'rs2s',
                                      '--b', 'cot', '--metric', 'rmse'])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data['arm_a'] == 'rs2s'
        assert data['n_a'] == 2
        assert data['small_sample']

    def test_compare_needs_two_runs(self):
        run_cli(['run', '--config', self.config, '--arm', 'rs2s'])
        run_cli(['baseline', '--config', self.config, '--baseline', 'avg'])

        assert run_cli(['compare', '--config', self.config, '--a', 'rs2s', '--b', 'avg']) == \
            EXIT_ERROR

    def test_split_similarity(self):
        assert run_cli(['split-similarity', '--config', self.config,
                        '--dataset', 'movies']) == EXIT_OK

        directory = join(self.experiment_dir, 'similarity', 'movies')
        assert len(load_dataset(join(directory, 'similar.jsonl'))) == 2
        assert len(load_dataset(join(directory, 'dissimilar.jsonl'))) == 2
        with open(join(directory, 'similarity.csv')) as f:
            assert len(f.read().splitlines()) == 5

    def test_unknown_arm(self):
        assert run_cli(['run', '--config', self.config, '--arm', 'nope']) == EXIT_ERROR

    def test_evaluate_without_records(self):
        assert run_cli(['evaluate', '--config', self.config]) == EXIT_ERROR

    def test_usage_errors(self):
        assert run_cli(['run']) == EXIT_USAGE
        assert run_cli(['no-such-command']) == EXIT_USAGE
        assert run_cli(['compare', '--config', self.config, '--a', 'rs2s', '--b', 'cot',
                        '--metric', 'mae']) == EXIT_USAGE


class CorpusCommandTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.raw = join(self.tmp.name, 'raw.jsonl')
        with open(self.raw, 'w') as f:
            for u in range(3):
                for i in range(4):
                    f.write(json.dumps({'user_id': 'u{}'.format(u),
                                        'item_id': 'm{}-{}'.format(u, i),
                                        'review': 'Review {} of user {}.'.format(i, u),
                                        'rating': 1 + (u + i) % 10,
                                        'item': {'plot': 'Plot {} {}.'.format(u, i)}}) + '\n')
        self.dataset = join(self.tmp.name, 'dataset.jsonl')

    def tearDown(self):
        self.tmp.cleanup()

    def test_build_and_derive(self):
        assert run_cli(['build-corpus', '--corpus', 'movies', '--input', self.raw,
                        '--output', self.dataset, '--k', '2', '--n', '10']) == EXIT_OK
        dataset = load_dataset(self.dataset)
        assert len(dataset) == 3
        assert all(i.k == 2 and i.source_dataset == 'movies' for i in dataset)

        shuffled = join(self.tmp.name, 'shuffled.jsonl')
        assert run_cli(['variant', 'shuffle', '--dataset', self.dataset,
                        '--output', shuffled, '--seed', '4']) == EXIT_OK
        assert [i.instance_id for i in load_dataset(shuffled)] == \
            [i.instance_id for i in dataset]

        reduced = join(self.tmp.name, 'reduced.jsonl')
        assert run_cli(['variant', 'reduce-k', '--dataset', self.dataset,
                        '--output', reduced, '--k', '1']) == EXIT_OK
        assert all(i.k == 1 for i in load_dataset(reduced))

    def test_stats(self):
        run_cli(['build-corpus', '--corpus', 'movies', '--input', self.raw,
                 '--output', self.dataset, '--k', '2'])
        output = join(self.tmp.name, 'stats.json')

        runner = CliRunner(mix_stderr=False)
        result = runner.invoke(main, ['stats', '--dataset', self.dataset, '--corpus', 'movies',
                                      '--records', self.raw, '--output', output])

        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data['n_instances'] == 3
        assert data['avg_total_reviews_per_user'] == 4.0
        with open(output) as f:
            assert json.load(f) == data

    def test_variant_needs_dataset(self):
        assert run_cli(['variant', 'shuffle', '--output', self.dataset]) == EXIT_USAGE

    def test_unknown_corpus(self):
        assert run_cli(['build-corpus', '--corpus', 'podcasts', '--input', self.raw,
                        '--output', self.dataset]) == EXIT_ERROR

    def test_missing_input(self):
        missing = join(self.tmp.name, 'missing.jsonl')

        assert run_cli(['build-corpus', '--corpus', 'movies', '--input', missing,
                        '--output', self.dataset]) == EXIT_USAGE
        assert not os.path.exists(self.dataset)


RS2RS_ARM_TOML = '''
[arms.rs2rs-mock]
dataset = "movies"
model = "mock"
output = "review_and_score"
n_runs = 2
'''

# Fields that hash the request or the arm settings; checked for consistency instead of value.
HASHED_FIELDS = ('config_fingerprint', 'raw_ref', 'prompt_fingerprint')


class RecordFileTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = write_experiment(self.tmp.name)
        with open(self.config, 'a') as f:
            f.write(RS2RS_ARM_TOML)

        responses = {'i{:02d}'.format(i): json.dumps({'Review': 'Review written for i{:02d}.'
                                                      .format(i), 'Score': i + 1})
                     for i in range(4)}
        responses['i01#1'] = 'Sorry, I cannot rate this one.'
        responses['i02#1'] = '```json\n{"Review": "Fenced.", "Score": "9"}\n```'
        with open(join(self.tmp.name, 'mock.json'), 'w') as f:
            json.dump({'responses': responses}, f)

    def tearDown(self):
        self.tmp.cleanup()

    def test_review_arm_matches_golden_records(self):
        assert run_cli(['run', '--config', self.config, '--arm', 'rs2rs-mock']) == EXIT_OK

        with open(join(self.tmp.name, 'out', 'exp', 'rs2rs-mock', 'records.jsonl')) as f:
            rows = [json.loads(line) for line in f.read().splitlines()]
        with open(join(FIXTURES_DIR, 'records', 'rs2rs_mock.jsonl')) as f:
            golden = [json.loads(line) for line in f.read().splitlines()]

        hashed = [{name: row.pop(name) for name in HASHED_FIELDS} for row in rows]
        assert rows == golden

        assert len({h['config_fingerprint'] for h in hashed}) == 1
        for h in hashed:
            for value in h.values():
                assert len(value) == 64
                assert set(value) <= set('0123456789abcdef')

        # Without seed forwarding both runs send the same request for an instance.
        by_instance = dict()
        for row, h in zip(rows, hashed):
            by_instance.setdefault(row['instance_id'], set()).add(
                (h['raw_ref'], h['prompt_fingerprint']))
        assert all(len(pairs) == 1 for pairs in by_instance.values())
        assert len(by_instance) == 4
