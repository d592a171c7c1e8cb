""" Command-line interface: ratingbench <subcommand> [options]. """

import json
import sys

import click

from ratingbench.corpus.config import CORPUS_CONFIG
from ratingbench.corpus.construct import (
    ConstructionParams,
    construct_instances,
    make_shuffle_variant,
    reduce_context
)
from ratingbench.corpus.ingest import load_records
from ratingbench.corpus.io import load_dataset, save_dataset
from ratingbench.corpus.stats import dataset_stats, user_history
from ratingbench.errors import RatingBenchError
from ratingbench.evalmetrics.aggregate import METRICS
from ratingbench.runner import experiment
from ratingbench.runner.config import ExperimentConfig
from ratingbench.runner.report import ReportLayout, emit_report


SHORT_CORPUS = 'books_short'

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

_config_option = click.option('--config', 'config_path', required=True,
                              type=click.Path(exists=True, dir_okay=False),
                              help='Experiment TOML file.')


def _echo_json(data):
    click.echo(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False))


def _build(corpus, input_path, output, k, n, seed, min_len, max_len, source_name):
    recipe = CORPUS_CONFIG.recipe(corpus)
    records = load_records(input_path, recipe.schema)
    params = ConstructionParams(
        scale=recipe.schema.scale,
        k=k,
        n=n,
        min_len=recipe.min_len if min_len is None else min_len,
        max_len=recipe.max_len if max_len is None else max_len,
        seed=seed,
        source_dataset=source_name or corpus
    )
    dataset = construct_instances(records, params)
    save_dataset(dataset, output)
    click.echo('Wrote {} instances to {}'.format(len(dataset), output))


@click.group()
def main():
    """ Likert rating-prediction benchmark for language models. """


@main.command('build-corpus')
@click.option('--corpus', required=True, help='Ingestion recipe, e.g. books or recipe.')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True))
@click.option('--output', required=True, type=click.Path())
@click.option('--k', default=5, show_default=True)
@click.option('--n', default=1000, show_default=True)
@click.option('--seed', default=0, show_default=True)
@click.option('--min-len', type=int, default=None, help='Overrides the recipe minimum.')
@click.option('--max-len', type=int, default=None, help='Overrides the recipe maximum.')
@click.option('--source-name', default=None, help='source_dataset label; defaults to --corpus.')
def build_corpus(corpus, input_path, output, k, n, seed, min_len, max_len, source_name):
    """ Samples k+1 reviews per user from a raw review corpus. """

    _build(corpus, input_path, output, k, n, seed, min_len, max_len, source_name)


@main.command('variant')
@click.argument('kind', type=click.Choice(['shuffle', 'short', 'reduce-k']))
@click.option('--dataset', type=click.Path(exists=True), help='Dataset to derive from.')
@click.option('--input', 'input_path', type=click.Path(exists=True),
              help='Raw corpus, for the short variant.')
@click.option('--corpus', default=SHORT_CORPUS, show_default=True,
              help='Recipe for the short variant.')
@click.option('--output', required=True, type=click.Path())
@click.option('--seed', default=0, show_default=True)
@click.option('--k', default=5, show_default=True, help='New k for reduce-k, k for short.')
@click.option('--n', default=1000, show_default=True)
def variant(kind, dataset, input_path, corpus, output, seed, k, n):
    """ Derives a difficult setting: shuffled review texts, short reviews or fewer examples. """

    if kind == 'short':
        if not input_path:
            raise click.UsageError('The short variant needs --input (the raw corpus).')
        _build(corpus, input_path, output, k, n, seed, None, None, corpus)
        return

    if not dataset:
        raise click.UsageError('The {} variant needs --dataset.'.format(kind))

    instances = load_dataset(dataset)
    if kind == 'shuffle':
        derived = make_shuffle_variant(instances, seed)
    else:
        derived = reduce_context(instances, k)
    save_dataset(derived, output)
    click.echo('Wrote {} {} instances to {}'.format(len(derived), kind, output))


@main.command('stats')
@click.option('--dataset', required=True, type=click.Path(exists=True))
@click.option('--corpus', default=None, help='Recipe of --records, for full-history stats.')
@click.option('--records', 'records_path', default=None, type=click.Path(exists=True))
@click.option('--output', default=None, type=click.Path())
def stats(dataset, corpus, records_path, output):
    """ Prints (and optionally writes) dataset statistics. """

    history = None
    if records_path:
        if not corpus:
            raise click.UsageError('--records needs --corpus to know how to read it.')
        history = user_history(load_records(records_path, CORPUS_CONFIG.recipe(corpus).schema))

    result = dataset_stats(load_dataset(dataset), history).to_json()
    _echo_json(result)
    if output:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(json.dumps(result, indent=2, sort_keys=True) + '\n')


@main.command('synthesize-descriptions')
@_config_option
@click.option('--arm', 'arm_id', required=True)
def synthesize_descriptions(config_path, arm_id):
    """ Generates and caches the self-descriptions an arm needs. """

    descriptions = experiment.synthesize_descriptions(ExperimentConfig(config_path), arm_id)
    click.echo('{} self-descriptions available'.format(len(descriptions)))


@main.command('run')
@_config_option
@click.option('--arm', 'arm_ids', multiple=True, help='Arm to run; all arms when omitted.')
def run(config_path, arm_ids):
    """ Runs or resumes experiment arms. """

    config = ExperimentConfig(config_path)
    gateway = config.make_gateway()
    for arm_id in arm_ids or sorted(config.arms):
        written = experiment.run_arm(config, arm_id, gateway)
        click.echo('{}: {} new records'.format(arm_id, len(written)))


@main.command('baseline')
@_config_option
@click.option('--baseline', 'baseline_ids', multiple=True,
              help='Baseline to run; all baselines when omitted.')
def baseline(config_path, baseline_ids):
    """ Predicts with User Average or Matrix Factorization. """

    config = ExperimentConfig(config_path)
    for baseline_id in baseline_ids or sorted(config.baselines):
        records = experiment.run_baseline(config, baseline_id)
        click.echo('{}: {} new records'.format(baseline_id, len(records)))


@main.command('evaluate')
@_config_option
@click.option('--arm', 'arm_ids', multiple=True)
def evaluate(config_path, arm_ids):
    """ Computes metrics from stored records and writes the reports. """

    reports = experiment.evaluate(ExperimentConfig(config_path), list(arm_ids) or None)
    click.echo(emit_report(reports, ReportLayout.MARKDOWN_TABLE), nl=False)


@main.command('compare')
@_config_option
@click.option('--a', 'arm_a', required=True)
@click.option('--b', 'arm_b', required=True)
@click.option('--metric', default='rho', show_default=True, type=click.Choice(METRICS))
def compare(config_path, arm_a, arm_b, metric):
    """ Welch's t-test between two arms on the per-run values of a metric. """

    comparison = experiment.compare_arms(ExperimentConfig(config_path), arm_a, arm_b, metric)
    _echo_json(comparison.to_json())
    if comparison.small_sample:
        click.echo('Note: only {} vs {} runs; treat the p-value with care.'.format(
            comparison.n_a, comparison.n_b), err=True)


@main.command('split-similarity')
@_config_option
@click.option('--dataset', 'dataset_name', required=True, help='Dataset name from the config.')
def split_similarity(config_path, dataset_name):
    """ Splits a dataset into Similar and Dissimilar halves by embedding similarity. """

    similar, dissimilar = experiment.split_similarity(ExperimentConfig(config_path), dataset_name)
    click.echo('similar: {}, dissimilar: {}'.format(len(similar), len(dissimilar)))


@main.command('report')
@_config_option
@click.option('--layout', default=ReportLayout.MARKDOWN_TABLE.value, show_default=True,
              type=click.Choice([layout.value for layout in ReportLayout]))
@click.option('--output', default=None, type=click.Path())
def report(config_path, layout, output):
    """ Prints one report layout for every arm with records. """

    reports = experiment.collect_reports(ExperimentConfig(config_path))
    text = emit_report(reports, layout, output)
    if output is None:
        click.echo(text, nl=False)


@main.command('serve-mock')
@click.option('--script', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--host', default='127.0.0.1', show_default=True)
@click.option('--port', default=8000, show_default=True)
def serve_mock(script, host, port):
    """ Serves a mock script over the OpenAI-compatible HTTP protocol. """

    from ratingbench.api import install_backend
    from ratingbench.gateway.backends import MockBackend

    install_backend(MockBackend.from_file(script)).run(host=host, port=port)


def run_cli(argv=None):
    """ Runs one subcommand and returns its exit status: 0 on success, 2 on usage errors, 1 on
    any other error. """

    try:
        main.main(args=argv, prog_name='ratingbench', standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        click.echo('Aborted.', err=True)
        return EXIT_ERROR
    except (RatingBenchError, OSError) as e:
        click.echo('Error: {}'.format(e), err=True)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(run_cli())
