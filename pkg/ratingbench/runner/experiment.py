""" Config-driven steps behind the CLI subcommands. Everything an experiment writes lives under
out/<experiment>/:

    <arm>/records.jsonl, <arm>/failures.jsonl, <arm>/raw/outputs.jsonl
    <arm>/metrics.csv, <arm>/metrics.txt
    report.md, metrics.csv, histograms.csv
    descriptions.sqlite
    similarity/<dataset>/similarity.csv, similar.jsonl, dissimilar.jsonl """

import os
from logging import getLogger, INFO
from os.path import exists, join

from ratingbench.baselines.average import user_average
from ratingbench.baselines.mf import save_mf, train_mf
from ratingbench.baselines.records import (
    MATRIX_FACTORIZATION,
    baseline_fingerprint,
    baseline_records,
    mf_predictor,
    training_triples
)
from ratingbench.corpus.io import load_dataset, save_dataset
from ratingbench.errors import RatingBenchError
from ratingbench.evalmetrics.aggregate import ReportLabels, aggregate, compare, restrict_to_parsed
from ratingbench.gateway.experiment import run_experiment
from ratingbench.persistence.description_manager import DescriptionCache
from ratingbench.persistence.record_store import RECORDS_FILE, RecordStore
from ratingbench.profile.descriptions import ensure_descriptions
from ratingbench.runner.report import (
    ReportLayout,
    emit_report,
    render_csv,
    render_flat_text,
    write_text
)
from ratingbench.similarity.score import (
    embed_dataset,
    score_dataset,
    split_by_similarity,
    write_similarity_csv
)

_log = getLogger(__name__)
_log.setLevel(INFO)

METRICS_CSV = 'metrics.csv'
METRICS_TXT = 'metrics.txt'
REPORT_MD = 'report.md'
HISTOGRAMS_CSV = 'histograms.csv'
MF_MODEL_FILE = 'mf_model.txt'
PAIRED_TEMPLATE = '{baseline}@{arm}'


def _dataset(config, name):
    return load_dataset(config.datasets[name].path)


def synthesize_descriptions(config, arm_id, gateway=None):
    """ Makes sure every instance of the arm's dataset has a cached self-description from the
    arm's description model. Returns instance_id -> text. """

    arm = config.arm(arm_id)
    if arm.description_model is None:
        raise RatingBenchError('Arm {} does not use self-descriptions.'.format(arm_id))

    gateway = gateway or config.make_gateway()
    os.makedirs(config.experiment_dir, exist_ok=True)
    cache = DescriptionCache(config.descriptions_path)
    try:
        return ensure_descriptions(
            _dataset(config, arm.dataset), gateway, config.model_config(arm.description_model),
            cache, max_parallel=config.gateway.max_parallel,
            domain_label=config.datasets[arm.dataset].domain)
    finally:
        cache.close()


def run_arm(config, arm_id, gateway=None):
    """ Runs (or resumes) one arm. Returns the records written by this call. """

    arm = config.arm(arm_id)
    gateway = gateway or config.make_gateway()

    descriptions = None
    if arm.profile_format.with_description:
        descriptions = synthesize_descriptions(config, arm_id, gateway)

    return run_experiment(
        dataset=_dataset(config, arm.dataset),
        pipeline=config.pipeline(arm_id),
        config=config.model_config(arm.model),
        plan=config.run_plan(arm_id),
        store=RecordStore(config.arm_dir(arm_id)),
        gateway=gateway,
        descriptions=descriptions
    )


def _baseline_settings(config, baseline_id):
    """ The fingerprint a baseline's records are stored under: its method and, for MF, its
    hyperparameters. """

    baseline = config.baseline(baseline_id)
    detail = repr(baseline.hyper) if baseline.method == MATRIX_FACTORIZATION else ''
    return baseline_fingerprint(baseline.method, detail)


def run_baseline(config, baseline_id):
    """ Predicts every instance the store does not already hold under the baseline's current
    settings and appends the records. Records of earlier settings stay where they are. Returns the
    records written by this call. """

    baseline = config.baseline(baseline_id)
    dataset = _dataset(config, baseline.dataset)
    directory = config.arm_dir(baseline_id)
    fingerprint = _baseline_settings(config, baseline_id)

    store = RecordStore(directory)
    done = store.completed_keys()
    todo = [i for i in dataset if (i.instance_id, 0, fingerprint) not in done]
    if not todo:
        _log.info('Baseline {}: all {} records already stored'.format(baseline_id, len(dataset)))
        return []

    if baseline.method == MATRIX_FACTORIZATION:
        model = train_mf(training_triples(dataset), baseline.hyper)
        save_mf(model, join(directory, MF_MODEL_FILE))
        predictor = mf_predictor(model)
    else:
        predictor = user_average

    records = baseline_records(todo, predictor, arm_id=baseline_id,
                               config_fingerprint=fingerprint)
    for record in records:
        store.append_record(record)

    _log.info('Baseline {}: stored {} new records ({} already stored)'.format(
        baseline_id, len(records), len(dataset) - len(records)))
    return records


def arm_records(config, arm_id):
    """ Stored records of an arm under its current configuration. """

    if not exists(join(config.arm_dir(arm_id), RECORDS_FILE)):
        return []

    if arm_id in config.arms:
        fingerprint = config.pipeline(arm_id).fingerprint(
            config.model_config(config.arm(arm_id).model))
    else:
        fingerprint = _baseline_settings(config, arm_id)

    records = RecordStore(config.arm_dir(arm_id)).load_records()
    return [r for r in records if r.config_fingerprint == fingerprint]


def collect_reports(config, arm_ids=None):
    """ MetricsReports of every arm and baseline with stored records, in id order, followed by
    the paired (baseline restricted to an arm's parsed records) reports. """

    ids = sorted(arm_ids) if arm_ids else sorted(list(config.arms) + list(config.baselines))

    reports = dict()
    records_by_id = dict()
    for item_id in ids:
        records = arm_records(config, item_id)
        if not records:
            _log.warning('No records stored for {}, skipping it'.format(item_id))
            continue
        labels = config.arms[item_id].labels if item_id in config.arms \
            else config.baseline(item_id).labels
        records_by_id[item_id] = records
        reports[item_id] = aggregate(records, arm_id=item_id, labels=labels)

    ordered = [reports[item_id] for item_id in ids if item_id in reports]

    for baseline_id in ids:
        baseline = config.baselines.get(baseline_id)
        if baseline is None or baseline.paired_with is None:
            continue
        llm_records = records_by_id.get(baseline.paired_with) or \
            arm_records(config, baseline.paired_with)
        if baseline_id not in records_by_id or not llm_records:
            continue
        paired = restrict_to_parsed(records_by_id[baseline_id], llm_records)
        if paired:
            paired_id = PAIRED_TEMPLATE.format(baseline=baseline_id, arm=baseline.paired_with)
            ordered.append(aggregate(paired, arm_id=paired_id, labels=ReportLabels(
                dataset=baseline.dataset, format='baseline-paired', strategy=baseline.method)))

    return ordered


def evaluate(config, arm_ids=None):
    """ Writes per-arm metrics files and the experiment-level report. Never touches records. """

    reports = collect_reports(config, arm_ids)
    if not reports:
        raise RatingBenchError('No records to evaluate in {}'.format(config.experiment_dir))

    for report in reports:
        directory = config.arm_dir(report.arm_id)
        os.makedirs(directory, exist_ok=True)
        write_text(join(directory, METRICS_CSV), render_csv([report]))
        write_text(join(directory, METRICS_TXT), render_flat_text(report))

    experiment_dir = config.experiment_dir
    emit_report(reports, ReportLayout.CSV, join(experiment_dir, METRICS_CSV))
    emit_report(reports, ReportLayout.MARKDOWN_TABLE, join(experiment_dir, REPORT_MD))
    emit_report(reports, ReportLayout.HISTOGRAM_DATA, join(experiment_dir, HISTOGRAMS_CSV))
    return reports


def compare_arms(config, arm_a, arm_b, metric='rho'):
    """ Welch's t-test between the per-run values of a metric in two arms. """

    reports = {r.arm_id: r for r in collect_reports(config, [arm_a, arm_b])}
    missing = [a for a in (arm_a, arm_b) if a not in reports]
    if missing:
        raise RatingBenchError('No records for {}'.format(', '.join(missing)))
    return compare(reports[arm_a], reports[arm_b], metric, config.alpha)


def split_similarity(config, dataset_name, gateway=None):
    """ Embeds the dataset's item descriptions, scores every instance and writes the Similar and
    Dissimilar halves as datasets of their own. Returns (similar, dissimilar). """

    dataset = _dataset(config, dataset_name)
    gateway = gateway or config.make_gateway()

    embeddings = embed_dataset(dataset, gateway, config.embedding_config())
    scores = score_dataset(dataset, embeddings, config.pooling)
    similar, dissimilar = split_by_similarity(dataset, scores)

    directory = join(config.experiment_dir, 'similarity', dataset_name)
    os.makedirs(directory, exist_ok=True)
    write_similarity_csv(join(directory, 'similarity.csv'), scores, similar, dissimilar)
    save_dataset(similar, join(directory, 'similar.jsonl'))
    save_dataset(dissimilar, join(directory, 'dissimilar.jsonl'))

    _log.info('Split {} into {} similar and {} dissimilar instances'.format(
        dataset_name, len(similar), len(dissimilar)))
    return similar, dissimilar
