""" Multi-run orchestration of one experiment arm: render, call the model, parse, persist. """

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from logging import getLogger, INFO
from typing import Optional

from ratingbench.errors import ConfigError, GatewayTransportError, ProfileError, RatingBenchError
from ratingbench.evalmetrics.records import PredictionRecord
from ratingbench.extract.parser import extract_score
from ratingbench.gateway.backends import TAG_SEPARATOR
from ratingbench.profile.profile import ProfileFormat, ProfileKind, assemble_profile
from ratingbench.promptgen.render import OutputFormat, Strategy, render, render_intermediate

_log = getLogger(__name__)
_log.setLevel(INFO)

_REVIEW_PROFILE = ProfileFormat(ProfileKind.REVIEW_SCORE)


@dataclass(frozen=True)
class Pipeline:
    """ What one arm sends to the model: profile format, output format, strategy and domain. """

    arm_id: str
    profile_format: ProfileFormat
    output_format: OutputFormat
    strategy: Strategy = Strategy.PLAIN
    domain_label: str = 'movie'
    description_model: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'output_format', OutputFormat(self.output_format))
        object.__setattr__(self, 'strategy', Strategy(self.strategy))
        if self.output_format.expects_review and \
                self.profile_format.kind is not ProfileKind.REVIEW_SCORE:
            raise ConfigError('Arm {}: review-writing output needs the review+score profile'
                              .format(self.arm_id))

    def fingerprint(self, config):
        """ The resume key of the arm: everything that shapes its requests. """

        payload = {
            'profile_format': self.profile_format.label,
            'output_format': self.output_format.value,
            'strategy': self.strategy.value,
            'domain_label': self.domain_label,
            'description_model': self.description_model,
            'model': config.to_json()
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def request_tag(instance_id, run_index, stage=None):
    parts = [instance_id, str(run_index)] + ([stage] if stage else [])
    return TAG_SEPARATOR.join(parts)


@dataclass
class _Outcome:
    instance_id: str
    run_index: int
    record: Optional[PredictionRecord] = None
    error: Optional[Exception] = None
    raw_outputs: tuple = ()


def _predict_one(instance, run_index, seed, pipeline, config, fingerprint, gateway, description):
    """ All model calls for one (instance, run): intermediates first, then the final prompt. """

    raw_outputs = list()
    intermediates = dict()

    for kind in pipeline.strategy.required_intermediates:
        prompt = render_intermediate(kind, instance, assemble_profile(instance, _REVIEW_PROFILE),
                                     pipeline.domain_label)
        tag = request_tag(instance.instance_id, run_index, kind.value)
        raw = gateway.complete(prompt, config, tag=tag, seed=seed)
        raw_outputs.append((tag, raw))
        intermediates[kind] = raw.text

    profile = assemble_profile(instance, pipeline.profile_format, description)
    prompt = render(instance, profile, pipeline.output_format, pipeline.strategy,
                    intermediates=intermediates, domain_label=pipeline.domain_label)
    tag = request_tag(instance.instance_id, run_index)
    raw = gateway.complete(prompt, config, tag=tag, seed=seed)
    raw_outputs.append((tag, raw))

    parse = extract_score(raw.text, instance.scale, pipeline.output_format.expects_review)
    record = PredictionRecord(
        instance_id=instance.instance_id,
        run_index=run_index,
        arm_id=pipeline.arm_id,
        config_fingerprint=fingerprint,
        ground_truth=instance.target.rating,
        context_scores=instance.context_scores,
        parse=parse,
        prediction=float(parse.score) if parse.ok else None,
        seed=seed,
        raw_ref=raw.request_fingerprint,
        prompt_fingerprint=prompt.config_fingerprint
    )
    return record, tuple(raw_outputs)


def run_experiment(dataset, pipeline, config, plan, store, gateway, descriptions=None):
    """ Runs every (run, instance) pair of the plan that the store does not already hold and
    persists each record as soon as it is available. Returns the records written by this call.

    Transport failures land in the store's failure log and are retried on the next call; parse
    failures are ordinary records. At most plan.max_parallel requests are in flight. A rejected
    request cancels the work not yet started; answers already received are still persisted before
    the error is raised. """

    if not dataset:
        raise RatingBenchError('Cannot run an experiment on an empty dataset.')

    descriptions = descriptions or {}
    fingerprint = pipeline.fingerprint(config)
    done = store.completed_keys()

    work = [(run_index, seed, instance)
            for run_index, seed in enumerate(plan.seeds)
            for instance in dataset
            if (instance.instance_id, run_index, fingerprint) not in done]

    _log.info('Arm {}: {} of {} predictions to make ({} already stored)'.format(
        pipeline.arm_id, len(work), len(dataset) * plan.n_runs,
        len(dataset) * plan.n_runs - len(work)))

    def task(run_index, seed, instance):
        outcome = _Outcome(instance.instance_id, run_index)
        try:
            outcome.record, outcome.raw_outputs = _predict_one(
                instance, run_index, seed, pipeline, config, fingerprint, gateway,
                descriptions.get(instance.instance_id))
        # A missing self-description is retried on resume like a transport failure.
        except (GatewayTransportError, ProfileError) as e:
            outcome.error = e
        return outcome

    written = list()
    aborted = None
    with ThreadPoolExecutor(max_workers=plan.max_parallel) as pool:
        futures = [pool.submit(task, *item) for item in work]

        # Single writer: results are persisted from this thread, in submission order.
        for future in futures:
            if future.cancelled():
                continue
            try:
                outcome = future.result()
            except Exception as e:
                # Stop issuing requests but keep every answer already received.
                if aborted is None:
                    aborted = e
                    _log.error('Arm {}: aborting, no new requests will be sent: {}'.format(
                        pipeline.arm_id, e))
                    for pending in futures:
                        pending.cancel()
                continue

            for tag, raw in outcome.raw_outputs:
                store.append_raw(tag, raw)

            if outcome.error is not None:
                _log.error('Arm {}: instance {} run {} failed: {}'.format(
                    pipeline.arm_id, outcome.instance_id, outcome.run_index, outcome.error))
                store.append_failure(outcome.instance_id, outcome.run_index, fingerprint,
                                     outcome.error)
                continue

            store.append_record(outcome.record)
            written.append(outcome.record)

    if aborted is not None:
        _log.info('Arm {}: kept {} records before aborting'.format(pipeline.arm_id, len(written)))
        raise aborted

    _log.info('Arm {}: wrote {} records, {} infrastructure failures'.format(
        pipeline.arm_id, len(written), len(work) - len(written)))

    return written
