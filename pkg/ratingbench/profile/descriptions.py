""" Synthesis of self-described preference passages ("I like ...") from a user's in-context reviews.
"""

from concurrent.futures import ThreadPoolExecutor
from logging import getLogger, INFO

from ratingbench.errors import GatewayTransportError, ProfileError
from ratingbench.persistence.description_manager import (
    DESCRIPTION_LIMIT,
    get_all_descriptions,
    save_description
)
from ratingbench.profile.profile import ProfileFormat, ProfileKind, assemble_profile
from ratingbench.promptgen.render import IntermediateKind, render_intermediate

_log = getLogger(__name__)
_log.setLevel(INFO)

DESCRIPTION_STAGE = 'description'


def synthesize_self_description(instance, gateway, model_config, domain_label='movie'):
    """ Asks the model once for the instance's self-description and returns the generated passage
    verbatim. Passages over the length limit are kept and only flagged in the log. """

    if not all(record.review_text for record in instance.context):
        raise ProfileError('Instance {} has context reviews without text'.format(
            instance.instance_id))

    profile = assemble_profile(instance, ProfileFormat(ProfileKind.REVIEW_SCORE))
    prompt = render_intermediate(IntermediateKind.SELF_DESCRIPTION, instance, profile, domain_label)
    raw = gateway.complete(prompt, model_config,
                           tag='{}#{}'.format(instance.instance_id, DESCRIPTION_STAGE))

    text = raw.text
    if not text or not text.strip():
        raise ProfileError('Empty self-description generated for instance {}'.format(
            instance.instance_id))

    if len(text) > DESCRIPTION_LIMIT:
        _log.warning('Self-description for {} is {} characters, over the {} limit'.format(
            instance.instance_id, len(text), DESCRIPTION_LIMIT))
    else:
        _log.debug('Self-description for {} is {} characters'.format(
            instance.instance_id, len(text)))

    return text


def ensure_descriptions(dataset, gateway, model_config, cache, max_parallel=4,
                        domain_label='movie'):
    """ Returns instance_id -> self-description for every instance, generating and caching the
    ones the cache does not hold yet. Instances whose generation fails are logged and left out. """

    generator = model_config.model_name
    cached = get_all_descriptions(cache, generator)
    missing = [instance for instance in dataset if instance.instance_id not in cached]

    _log.info('{} of {} self-descriptions cached for {}, generating {}'.format(
        len(dataset) - len(missing), len(dataset), generator, len(missing)))

    def task(instance):
        try:
            return instance, synthesize_self_description(instance, gateway, model_config,
                                                          domain_label)
        except (GatewayTransportError, ProfileError) as e:
            return instance, e

    wanted = {instance.instance_id for instance in dataset}
    descriptions = {iid: text for iid, text in cached.items() if iid in wanted}

    with ThreadPoolExecutor(max_workers=max_parallel) as pool:
        for instance, result in pool.map(task, missing):
            if isinstance(result, Exception):
                _log.error('Could not synthesize a self-description for {}: {}'.format(
                    instance.instance_id, result))
                continue

            save_description(cache, instance.instance_id, generator, result)
            descriptions[instance.instance_id] = result

    return descriptions
