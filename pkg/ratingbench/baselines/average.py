import numpy as np

from ratingbench.errors import BaselineError


def user_average(instance):
    """ Mean of the user's in-context ratings, unrounded. """

    if not instance.context:
        raise BaselineError('Instance {} has no in-context ratings to average'.format(
            instance.instance_id))

    return float(np.mean(instance.context_scores))
