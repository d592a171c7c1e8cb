""" Shared builders for test instances and datasets. """

from os.path import abspath, dirname, join

from ratingbench.corpus.models import EvalInstance, RatingScale, ReviewRecord

FIXTURES_DIR = join(dirname(dirname(abspath(__file__))), 'fixtures')

MOVIE_SCALE = RatingScale(1, 10)

MOVIE_PLOTS = (
    'A retired detective returns to solve one last case in his home town.',
    'Two rival chefs are forced to share a kitchen on a remote island.',
    'A young pilot discovers a hidden city above the clouds.',
    'An aging rock band reunites for a final tour across the country.',
    'A scientist wakes up in a world where nobody remembers her work.'
)

MOVIE_REVIEWS = (
    'Tense and clever from start to finish.',
    'Funny in places but it drags in the middle.',
    'Beautiful visuals and a story that soars.',
    'A warm and loud celebration of friendship.',
    'Haunting, original and deeply moving.'
)

MOVIE_RATINGS = (8, 6, 7, 9, 10)

TARGET_PLOT = 'A lighthouse keeper finds a message in a bottle that predicts the future.'
TARGET_REVIEW = 'Strange and wonderful.'
TARGET_RATING = 7


def make_record(user_id, item_id, description, review, rating, timestamp=None):
    return ReviewRecord(user_id=user_id, item_id=item_id, item_description=description,
                        review_text=review, rating=rating, timestamp=timestamp)


def movie_instance(instance_id='movies:u1', user_id='u1'):
    """ The k=5 Movies instance the prompt golden file was written for. """

    context = tuple(
        make_record(user_id, 'm{}'.format(n), plot, review, rating)
        for n, (plot, review, rating) in enumerate(zip(MOVIE_PLOTS, MOVIE_REVIEWS, MOVIE_RATINGS))
    )
    target = make_record(user_id, 'm-target', TARGET_PLOT, TARGET_REVIEW, TARGET_RATING)
    return EvalInstance(instance_id=instance_id, context=context, target=target,
                        scale=MOVIE_SCALE, source_dataset='movies')


def make_instance(instance_id, ratings, target_rating, scale=MOVIE_SCALE, user_id=None,
                  source='synthetic'):
    """ An instance with one context record per rating; descriptions and reviews are derived from
    the instance id so every text in a dataset is distinct. """

    user_id = user_id or instance_id
    context = tuple(
        make_record(user_id, '{}-item{}'.format(instance_id, n),
                    'Description {} of {}.'.format(n, instance_id),
                    'Review {} of {}.'.format(n, instance_id), rating)
        for n, rating in enumerate(ratings)
    )
    target = make_record(user_id, '{}-target'.format(instance_id),
                         'Target description of {}.'.format(instance_id),
                         'Target review of {}.'.format(instance_id), target_rating)
    return EvalInstance(instance_id=instance_id, context=context, target=target, scale=scale,
                        source_dataset=source)


def make_dataset(n, k=5, scale=MOVIE_SCALE):
    """ n instances with varied, deterministic ratings. """

    span = scale.y_max - scale.y_min + 1
    return [
        make_instance('i{:02d}'.format(i),
                      [scale.y_min + (i + 3 * j) % span for j in range(k)],
                      scale.y_min + (2 * i + 1) % span, scale=scale)
        for i in range(n)
    ]
