import json
from os.path import dirname, abspath, join

from ratingbench.corpus.models import RatingScale
from ratingbench.errors import ConfigError

_CORPORA = 'corpora'
_NAME = 'name'
_ITEM_FIELDS = 'item_fields'
_SCALE = 'scale'
_MIN_LEN = 'min_len'
_MAX_LEN = 'max_len'
_SOURCE_FIELDS = 'source_fields'
_SCORE_ONLY = 'score_only'

# ReviewRecord-side names of the fields a source line has to provide.
RECORD_FIELDS = ('user_id', 'item_id', 'item', 'review', 'rating', 'timestamp')


class SourceSchema:
    """ Maps the fields of one line-delimited source file onto ReviewRecord fields, and says how
    to turn the raw item map into a unified item description and which rating scale applies.
    Every line needs a non-blank review unless the corpus is score_only. """

    def __init__(self, item_fields, scale, source_fields=None, score_only=False):
        if not item_fields:
            raise ConfigError('A source schema needs at least one item description field')

        self.item_fields = tuple(item_fields)
        self.scale = scale
        self.score_only = bool(score_only)
        self.source_fields = dict(zip(RECORD_FIELDS, RECORD_FIELDS))
        self.source_fields.update(source_fields or {})

        unknown = set(self.source_fields) - set(RECORD_FIELDS)
        if unknown:
            raise ConfigError('Unknown record fields in source mapping: {}'.format(sorted(unknown)))


class CorpusRecipe:
    """ Named ingestion + construction defaults for one corpus, e.g. Books or Recipe. """

    def __init__(self, corpus_data, source_fields):
        self.name = corpus_data[_NAME]
        self.min_len = corpus_data.get(_MIN_LEN, 0)
        self.max_len = corpus_data.get(_MAX_LEN)

        y_min, y_max = corpus_data[_SCALE]
        self.schema = SourceSchema(corpus_data[_ITEM_FIELDS], RatingScale(y_min, y_max),
                                   source_fields, corpus_data.get(_SCORE_ONLY, False))


class CorpusConfig:
    """ Top-level config listing the known corpora and their ingestion recipes. """

    def __init__(self, config_path):
        try:
            with open(config_path) as f:
                data = json.loads(f.read())
                source_fields = data.get(_SOURCE_FIELDS, {})
                self.corpora = {c[_NAME]: CorpusRecipe(c, source_fields) for c in data[_CORPORA]}

        except Exception as e:
            raise ConfigError('Could not load corpus config: {}'.format(e))

    def recipe(self, name):
        try:
            return self.corpora[name]
        except KeyError:
            raise ConfigError('Unknown corpus "{}"; known corpora: {}'.format(
                name, ', '.join(sorted(self.corpora))))


# Build absolute path to config file based on this module's location
_PARENT_DIR = dirname(abspath(__file__))
_CORPUS_CONFIG_PATH = join(_PARENT_DIR, 'corpus_config.json')

# Use this for easy access to the per-corpus ingestion recipes
CORPUS_CONFIG = CorpusConfig(_CORPUS_CONFIG_PATH)
