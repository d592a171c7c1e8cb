import json
from os.path import dirname, abspath, join

from ratingbench.errors import ConfigError

_DOMAINS = 'domains'
_NAME = 'name'
_WORDS = 'words'

# Every domain has to define each of these substitutions.
REQUIRED_WORDS = ('item', 'subject', 'plot', 'Plot', 'plots', 'critic')


class DomainConfig:
    """ Domain-level word substitutions, e.g. "plot" -> "book description" for Books. """

    def __init__(self, domain_data):
        self.name = domain_data[_NAME]
        self.words = dict(domain_data[_WORDS])

        missing = [w for w in REQUIRED_WORDS if w not in self.words]
        if missing:
            raise ConfigError('Domain "{}" is missing words: {}'.format(self.name, missing))


class PromptDomainsConfig:
    """ Top-level config listing the dataset domains prompts can be rendered for. """

    def __init__(self, config_path):
        try:
            with open(config_path) as f:
                data = json.loads(f.read())
                self.domains = {d[_NAME]: DomainConfig(d) for d in data[_DOMAINS]}

        except Exception as e:
            raise ConfigError('Could not load prompt domain config: {}'.format(e))

    def words(self, domain_label):
        try:
            return self.domains[domain_label].words
        except KeyError:
            raise ConfigError('Unknown prompt domain "{}"; known domains: {}'.format(
                domain_label, ', '.join(sorted(self.domains))))


# Build absolute path to config file based on this module's location
_PARENT_DIR = dirname(abspath(__file__))
_DOMAIN_CONFIG_PATH = join(_PARENT_DIR, 'domain_config.json')
TEMPLATE_DIR = join(_PARENT_DIR, 'templates')

# Use this for easy access to the domain word tables
DOMAIN_CONFIG = PromptDomainsConfig(_DOMAIN_CONFIG_PATH)
