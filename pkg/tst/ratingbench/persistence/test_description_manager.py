import os
import tempfile
from unittest import TestCase

from ratingbench.persistence.description_manager import (
    DescriptionCache,
    get_all_descriptions,
    get_description,
    save_description
)


class DescriptionManagerTests(TestCase):

    def setUp(self):
        self.cache = DescriptionCache()

    def tearDown(self):
        self.cache.close()

    def test_save_and_get(self):
        save_description(self.cache, 'i1', 'llama', 'I like slow dramas.')

        description = get_description(self.cache, 'i1', 'llama')

        assert description.to_json() == {
            'instance_id': 'i1',
            'generator_model': 'llama',
            'text': 'I like slow dramas.',
            'length': 19,
            'over_limit': False
        }
        assert get_description(self.cache, 'i1', 'gpt') is None

    def test_first_passage_wins(self):
        save_description(self.cache, 'i1', 'llama', 'I like dramas.')
        kept = save_description(self.cache, 'i1', 'llama', 'I like comedies.')

        assert kept.text == 'I like dramas.'
        assert get_all_descriptions(self.cache, 'llama') == {'i1': 'I like dramas.'}

    def test_long_passages_are_flagged_not_cut(self):
        text = 'I like ' + 'x' * 400

        save_description(self.cache, 'i2', 'llama', text)

        description = get_description(self.cache, 'i2', 'llama')
        assert description.text == text
        assert description.over_limit

    def test_all_descriptions_per_model(self):
        save_description(self.cache, 'i2', 'llama', 'B')
        save_description(self.cache, 'i1', 'llama', 'A')
        save_description(self.cache, 'i1', 'gpt', 'C')

        assert get_all_descriptions(self.cache, 'llama') == {'i1': 'A', 'i2': 'B'}
        assert get_all_descriptions(self.cache, 'gpt') == {'i1': 'C'}


class DescriptionFileTests(TestCase):

    def test_survives_reopening(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'descriptions.sqlite')
            cache = DescriptionCache(path)
            save_description(cache, 'i1', 'llama', 'I like noir.')
            cache.close()

            reopened = DescriptionCache(path)
            try:
                assert get_all_descriptions(reopened, 'llama') == {'i1': 'I like noir.'}
            finally:
                reopened.close()
