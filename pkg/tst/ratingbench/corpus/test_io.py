import json
import os
import tempfile
from unittest import TestCase

from ratingbench.corpus.io import load_dataset, save_dataset
from ratingbench.errors import CorpusError

from tst.ratingbench.helpers import make_dataset, movie_instance


class DatasetIoTests(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'dataset.jsonl')

    def tearDown(self):
        self.tmp.cleanup()

    def _lines(self):
        with open(self.path, encoding='utf-8') as f:
            return [json.loads(line) for line in f]

    def test_reads_back_what_was_written(self):
        dataset = [movie_instance()] + make_dataset(3, k=2)

        save_dataset(dataset, self.path)

        assert load_dataset(self.path) == dataset

    def test_line_layout(self):
        save_dataset([movie_instance()], self.path)

        lines = self._lines()
        assert [line['role'] for line in lines] == \
            ['context:0', 'context:1', 'context:2', 'context:3', 'context:4', 'target']
        assert lines[-1]['item'] == {'description': movie_instance().target.item_description}
        assert lines[0]['scale'] == [1, 10]
        assert lines[0]['source_dataset'] == 'movies'

    def test_context_order_follows_role_index(self):
        save_dataset([movie_instance()], self.path)
        lines = self._lines()
        with open(self.path, 'w', encoding='utf-8') as f:
            for line in reversed(lines):
                f.write(json.dumps(line) + '\n')

        assert load_dataset(self.path) == [movie_instance()]

    def test_rating_outside_scale(self):
        save_dataset([movie_instance()], self.path)
        lines = self._lines()
        lines[0]['rating'] = 11
        with open(self.path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(json.dumps(line) for line in lines) + '\n')

        with self.assertRaises(CorpusError):
            load_dataset(self.path)

    def test_missing_target(self):
        save_dataset([movie_instance()], self.path)
        lines = self._lines()[:-1]
        with open(self.path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(json.dumps(line) for line in lines) + '\n')

        with self.assertRaises(CorpusError):
            load_dataset(self.path)

    def test_malformed_line(self):
        with open(self.path, 'w') as f:
            f.write('{"instance_id": "x"}\n')

        with self.assertRaises(CorpusError):
            load_dataset(self.path)
