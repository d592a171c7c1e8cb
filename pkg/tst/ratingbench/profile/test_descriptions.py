from unittest import TestCase
from unittest.mock import MagicMock, patch

from ratingbench.errors import GatewayTransportError, ProfileError
from ratingbench.gateway.backends import MockBackend
from ratingbench.gateway.client import ChatGateway, RawOutput
from ratingbench.gateway.config import ModelConfig, RetryPolicy
from ratingbench.persistence.description_manager import DescriptionCache, get_all_descriptions
from ratingbench.profile.descriptions import ensure_descriptions, synthesize_self_description

from tst.ratingbench.helpers import make_dataset, make_instance, movie_instance

CONFIG = ModelConfig('describer')


def _raw(text):
    return RawOutput(text=text, request_fingerprint='fp', latency_ms=1, attempt_count=1)


class SynthesizeTests(TestCase):

    def test_returns_generation_verbatim(self):
        gateway = MagicMock()
        gateway.complete.return_value = _raw('  I like mysteries with a twist.\n')

        text = synthesize_self_description(movie_instance(), gateway, CONFIG)

        assert text == '  I like mysteries with a twist.\n'
        prompt = gateway.complete.call_args[0][0]
        assert 'must start with “I like …”' in prompt.messages[-1].content
        assert gateway.complete.call_args[1]['tag'] == 'movies:u1#description'

    @patch('ratingbench.profile.descriptions._log')
    def test_long_passage_is_kept_and_logged(self, log):
        gateway = MagicMock()
        gateway.complete.return_value = _raw('I like ' + 'a' * 400)

        text = synthesize_self_description(movie_instance(), gateway, CONFIG)

        assert len(text) == 407
        assert log.warning.call_count == 1

    def test_empty_generation(self):
        gateway = MagicMock()
        gateway.complete.return_value = _raw('   ')

        with self.assertRaises(ProfileError):
            synthesize_self_description(movie_instance(), gateway, CONFIG)

    def test_context_without_review_text(self):
        instance = make_instance('x', [3, 4], 5)
        context = tuple(r.__class__(r.user_id, r.item_id, r.item_description, '', r.rating)
                        for r in instance.context)
        instance = instance.__class__(instance.instance_id, context, instance.target,
                                      instance.scale, instance.source_dataset)

        with self.assertRaises(ProfileError):
            synthesize_self_description(instance, MagicMock(), CONFIG)


class EnsureDescriptionsTests(TestCase):

    def setUp(self):
        self.cache = DescriptionCache()
        self.dataset = make_dataset(4)

    def tearDown(self):
        self.cache.close()

    def _gateway(self, script):
        backend = MockBackend(script)
        return ChatGateway(backend, RetryPolicy(initial_delay_s=0, max_attempts=2)), backend

    def test_generates_then_reuses(self):
        gateway, backend = self._gateway({'default': 'I like everything.'})

        first = ensure_descriptions(self.dataset, gateway, CONFIG, self.cache)
        second = ensure_descriptions(self.dataset, gateway, CONFIG, self.cache)

        assert first == second == {i.instance_id: 'I like everything.' for i in self.dataset}
        assert backend.call_count == 4
        assert len(get_all_descriptions(self.cache, 'describer')) == 4

    def test_failures_are_left_out(self):
        gateway, _ = self._gateway({
            'responses': {'i01#description': {'text': 'x', 'fail': [503, 503]}},
            'default': 'I like it.'
        })

        descriptions = ensure_descriptions(self.dataset, gateway, CONFIG, self.cache)

        assert sorted(descriptions) == ['i00', 'i02', 'i03']

        # The failed instance is generated on the next call.
        gateway, backend = self._gateway({'default': 'I like it too.'})
        descriptions = ensure_descriptions(self.dataset, gateway, CONFIG, self.cache)

        assert backend.call_count == 1
        assert descriptions['i01'] == 'I like it too.'
        assert descriptions['i00'] == 'I like it.'

    def test_only_dataset_instances_are_returned(self):
        gateway, _ = self._gateway({'default': 'I like it.'})
        ensure_descriptions(make_dataset(6), gateway, CONFIG, self.cache)

        descriptions = ensure_descriptions(self.dataset, gateway, CONFIG, self.cache)

        assert sorted(descriptions) == ['i00', 'i01', 'i02', 'i03']
