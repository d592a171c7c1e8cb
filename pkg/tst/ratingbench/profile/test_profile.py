from unittest import TestCase

from ratingbench.errors import ProfileError
from ratingbench.profile.profile import ProfileFormat, ProfileKind, assemble_profile

from tst.ratingbench.helpers import MOVIE_PLOTS, MOVIE_RATINGS, MOVIE_REVIEWS, movie_instance


class AssembleProfileTests(TestCase):

    def setUp(self):
        self.instance = movie_instance()

    def test_review_score(self):
        profile = assemble_profile(self.instance, ProfileFormat(ProfileKind.REVIEW_SCORE))

        assert [e.item_description for e in profile.entries] == list(MOVIE_PLOTS)
        assert [e.review_text for e in profile.entries] == list(MOVIE_REVIEWS)
        assert [e.rating for e in profile.entries] == list(MOVIE_RATINGS)
        assert profile.has_reviews
        assert profile.description is None

    def test_score_only_drops_reviews(self):
        profile = assemble_profile(self.instance, ProfileFormat('score_only'))

        assert all(e.review_text is None for e in profile.entries)
        assert not profile.has_reviews
        assert len(profile.entries) == 5

    def test_with_description(self):
        profile = assemble_profile(self.instance, ProfileFormat('review_score', True),
                                   description='I like twists.')

        assert profile.description == 'I like twists.'
        assert len(profile.entries) == 5

    def test_description_only(self):
        profile = assemble_profile(self.instance, ProfileFormat('description_only', True),
                                   description='I like twists.')

        assert profile.entries == ()
        assert not profile.has_reviews

    def test_description_is_ignored_when_not_asked_for(self):
        profile = assemble_profile(self.instance, ProfileFormat('score_only'),
                                   description='I like twists.')

        assert profile.description is None

    def test_missing_description(self):
        with self.assertRaises(ProfileError):
            assemble_profile(self.instance, ProfileFormat('score_only', True))

    def test_description_only_needs_description_flag(self):
        with self.assertRaises(ProfileError):
            ProfileFormat('description_only')

    def test_labels(self):
        assert ProfileFormat('score_only').label == 'score_only'
        assert ProfileFormat('review_score', True).label == 'review_score+description'
