"""Unit tests for slug utilities."""

from src.models.chain import ChainSpec
from src.models.quantum import AttackStrategy, DetectionRule, EveCorrectRule, Protocol
from src.utils.slug import generate_slug, model_stem


class TestGenerateSlug:
    """Test generate_slug function."""

    def test_basic_slug_generation(self) -> None:
        """Test basic slug generation."""
        assert generate_slug("BB84 Intercept Resend") == "bb84-intercept-resend"

    def test_slug_with_special_characters(self) -> None:
        """Test slug generation with special characters."""
        assert generate_slug("B92 / random-substitution (N=5)") == "b92-random-substitution-n-5"

    def test_slug_max_length(self) -> None:
        """Test slug generation with max length."""
        slug = generate_slug("bb84 intercept resend detection sweep", max_length=20)
        assert len(slug) <= 20
        assert slug == "bb84-intercept"

    def test_slug_empty_string(self) -> None:
        """Test slug generation with empty string."""
        assert generate_slug("") == "model"
        assert generate_slug("!!!") == "model"


class TestModelStem:
    """Test export filename stems."""

    def test_default_rules(self) -> None:
        spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy.INTERCEPT_RESEND, rounds=5)
        assert model_stem(spec) == "bb84-intercept-resend-n5"

    def test_no_eavesdropper(self) -> None:
        spec = ChainSpec(protocol=Protocol.B92, attack=AttackStrategy.NO_EVE, rounds=3)
        assert model_stem(spec) == "b92-no-eavesdropper-n3"

    def test_non_default_rules_are_appended(self) -> None:
        spec = ChainSpec(
            protocol=Protocol.B92,
            attack=AttackStrategy.RANDOM_SUBSTITUTION,
            detection=DetectionRule.BOTH,
            eve_rule=EveCorrectRule.BIT_MATCH,
            rounds=4,
            stop_on_detect=False,
        )
        assert model_stem(spec) == "b92-random-substitution-n4-both-bit-match-no-stop"

    def test_eve_rule_ignored_without_eve(self) -> None:
        spec = ChainSpec(
            protocol=Protocol.BB84,
            attack=AttackStrategy.NO_EVE,
            eve_rule=EveCorrectRule.BIT_MATCH,
            rounds=2,
        )
        assert model_stem(spec) == "bb84-no-eavesdropper-n2"
