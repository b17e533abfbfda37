"""Filename slugs for exported models and reports."""

from slugify import slugify

from src.models.chain import ChainSpec
from src.models.quantum import DetectionRule, EveCorrectRule


def generate_slug(text: str, max_length: int = 80) -> str:
    """Generate a filesystem-safe slug from text.

    Args:
        text: Input text
        max_length: Maximum slug length

    Returns:
        Lowercase, hyphen-separated slug

    Examples:
        >>> generate_slug("BB84 Intercept-Resend N=5")
        'bb84-intercept-resend-n-5'
    """
    slug = slugify(text, max_length=max_length, word_boundary=True, separator="-")
    return slug or "model"


def model_stem(spec: ChainSpec) -> str:
    """
    Filename stem for an exported model.

    Non-default rules are appended so that exports of the same protocol and
    attack under different rules do not overwrite each other.

    Examples:
        >>> from src.models.quantum import AttackStrategy, Protocol
        >>> spec = ChainSpec(protocol=Protocol.BB84, attack=AttackStrategy("ir"), rounds=5)
        >>> model_stem(spec)
        'bb84-intercept-resend-n5'
    """
    parts = [spec.protocol.value, spec.attack.label, f"n{spec.rounds}"]
    if spec.detection is not DetectionRule.SAME_BASIS_MISMATCH:
        parts.append(spec.detection.value)
    if spec.eve_rule is not EveCorrectRule.BASIS_AND_BIT_MATCH_SIFTED and spec.attack.measures:
        parts.append(spec.eve_rule.value)
    if not spec.stop_on_detect:
        parts.append("no-stop")
    return generate_slug(" ".join(parts), max_length=120)
