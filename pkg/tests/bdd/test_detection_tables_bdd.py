"""BDD tests for detection and knowledge tables."""

import asyncio
from fractions import Fraction

from pytest_bdd import given, parsers, scenarios, then, when

from src.analysis.sweep import build_tables
from src.models.quantum import Protocol
from src.models.results import TableReport

# Load all scenarios from feature file
scenarios("features/detection_tables.feature")


# Background Steps


@given("tables count N+1 exchanges per N")
def inclusive_rounds_rounds(context: dict) -> None:
    """Evaluate N+1 exchanges for every N."""
    context["inclusive_rounds"] = True


# When Steps


@when(parsers.parse('I build the "{protocol}" tables'))
def build_protocol_tables(context: dict, protocol: str) -> None:
    """Compute all four table columns with trend fits."""
    context["report"] = asyncio.run(
        build_tables(Protocol(protocol), inclusive_rounds=context["inclusive_rounds"])
    )


# Then Steps


@then(parsers.parse("the probability is within {tolerance:g} of {expected:g}"))
def probability_close(context: dict, tolerance: float, expected: float) -> None:
    """Verify the exact value against the table entry."""
    assert abs(float(context["exact"]) - expected) <= tolerance


@then(parsers.parse("the exact value equals one minus {survival} to the power {rounds:d}"))
def closed_form(context: dict, survival: str, rounds: int) -> None:
    """Verify the geometric closed form."""
    assert context["spec"].rounds == rounds
    assert context["exact"] == 1 - Fraction(survival) ** rounds


@then("the table has rows for N=5, 10, 15 and 20")
def table_rows(context: dict) -> None:
    report: TableReport = context["report"]
    assert [row.N for row in report.rows] == [5, 10, 15, 20]


@then("every detection column is nondecreasing")
def detection_nondecreasing(context: dict) -> None:
    trends = [t for t in context["report"].trends if t.column.startswith("p_ed_")]
    assert len(trends) == 2
    assert all(t.monotone and t.direction == "nondecreasing" for t in trends)


@then("every correct-measurement column is nonincreasing")
def knowledge_nonincreasing(context: dict) -> None:
    trends = [t for t in context["report"].trends if t.column.startswith("p_cm_")]
    assert len(trends) == 2
    assert all(t.monotone and t.direction == "nonincreasing" for t in trends)


@then(parsers.parse('the "{column}" trend fit has a near {a:g} and b near {b:g}'))
def trend_fit(context: dict, column: str, a: float, b: float) -> None:
    """Verify fitted parameters of one column."""
    (trend,) = [t for t in context["report"].trends if t.column == column]
    assert trend.fit is not None
    assert abs(trend.fit.a - a) < 1e-3
    assert abs(trend.fit.b - b) < 1e-3
