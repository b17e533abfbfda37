"""BDD tests for reachability property queries."""

from fractions import Fraction

from pytest_bdd import given, parsers, scenarios, then, when

from src.analysis.dtmc import build_chain
from src.analysis.pctl import evaluate, parse_query
from src.errors import AnalyzerError
from src.models.chain import ChainSpec
from src.models.quantum import AttackStrategy, Protocol

scenarios("features/property_queries.feature")


@given(parsers.parse('the "{protocol}" intercept-resend chain with {rounds:d} exchanges'))
def intercept_resend_chain(context: dict, protocol: str, rounds: int) -> None:
    """Build the chain once per scenario."""
    spec = ChainSpec(
        protocol=Protocol(protocol), attack=AttackStrategy.INTERCEPT_RESEND, rounds=rounds
    )
    context["chain"] = build_chain(spec)


@when(parsers.parse('I evaluate "{query}"'))
def evaluate_query(context: dict, query: str) -> None:
    """Parse and evaluate, keeping any analyzer error for inspection."""
    try:
        context["result"] = evaluate(context["chain"], parse_query(query))
    except AnalyzerError as e:
        context["error"] = e


@then(parsers.parse("the exact result is {value}"))
def exact_result(context: dict, value: str) -> None:
    assert "error" not in context, context.get("error")
    assert context["result"] == Fraction(value)


@then(parsers.parse('the query is rejected with "{error}"'))
def query_rejected(context: dict, error: str) -> None:
    assert "result" not in context
    assert type(context["error"]).__name__ == error
