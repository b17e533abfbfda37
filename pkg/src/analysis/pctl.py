"""Property language fragment: unbounded reachability ``P=?[F predicate]``.

Grammar (whitespace-insensitive)::

    query     := "P" "=?" "[" "F" predicate "]"
    predicate := "(" name cmp int ")" ( "&" "(" name cmp int ")" )*
    cmp       := "=" | "<" | ">" | "<=" | ">="

The lark grammar below also accepts bounded probabilities (``P>=0.5``),
step-bounded ``F<=k``, the path operators U, G, X, W and R, and the ``|``
and ``!`` junctors, so that they can be rejected with
UnsupportedOperatorError at the offending token.
"""

from fractions import Fraction
from typing import Any

from lark import Lark, Token, Transformer, UnexpectedCharacters, UnexpectedInput, UnexpectedToken
from lark.exceptions import VisitError

from src.analysis.dtmc import CORRECT_COUNT, DETECTED, reach_probability
from src.errors import AnalyzerError, QuerySyntaxError, UnsupportedOperatorError
from src.models.chain import Comparator, Conjunct, Dtmc, PctlQuery, StatePredicate
from src.utils.logging import get_logger

logger = get_logger(__name__)

# Target states of the per-agent process models, keyed by their conjunct set.
# Both pairs mark "Eve detected" in the collapsed chain.
STATE_ALIASES: dict[frozenset[tuple[str, str, int]], Conjunct] = {
    frozenset({("aliceState", "=", 15), ("bobState", "=", 10)}): Conjunct(
        variable=DETECTED, comparator=Comparator.EQ, constant=1
    ),
    frozenset({("aliceState", "=", 11), ("bobState", "=", 10)}): Conjunct(
        variable=DETECTED, comparator=Comparator.EQ, constant=1
    ),
}
VARIABLE_ALIASES = {"correctMeasurement": CORRECT_COUNT, "eveDetected": DETECTED}

query_grammar = r"""
    start: "P" bound "[" path "]"

    bound: QUERY                    -> query_bound
         | CMP PROB                 -> probability_bound

    path: temporal [binary_op operand]
        | TRUE binary_op operand    -> true_until

    temporal: path_op [step_bound] predicate
    step_bound: CMP INT
    operand: predicate | TRUE

    predicate: conjunct (junctor conjunct)*
    conjunct: "(" NAME CMP INT ")"

    !path_op: "F" | "G" | "X" | "U" | "W" | "R"
    !binary_op: "U" | "W" | "R"
    !junctor: "&" | "|" | "!"

    TRUE: "true"
    QUERY.2: "=?"
    CMP: /<=|>=|<|>|=/
    PROB: /\d+(\.\d+)?/
    INT: /-?\d+/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    WS: /\s+/

    %ignore WS
"""

_parser = Lark(query_grammar, parser="lalr", propagate_positions=True, maybe_placeholders=True)


class QueryBuilder(Transformer[Token, PctlQuery]):
    """Turn a parse tree into a PctlQuery, rejecting everything but ``P=?[F ...]``."""

    def start(self, children: list[Any]) -> PctlQuery:
        _, target = children
        return PctlQuery(target=target)

    def query_bound(self, children: list[Any]) -> None:
        return None

    def probability_bound(self, children: list[Any]) -> None:
        comparator, _ = children
        raise UnsupportedOperatorError(f"P{comparator}", comparator.start_pos)

    def path(self, children: list[Any]) -> StatePredicate:
        target, operator, _ = children
        if operator is not None:
            raise UnsupportedOperatorError(str(operator), operator.start_pos)
        return target

    def true_until(self, children: list[Any]) -> None:
        _, operator, _ = children
        raise UnsupportedOperatorError(str(operator), operator.start_pos)

    def temporal(self, children: list[Any]) -> StatePredicate:
        operator, step_bound, target = children
        if operator != "F":
            raise UnsupportedOperatorError(str(operator), operator.start_pos)
        if step_bound is not None:
            raise UnsupportedOperatorError(f"F{step_bound}", step_bound.start_pos)
        return target

    def step_bound(self, children: list[Any]) -> Token:
        return children[0]

    def operand(self, children: list[Any]) -> object:
        return children[0]

    def predicate(self, children: list[Any]) -> StatePredicate:
        for junctor in children[1::2]:
            if junctor != "&":
                raise UnsupportedOperatorError(str(junctor), junctor.start_pos)
        return StatePredicate(conjuncts=tuple(children[0::2]))

    def conjunct(self, children: list[Any]) -> Conjunct:
        name, comparator, constant = children
        return Conjunct(
            variable=str(name), comparator=Comparator(str(comparator)), constant=int(constant)
        )

    def path_op(self, children: list[Any]) -> Token:
        return children[0]

    def binary_op(self, children: list[Any]) -> Token:
        return children[0]

    def junctor(self, children: list[Any]) -> Token:
        return children[0]


def _syntax_error(text: str, error: UnexpectedInput) -> QuerySyntaxError:
    if isinstance(error, UnexpectedCharacters):
        return QuerySyntaxError(f"Unexpected character {error.char!r}", error.pos_in_stream)
    if isinstance(error, UnexpectedToken) and error.token.type != "$END":
        expected = ", ".join(sorted(error.expected))
        return QuerySyntaxError(
            f"Unexpected {str(error.token)!r}, expected one of {expected}",
            error.token.start_pos,
        )
    return QuerySyntaxError("Unexpected end of input", len(text))


def parse_query(text: str) -> PctlQuery:
    """
    Parse ``P=?[F (name cmp int) & ...]``.

    Raises:
        QuerySyntaxError: Malformed text, with the character offset
        UnsupportedOperatorError: U, G, X, W, R, a step or probability bound, ``|`` or ``!``

    Examples:
        >>> str(parse_query("P=?[F (detected=1) & (round=6)]"))
        'P=?[F(detected=1)&(round=6)]'
    """
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None

    try:
        return QueryBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, AnalyzerError):
            raise e.orig_exc from None
        raise


def format_query(query: PctlQuery) -> str:
    """Canonical text of a query; reparses to an equal query."""
    return str(query)


def resolve_aliases(predicate: StatePredicate) -> StatePredicate:
    """
    Rewrite process-model names into chain variables.

    The per-agent target pairs (``aliceState``/``bobState``) become
    ``detected=1`` and ``correctMeasurement`` becomes ``correctCount``.
    """
    remaining = list(predicate.conjuncts)
    resolved: list[Conjunct] = []

    keyed = {(c.variable, c.comparator.value, c.constant): c for c in remaining}
    for pattern, replacement in STATE_ALIASES.items():
        if pattern <= keyed.keys():
            remaining = [
                c for c in remaining if (c.variable, c.comparator.value, c.constant) not in pattern
            ]
            resolved.append(replacement)

    for conjunct in remaining:
        variable = VARIABLE_ALIASES.get(conjunct.variable, conjunct.variable)
        resolved.append(conjunct.model_copy(update={"variable": variable}))

    return StatePredicate(conjuncts=tuple(dict.fromkeys(resolved)))


def evaluate(chain: Dtmc, query: PctlQuery) -> Fraction:
    """
    Probability that ``chain`` eventually satisfies ``query.target``.

    Raises:
        UnknownVariableError: If the (alias-resolved) target names undeclared variables
    """
    target = resolve_aliases(query.target)
    probability = reach_probability(chain, target)
    logger.debug("Query evaluated", query=str(query), resolved=str(target), result=str(probability))
    return probability
