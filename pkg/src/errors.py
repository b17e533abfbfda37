"""Exception hierarchy for the analyzer."""


class AnalyzerError(Exception):
    """Base exception for analyzer domain errors."""

    def __init__(self, message: str, component: str) -> None:
        self.component = component
        super().__init__(message)


class InvalidCombinationError(AnalyzerError):
    """A protocol/detection-rule pairing that has no meaning."""

    def __init__(self, message: str) -> None:
        super().__init__(message, component="protocol")


class UnknownVariableError(AnalyzerError):
    """A predicate refers to variables the chain does not declare."""

    def __init__(self, names: list[str], declared: list[str]) -> None:
        self.names = names
        self.declared = declared
        super().__init__(
            f"Unknown variable(s) {', '.join(names)}; chain declares {', '.join(declared)}",
            component="pctl",
        )


class QuerySyntaxError(AnalyzerError):
    """Malformed property text."""

    def __init__(self, message: str, offset: int) -> None:
        self.offset = offset
        super().__init__(f"{message} at offset {offset}", component="pctl")


class UnsupportedOperatorError(AnalyzerError):
    """Well-formed PCTL outside the supported P=?[F ...] fragment."""

    def __init__(self, operator: str, offset: int) -> None:
        self.operator = operator
        self.offset = offset
        super().__init__(
            f"Unsupported operator '{operator}' at offset {offset}; "
            "only P=?[F predicate] is supported",
            component="pctl",
        )


class DegenerateInputError(AnalyzerError):
    """Fit input that cannot determine the model parameters."""

    def __init__(self, message: str) -> None:
        super().__init__(message, component="curve-fit")


class ChainError(AnalyzerError):
    """Malformed Markov chain (usually an imported one)."""

    def __init__(self, message: str) -> None:
        super().__init__(message, component="dtmc")
