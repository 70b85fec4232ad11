"""Exception types shared across the package."""

from __future__ import annotations


class HornLimitsError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HornLimitsError):
    """Input text violates the program / atom grammar."""

    def __init__(
        self,
        message: str,
        *,
        source: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.reason = message
        self.source = source
        self.line = line
        self.column = column
        super().__init__(self._format())

    def _format(self) -> str:
        where = ""
        if self.source is not None:
            where += f"{self.source}:"
        if self.line is not None:
            where += f"{self.line}:"
            if self.column is not None:
                where += f"{self.column}:"
        return f"{where} {self.reason}" if where else self.reason


class GoalClauseError(ParseError):
    """Headless clause. General clause syntax allows goals; this engine does not."""


class ArityError(ParseError):
    """A symbol is used with two different arities, or as both constant and functor."""

    def __init__(self, symbol: str, message: str, **where) -> None:
        self.symbol = symbol
        super().__init__(message, **where)


class NonFinitaryError(HornLimitsError):
    """Clause whose forward application can leave the head non-ground."""

    def __init__(self, clause, variable: str | None = None) -> None:
        self.clause = clause
        self.variable = variable
        detail = f" (variable {variable})" if variable else ""
        super().__init__(f"clause is not range-restricted{detail}: {clause}")


class UncertifiedProgramError(HornLimitsError):
    """Operation needs a program that passes both guard checks."""

    def __init__(self, report) -> None:
        self.report = report
        failing = [
            str(v.clause)
            for v in report.clauses
            if not (v.covered and v.range_restricted)
        ]
        super().__init__(
            "program is not certified (term coverage + range restriction); "
            "failing clauses: " + "; ".join(failing)
        )


class SchemaError(HornLimitsError):
    """Sequence schema file is malformed."""


class LimitUndefinedError(HornLimitsError):
    """The clause-set limit of the program sequence does not exist."""

    def __init__(self, obstruction) -> None:
        self.obstruction = obstruction
        super().__init__(
            f"sequence has no set-theoretic limit; oscillating clause: {obstruction}"
        )


class NotAFixedPointError(HornLimitsError):
    """Stability probing needs the reference interpretation to be a fixed point."""
