"""Exception hierarchy shared by every module.

Errors fall in two families: usage errors (bad names, unparsable input)
and semantic errors (an operation that is well-formed but not allowed by
the automaton's rules).  The CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class ATError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(ATError):
    """A request that refers to things that do not exist."""


class SemanticError(ATError):
    """A well-formed request that the semantics forbids."""


class UnknownName(UsageError, KeyError):
    def __init__(self, kind: str, name: str):
        self.kind = kind
        self.name = name
        super().__init__(f"unknown {kind} {name!r}")

    def __str__(self) -> str:  # KeyError would otherwise repr() the message
        return self.args[0]


class ParseError(UsageError):
    def __init__(self, line: int, col: int, msg: str):
        self.line = line
        self.col = col
        self.msg = msg
        super().__init__(f"line {line}, column {col}: {msg}")


class ValidationError(SemanticError):
    """Raised when a model fails validation; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = [f"{v.rule} at {v.locus}: {v.message}" for v in report.violations]
        super().__init__("invalid automaton:\n  " + "\n  ".join(lines))


class StepError(SemanticError):
    """Base for failures of a single step of a run.

    ``index`` is the 1-based position of the failing step inside a word
    (the delay before action k and action k share index k; the final
    delay has index n+1).  It is ``None`` when the step was attempted
    outside of a word.
    """

    index: int | None = None

    def at_index(self, index: int) -> "StepError":
        self.index = index
        return self

    def __str__(self) -> str:
        base = super().__str__()
        return base if self.index is None else f"step {self.index}: {base}"


class UndefinedTransition(StepError):
    def __init__(self, state: str, action):
        self.state = state
        self.action = action
        super().__init__(f"no transition from {state} on {action}")


class DelayTooLarge(StepError):
    def __init__(self, timer: str, value, delay):
        self.timer = timer
        self.value = value
        self.delay = delay
        super().__init__(f"delay {delay} exceeds timer {timer} = {value}")


class TimeoutNotRipe(StepError):
    def __init__(self, timer: str, value):
        self.timer = timer
        self.value = value
        super().__init__(f"timer {timer} has value {value}, cannot time out")


class NegativeDelay(StepError):
    def __init__(self, delay):
        self.delay = delay
        super().__init__(f"negative delay {delay}")


class NotPadded(SemanticError):
    pass


class InfeasibleMove(SemanticError):
    pass


class NoSlack(SemanticError):
    pass


class ValueExceedsC(SemanticError):
    pass


class PendingDiscards(SemanticError):
    pass


class NotPending(SemanticError):
    pass


class MalformedWord(SemanticError):
    pass


class AnchorHasActiveTimers(SemanticError):
    pass


class MalformedLBTM(SemanticError):
    pass
