"""Exception hierarchy.

Every error raised on bad input derives from :class:`ThresholdError`, so
callers (the CLI in particular) can separate input problems from bugs.
"""


class ThresholdError(ValueError):
    pass


# dataset construction
class DimensionMismatch(ThresholdError):
    pass


class ScoreOutOfRange(ThresholdError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"score {value!r} at (sample {row}, subtask {col}) is outside [0, 1]")


class DuplicateSubtaskName(ThresholdError):
    pass


class InvalidSubtaskName(ThresholdError):
    pass


class InvalidLabel(ThresholdError):
    pass


class EmptyDataset(ThresholdError):
    pass


class DegenerateLabels(ThresholdError):
    """Recall-at-precision fitting needs at least one positive label."""


# decision expressions
class ExpressionSyntaxError(ThresholdError):
    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownSubtask(ThresholdError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown subtask {name!r}")


class EmptyExpression(ThresholdError):
    pass


# numerics
class EmptyMap(ThresholdError):
    pass


class LengthMismatch(ThresholdError):
    pass


class WidthOutOfRange(ThresholdError):
    pass


class NonFiniteGradient(ArithmeticError):
    pass


class TooManySubtasks(ThresholdError):
    pass


# file input
class ParseError(ThresholdError):
    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class MissingLabelColumn(ParseError):
    pass


class InconsistentKeys(ParseError):
    pass


class NonNumericScore(ParseError):
    pass


class ConfigError(ThresholdError):
    pass
