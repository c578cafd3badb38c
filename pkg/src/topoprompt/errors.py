"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); numeric
and runtime failures derive from :class:`NumericError` (CLI exit code 1).
"""


class TopoPromptError(Exception):
    pass


class InputError(TopoPromptError, ValueError):
    pass


class NumericError(TopoPromptError, ArithmeticError):
    pass


class DimensionError(InputError):
    pass


class ValidationError(InputError):
    pass


class SnapshotFormatError(InputError):
    """Malformed snapshot file. ``row``/``column`` are 1-based when known."""

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class SnapshotParseError(SnapshotFormatError):
    pass


class GuardError(InputError):
    pass


class UndefinedEntropyError(NumericError):
    pass


class DegenerateDensityError(NumericError):
    pass


class SingularGradientError(NumericError):
    pass


class UndefinedCorrelationError(NumericError):
    pass


class EvolutionAborted(NumericError):
    """Raised by :func:`topoprompt.evolve.descend`; ``records`` ends with the
    last valid step."""

    def __init__(self, message, records):
        super().__init__(message)
        self.records = records


class DivergenceError(EvolutionAborted):
    pass


class CoincidentPointsError(EvolutionAborted):
    pass
