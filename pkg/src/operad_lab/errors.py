class OperadLabError(Exception):
    """Base class for every error raised by operad_lab."""


class DomainError(OperadLabError, ValueError):
    pass


class BackendError(OperadLabError, TypeError):
    """An operation was requested in a scalar backend that cannot support it."""


class PreconditionError(OperadLabError, ValueError):
    pass


class ValidationError(OperadLabError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceError(OperadLabError):
    pass


class NumericalError(OperadLabError, ArithmeticError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SamplingError(OperadLabError):
    pass


class ParseError(OperadLabError, ValueError):
    """Malformed input. ``line``/``column`` locate JSON syntax errors;
    ``path`` names the offending field of well-formed JSON."""

    def __init__(self, message, line=None, column=None, path=None):
        where = []
        if line is not None:
            where.append(f"line {line} column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.column = column
        self.path = path


class UsageError(OperadLabError):
    pass
