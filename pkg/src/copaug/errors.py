class CopaugError(Exception):
    """Base class for every error raised by the toolkit."""

    def __reduce__(self):
        # subclasses take structured arguments; rebuild from message + attributes
        return (_rebuild, (type(self), str(self), self.__dict__))


def _rebuild(cls, message, state):
    err = cls.__new__(cls)
    Exception.__init__(err, message)
    err.__dict__.update(state)
    return err


class MissingColumn(CopaugError, ValueError):
    def __init__(self, name: str):
        super().__init__(f"column {name!r} not found")
        self.name = name


class EmptyFile(CopaugError, ValueError):
    def __init__(self, path: object):
        super().__init__(f"{path}: file is empty or has no header row")
        self.path = path


class MalformedRow(CopaugError, ValueError):
    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} fields, got {got}")
        self.line = line


class UnreadableFile(CopaugError, ValueError):
    def __init__(self, path: object, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path


class AllRowsDropped(CopaugError, ValueError):
    def __init__(self):
        super().__init__("no rows left after dropping missing targets")


class AllMissingColumn(CopaugError, ValueError):
    def __init__(self, name: str):
        super().__init__(f"column {name!r} has no observed values")
        self.name = name


class TooFewRows(CopaugError, ValueError):
    def __init__(self, n: int, minimum: int):
        super().__init__(f"need at least {minimum} rows, got {n}")
        self.n = n
        self.minimum = minimum


class DegreeTooLarge(CopaugError, ValueError):
    def __init__(self, n_columns: int, cap: int):
        super().__init__(f"expansion would produce {n_columns} columns (cap {cap})")
        self.n_columns = n_columns
        self.cap = cap


class NonFiniteInput(CopaugError, ValueError):
    def __init__(self, what: str):
        super().__init__(f"{what} contains missing or non-finite values")
        self.what = what


class NotFitted(CopaugError, RuntimeError):
    def __init__(self, what: str = "model"):
        super().__init__(f"{what} is not fitted")


class SchemaMismatch(CopaugError, ValueError):
    def __init__(self, expected: tuple[str, ...], got: tuple[str, ...]):
        super().__init__(f"schema mismatch: expected {list(expected)}, got {list(got)}")
        self.expected = expected
        self.got = got


class EmptyInput(CopaugError, ValueError):
    def __init__(self, what: str = "input"):
        super().__init__(f"{what} is empty")


class DimensionMismatch(CopaugError, ValueError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} features, got {got}")
        self.expected = expected
        self.got = got


class SingularSystem(CopaugError, ArithmeticError):
    def __init__(self):
        super().__init__("normal equations are singular; use alpha > 0")


class BadK(CopaugError, ValueError):
    def __init__(self, k: int, n: int):
        super().__init__(f"k={k} folds is invalid for n={n} rows (need 2 <= k <= n)")
        self.k = k
        self.n = n


class LengthMismatch(CopaugError, ValueError):
    def __init__(self, left: int, right: int):
        super().__init__(f"length mismatch: {left} != {right}")
        self.left = left
        self.right = right


class EmptySample(CopaugError, ValueError):
    def __init__(self, what: str = "sample"):
        super().__init__(f"{what} is empty or too small")


class InvalidParameter(CopaugError, ValueError):
    def __init__(self, name: str, value: object, reason: str = ""):
        msg = f"invalid {name}={value!r}"
        super().__init__(f"{msg}: {reason}" if reason else msg)
        self.name = name
        self.value = value


class ConfigError(CopaugError, ValueError):
    pass


class ModelFormatError(CopaugError, ValueError):
    def __init__(self, path: object, expected: str):
        super().__init__(f"{path}: not a {expected!r} model file")
        self.path = path
        self.expected = expected


class ReportFormatError(CopaugError, ValueError):
    def __init__(self, path: object, reason: str):
        super().__init__(f"{path}: not a usable report ({reason})")
        self.path = path


class ReportIoError(CopaugError, OSError):
    def __init__(self, path: object, cause: BaseException | None = None):
        detail = f": {cause}" if cause else ""
        super().__init__(f"cannot write {path}{detail}")
        self.path = path


class StageError(CopaugError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
