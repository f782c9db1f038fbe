"""
Exception hierarchy. Every error carries the process exit code the CLI uses:
1 usage/config, 2 data, 3 numeric failure.
"""
from __future__ import annotations


class ForesightError(Exception):
    exit_code = 3


# ---------- Usage / config (exit 1) ----------


class ConfigError(ForesightError):
    exit_code = 1


# ---------- Data (exit 2) ----------


class DataError(ForesightError):
    exit_code = 2


class SeriesTooShort(DataError):
    def __init__(self, length: int, required: int):
        super().__init__(
            f"series has {length} points, at least {required} are required"
        )
        self.length = length
        self.required = required

    def __reduce__(self):
        return (type(self), (self.length, self.required))


class DegenerateDifference(DataError):
    def __init__(self, index: int):
        # index is 1-based, pointing at y_i of the pair (y_{i-1}, y_i)
        super().__init__(f"y_i + y_(i-1) == 0 at index {index}")
        self.index = index

    def __reduce__(self):
        return (type(self), (self.index,))


class CsvFormatError(DataError):
    def __init__(self, path: str, line: int, detail: str):
        super().__init__(f"{path}:{line}: {detail}")
        self.detail = detail
        self.path = path
        self.line = line

    def __reduce__(self):
        return (type(self), (self.path, self.line, self.detail))


class EmptyDataset(DataError):
    pass


class TooFewPatterns(DataError):
    pass


class MissingLabels(DataError):
    pass


class DegenerateTestSet(DataError):
    pass


# ---------- Numeric (exit 3) ----------


class NumericError(ForesightError):
    exit_code = 3


class GeneratorDivergence(NumericError):
    pass


class InputDimension(NumericError, ValueError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} inputs, got {got}")
        self.expected = expected
        self.got = got

    def __reduce__(self):
        return (type(self), (self.expected, self.got))


class ShapeMismatch(NumericError, ValueError):
    pass


class DegenerateCorrelation(NumericError):
    pass


class DegenerateSamples(NumericError):
    pass


class FoldFailed(ForesightError):
    """Wraps an error raised while processing one rolling window."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", NumericError.exit_code)

    # rebuilt with its arguments when crossing a process boundary
    def __reduce__(self):
        return (type(self), (self.fold, self.cause))
