"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class IFFMError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(IFFMError, ValueError):
    """Input failed a structural check."""


class NotMetzler(ValidationError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"A[{i}][{j}] = {value!r} < 0 (off-diagonal entries must be nonnegative)")


class NotHurwitz(ValidationError):
    def __init__(self, abscissa: float):
        self.abscissa = abscissa
        super().__init__(f"spectral abscissa {abscissa:.6g} is not below -1e-9")


class NonPositiveInput(ValidationError):
    def __init__(self, index: int, value: float):
        self.index, self.value = index, value
        super().__init__(f"b[{index}] = {value!r} is not strictly positive")


class SingularMatrix(IFFMError, ArithmeticError):
    pass


class DomainViolation(IFFMError, ArithmeticError):
    """A guarded denominator fell below the configured floor."""

    def __init__(self, t: float, detail: str = ""):
        self.t = t
        msg = f"domain violation at t={t:.6g}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class StepFailure(IFFMError, ArithmeticError):
    def __init__(self, t: float, h: float):
        self.t, self.h = t, h
        super().__init__(f"step size {h:.3g} underflowed at t={t:.6g}")


class UnsupportedKind(IFFMError, ValueError):
    pass


class MissingVerdict(IFFMError, KeyError):
    pass


class ConfigError(IFFMError, ValueError):
    """Malformed experiment configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
