"""Positive linear intermediate subsystem ``x' = A x + b u``.

``A`` must be Metzler and Hurwitz and ``b`` strictly positive, which makes the
positive orthant forward invariant and ``e^{At}`` elementwise nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NonPositiveInput, NotHurwitz, NotMetzler, SingularMatrix, ValidationError

HURWITZ_MARGIN = -1e-9


@dataclass(frozen=True, eq=False)
class LinearSubsystem:
    A: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(np.linalg.eigvals(self.A).real))

    def gain(self) -> np.ndarray:
        """``-A^{-1} b``, the steady state per unit input."""
        return steady_state(self, 1.0)


def validate(A, b) -> LinearSubsystem:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"A must be square, got shape {A.shape}")
    if A.shape[0] != b.shape[0]:
        raise ValidationError(f"b has length {b.shape[0]}, A is {A.shape[0]}x{A.shape[0]}")
    if A.shape[0] < 1:
        raise ValidationError("empty subsystem")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValidationError("A and b must be finite")
    n = A.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j and A[i, j] < 0:
                raise NotMetzler(i, j, float(A[i, j]))
    abscissa = float(np.max(np.linalg.eigvals(A).real))
    if not abscissa < HURWITZ_MARGIN:
        raise NotHurwitz(abscissa)
    for i, bi in enumerate(b):
        if not bi > 0:
            raise NonPositiveInput(i, float(bi))
    A.setflags(write=False)
    b.setflags(write=False)
    return LinearSubsystem(A, b)


def steady_state(sys: LinearSubsystem, u: float) -> np.ndarray:
    """Solve ``A x = -b u``."""
    if not u > 0:
        raise ValidationError(f"input must be positive, got {u!r}")
    try:
        x = np.linalg.solve(sys.A, -sys.b * u)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("nonfinite steady state")
    return x


def transition(sys: LinearSubsystem, t: float) -> np.ndarray:
    """``e^{At}``."""
    return expm(sys.A * t)


def propagate(sys: LinearSubsystem, u: float, x0, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form state and input sensitivity at time ``t``.

    Returns ``(x, p)`` with ``p = A^{-1}(e^{At} - I) b`` and ``x = e^{At} x0 + u p``.
    """
    if t < 0:
        raise ValidationError(f"t must be nonnegative, got {t!r}")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != sys.n:
        raise ValidationError(f"x0 has length {x0.shape[0]}, expected {sys.n}")
    if np.any(x0 < 0):
        raise ValidationError("x0 must be elementwise nonnegative")
    # exp([[A, b], [0, 0]] t) = [[e^{At}, p(t)], [0, 1]]; avoids cancellation in e^{At} - I
    n = sys.n
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = sys.A
    M[:n, n] = sys.b
    F = expm(M * t)
    E, p = F[:n, :n], F[:n, n].copy()
    return E @ x0 + u * p, p
