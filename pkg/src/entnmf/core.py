"""Core domain types and the shared weighted multiplicative-update engine.

The data matrix X (d features x n samples, columns are samples) is
approximated as X ~ U V^T with U (d x c) and V (n x c) elementwise
nonnegative. The engine minimizes the weighted quadratic

    Tr(M Q M^T) = sum_i Q_ii ||m_i||_2^2,    M = X - U V^T,

for a caller-supplied diagonal weight Q >= 0, via the multiplicative rules

    U_ik <- U_ik * sqrt( (X Q V)_ik / (U V^T Q V)_ik ),
    V_ik <- V_ik * sqrt( (Q X^T U)_ik / (Q V U^T U)_ik ).

Different choices of Q realize different losses behind one kernel:
Q = I gives the Frobenius objective, Q_ii = 1/(2||m_i||) the l2,1 objective,
and the entropy weights (see `entnmf.losses`) the entropy objective.
Every denominator carries an additive guard `DELTA` against 0/0; exact zeros
in a factor are preserved by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError

# Additive guard on multiplicative-rule denominators. Keeps fixed points
# within ~DELTA of exact.
DELTA = 1e-12


@dataclass(frozen=True)
class DataMatrix:
    """Nonnegative d x n sample matrix, columns are samples."""

    values: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InputError(f"data matrix must be 2-D and non-empty, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("data matrix contains non-finite entries")
        if values.min() < 0:
            i, j = np.unravel_index(int(np.argmin(values)), values.shape)
            raise InputError(f"data matrix must be nonnegative, entry ({i},{j}) = {values[i, j]}")
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            object.__setattr__(self, "labels", labels)
            if labels.shape != (values.shape[1],):
                raise InputError(
                    f"labels must have one entry per sample ({values.shape[1]}), got {labels.shape}"
                )

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class FactorPair:
    """Nonnegative basis U (d x c) and coefficients V (n x c)."""

    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if U.ndim != 2 or V.ndim != 2 or U.shape[1] != V.shape[1]:
            raise InputError(f"factor shapes disagree: U {U.shape}, V {V.shape}")
        c = U.shape[1]
        if not 1 <= c <= min(U.shape[0], V.shape[0]):
            raise InputError(f"centroid count {c} outside [1, min(d, n)] for U {U.shape}, V {V.shape}")
        if U.min() < 0 or V.min() < 0:
            raise InputError("factors must be elementwise nonnegative")

    @property
    def c(self) -> int:
        return self.U.shape[1]


@dataclass(frozen=True)
class ResidualWeights:
    """Per-sample residual norms and the diagonal weights Q they induce.

    norms are guarded below by epsilon, total is their sum, and q holds the
    diagonal of Q. All q entries are nonnegative because each guarded norm is
    at most the total.
    """

    norms: np.ndarray
    total: float
    q: np.ndarray
    epsilon: float

    def __post_init__(self):
        norms = np.asarray(self.norms, dtype=float)
        q = np.asarray(self.q, dtype=float)
        object.__setattr__(self, "norms", norms)
        object.__setattr__(self, "q", q)
        if self.epsilon <= 0:
            raise InputError(f"epsilon must be positive, got {self.epsilon}")
        if norms.ndim != 1 or q.shape != norms.shape:
            raise InputError("norms and q must be 1-D vectors of equal length")
        if norms.min() < self.epsilon:
            raise InputError("residual norms must be guarded below by epsilon")
        total = float(np.sum(norms))
        if abs(total - self.total) > 1e-12 * max(total, 1.0):
            raise InputError(f"total {self.total} does not match sum of norms {total}")
        if q.min() < 0:
            raise InputError("diagonal weights must be nonnegative")


@dataclass
class ConvergenceTrace:
    """Objective values per iteration for one fit; objective[0] is the initial value."""

    objective: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0

    def __post_init__(self):
        if len(self.objective) != self.iterations + 1:
            raise InputError(
                f"trace length {len(self.objective)} must equal iterations + 1 = {self.iterations + 1}"
            )


def column_norms(M: np.ndarray) -> np.ndarray:
    """Euclidean norm of each column of M."""
    return np.sqrt(np.sum(M * M, axis=0))


def guarded_norms(M: np.ndarray, epsilon: float) -> np.ndarray:
    """Column norms floored at epsilon, the guard used by all weight formulas."""
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    return np.maximum(column_norms(M), epsilon)


def residual_matrix(X: DataMatrix, F: FactorPair) -> np.ndarray:
    """Residual M = X - U V^T; may contain negative entries."""
    if F.U.shape[0] != X.d or F.V.shape[0] != X.n:
        raise InputError(
            f"factor shapes U {F.U.shape}, V {F.V.shape} do not match data {X.values.shape}"
        )
    return X.values - F.U @ F.V.T


def _check_finite(A: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(A)):
        raise NumericalError(f"non-finite entries produced while updating {what}")
    return A


def update_basis(X: DataMatrix, F: FactorPair, w: ResidualWeights) -> np.ndarray:
    """One multiplicative step on U for the weighted quadratic objective.

    U_ik <- U_ik * sqrt( (X Q V)_ik / (U (V^T Q V))_ik ). Returns a new array;
    zeros in U stay zero, and X = U V^T is a fixed point up to the guard.
    """
    if F.U.shape[0] != X.d or F.V.shape[0] != X.n or w.q.shape[0] != X.n:
        raise InputError("shapes of data, factors and weights disagree")
    q = w.q
    numer = (X.values * q[None, :]) @ F.V
    denom = F.U @ ((F.V * q[:, None]).T @ F.V)
    with np.errstate(invalid="ignore", divide="ignore"):
        return _check_finite(F.U * np.sqrt(numer / (denom + DELTA)), "U")


def update_coeff(X: DataMatrix, F: FactorPair, w: ResidualWeights) -> np.ndarray:
    """One multiplicative step on V for the weighted quadratic objective.

    V_ik <- V_ik * sqrt( (Q X^T U)_ik / (Q V (U^T U))_ik ). Q being diagonal,
    the only shape-consistent reading of the denominator is Q (V (U^T U)).
    """
    if F.U.shape[0] != X.d or F.V.shape[0] != X.n or w.q.shape[0] != X.n:
        raise InputError("shapes of data, factors and weights disagree")
    q = w.q
    numer = q[:, None] * (X.values.T @ F.U)
    denom = q[:, None] * (F.V @ (F.U.T @ F.U))
    with np.errstate(invalid="ignore", divide="ignore"):
        return _check_finite(F.V * np.sqrt(numer / (denom + DELTA)), "V")


def trace_objective(X: DataMatrix, F: FactorPair, w: ResidualWeights) -> float:
    """Weighted quadratic surrogate Tr(M Q M^T) = sum_i Q_ii ||m_i||_2^2."""
    if not np.all(np.isfinite(w.q)):
        raise InputError("weights must be finite")
    M = residual_matrix(X, F)
    return float(np.sum(w.q * np.sum(M * M, axis=0)))
