"""Entropy loss, its diagonal reweighting, and outlier-influence analysis.

With residual M = X - U V^T and per-sample shares p_i = ||m_i|| / ||M||_{2,1},
the entropy loss is the Shannon entropy of the residue distribution scaled by
the total residue,

    L = H(M) * ||M||_{2,1} = - sum_i ||m_i|| * log( ||m_i|| / ||M||_{2,1} ).

Minimizing L concentrates residual mass on few samples (the outliers) while
shrinking the total. Its linearization yields the diagonal weights

    Q_ii = - log( ||m_i|| / ||M||_{2,1} ) / ||m_i||,

which plug into the weighted engine in `entnmf.core`. Every ||m_i|| is floored
at a guard epsilon before logs and divisions; natural log throughout (the base
only rescales the loss).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, FactorPair, ResidualWeights, guarded_norms, residual_matrix
from .errors import InputError, NumericalError

# Grid points whose denominator is closer to zero than this are removable
# singularities of the single-outlier share formula and are skipped.
_DENOM_CUTOFF = 1e-14


@dataclass(frozen=True)
class InfluenceReport:
    """Share of each method's objective contributed by one probed sample."""

    phi_nmf: float
    phi_l21: float
    phi_emmf: float
    sample_index: int


def default_epsilon(values: np.ndarray) -> float:
    """Guard scaled with data magnitude: 1e-10 * max(1, ||X||_F)."""
    return 1e-10 * max(1.0, float(np.linalg.norm(values)))


def entropy_weights(M: np.ndarray, epsilon: float) -> ResidualWeights:
    """Diagonal weights Q_ii = -log(||m_i|| / ||M||_{2,1}) / ||m_i||, guarded.

    Each guarded norm is at most the total, so every weight is nonnegative;
    a weight is zero exactly when its sample carries the entire residual mass
    (in particular for a single sample).
    """
    norms = guarded_norms(np.asarray(M, dtype=float), epsilon)
    total = float(np.sum(norms))
    q = -np.log(norms / total) / norms
    # log(1) may round to -0.0; a single sample carries all mass exactly.
    q = np.maximum(q, 0.0)
    return ResidualWeights(norms=norms, total=total, q=q, epsilon=epsilon)


def entropy_objective(X: DataMatrix, F: FactorPair, epsilon: float) -> float:
    """Entropy loss -sum_i ||m_i|| log(||m_i|| / ||M||_{2,1}) with guarded norms."""
    norms = guarded_norms(residual_matrix(X, F), epsilon)
    total = float(np.sum(norms))
    value = float(-np.sum(norms * np.log(norms / total)))
    if not np.isfinite(value):
        bad = int(np.argmax(~np.isfinite(norms * np.log(norms / total))))
        raise NumericalError(f"entropy objective is non-finite at sample {bad}")
    return max(value, 0.0)


def influence_ratios(X: DataMatrix, F: FactorPair, i: int) -> InfluenceReport:
    """Sample i's share of the squared-Frobenius, l2,1 and entropy objectives.

    For the entropy share, numerator and denominator are both negative for
    interior residue distributions, so the quotient is reported positive as is.
    The shares of each method over all samples sum to one.
    """
    M = residual_matrix(X, F)
    if not 0 <= i < X.n:
        raise InputError(f"sample index {i} outside [0, {X.n})")
    raw = np.sqrt(np.sum(M * M, axis=0))
    if float(np.sum(raw)) == 0.0:
        raise NumericalError("influence is undefined for an all-zero residual matrix")
    norms = np.maximum(raw, default_epsilon(X.values))
    total = float(np.sum(norms))
    weighted = norms * np.log(norms / total)
    denom = float(np.sum(weighted))
    if abs(denom) < _DENOM_CUTOFF:
        raise NumericalError("entropy share is undefined: residue distribution is degenerate")
    return InfluenceReport(
        phi_nmf=float(norms[i] ** 2 / np.sum(norms**2)),
        phi_l21=float(norms[i] / total),
        phi_emmf=float(weighted[i] / denom),
        sample_index=i,
    )


def single_outlier_share(p: float, n: int) -> float:
    """Entropy share of one outlier at residue ratio p, the rest uniform.

    phi(p) = p log p / (p log p + (1 - p) [log(1 - p) - log(n - 1)]).
    """
    return p * np.log(p) / (p * np.log(p) + (1.0 - p) * (np.log1p(-p) - np.log(n - 1)))


def influence_upper_bound(n: int, p_step: float) -> tuple[float, float]:
    """Maximum of the single-outlier entropy share over a p grid.

    Sweeps p in {p_step, 2 p_step, ...} inside (0, 1), skipping removable
    singularities where the denominator vanishes, and returns (bound, argmax p).
    """
    if n < 2:
        raise InputError(f"need at least 2 samples, got {n}")
    if not 0.0 < p_step < 1.0:
        raise InputError(f"p_step must lie in (0, 1), got {p_step}")
    best, best_p = -np.inf, None
    k = 1
    while k * p_step < 1.0 - 1e-12:
        p = k * p_step
        k += 1
        denom = p * np.log(p) + (1.0 - p) * (np.log1p(-p) - np.log(n - 1))
        if abs(denom) < _DENOM_CUTOFF:
            continue
        value = p * np.log(p) / denom
        if value > best:
            best, best_p = value, p
    return float(best), float(best_p)
