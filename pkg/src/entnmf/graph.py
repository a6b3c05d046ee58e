"""Similarity graphs and the graph-regularized coefficient update.

The graph term lambda * ||S - V V^T||_F^2 on a degree-normalized similarity
graph softly couples the coefficient rows of neighboring samples. Its
multiplicative update absorbs the orthogonality multiplier through the split

    L5 = V^T Q X^T U + 2 lambda V^T S V - V^T Q V U^T U = L5+ - L5-,
    L5- = V^T Q V U^T U,    L5+ = V^T Q X^T U + 2 lambda V^T S V,

both parts elementwise nonnegative, giving

    V_ik <- V_ik * sqrt( (Q X^T U + 2 lambda S V + V L5-)_ik
                       / (Q V U^T U + V L5+)_ik ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DELTA, DataMatrix, FactorPair, ResidualWeights, _check_finite
from .errors import InputError


@dataclass(frozen=True)
class SimilarityGraph:
    """Symmetric nonnegative n x n affinity, optionally degree-normalized."""

    S: np.ndarray
    normalized: bool = False
    k: int = 0

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        object.__setattr__(self, "S", S)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise InputError(f"similarity graph must be square, got shape {S.shape}")
        if not np.array_equal(S, S.T):
            raise InputError("similarity graph must be exactly symmetric")
        if S.min() < 0:
            raise InputError("similarity graph must be nonnegative")

    @property
    def n(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class MultiplierSplit:
    """Nonnegative parts of the orthogonality multiplier, L5 = plus - minus."""

    lambda_minus: np.ndarray
    lambda_plus: np.ndarray


def knn_graph(X: DataMatrix, k: int) -> SimilarityGraph:
    """0-1 weighted k-nearest-neighbor graph on the samples (columns) of X.

    S_ij = 1 if j is among the k Euclidean nearest neighbors of i or vice
    versa. The diagonal is excluded from the search and left zero; distance
    ties are broken toward the lower sample index for determinism.
    """
    n = X.n
    if not 1 <= k < n:
        raise InputError(f"neighbor count {k} outside [1, {n - 1}]")
    P = X.values
    sq = np.sum(P * P, axis=0)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (P.T @ P)
    d2 = 0.5 * (d2 + d2.T)  # restore exact symmetry lost to rounding
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    A = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k)
    A[rows, order[:, :k].ravel()] = 1.0
    return SimilarityGraph(S=np.maximum(A, A.T), normalized=False, k=k)


def normalize_graph(graph: SimilarityGraph) -> SimilarityGraph:
    """Degree normalization S <- D^{-1/2} S D^{-1/2}.

    Isolated vertices (zero degree) keep their zero row and column instead of
    dividing by zero. The normalized flag guards against double application:
    an already-normalized graph is returned unchanged.
    """
    if graph.normalized:
        return graph
    deg = np.sum(graph.S, axis=1)
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    S = graph.S * inv_sqrt[:, None] * inv_sqrt[None, :]
    S = 0.5 * (S + S.T)
    return SimilarityGraph(S=S, normalized=True, k=graph.k)


def multiplier_split(
    X: DataMatrix,
    F: FactorPair,
    w: ResidualWeights,
    graph: SimilarityGraph,
    lam: float,
) -> MultiplierSplit:
    """Whole-term split of the orthogonality multiplier (not entrywise)."""
    if not graph.normalized:
        raise InputError("graph must be normalized before the multiplier split")
    if graph.n != X.n:
        raise InputError(f"graph has {graph.n} vertices but data has {X.n} samples")
    if lam < 0:
        raise InputError(f"graph weight must be nonnegative, got {lam}")
    q = w.q
    minus = F.V.T @ (q[:, None] * (F.V @ (F.U.T @ F.U)))
    plus = F.V.T @ (q[:, None] * (X.values.T @ F.U)) + 2.0 * lam * (F.V.T @ (graph.S @ F.V))
    return MultiplierSplit(lambda_minus=minus, lambda_plus=plus)


def gemmf_update_coeff(
    X: DataMatrix,
    F: FactorPair,
    w: ResidualWeights,
    graph: SimilarityGraph,
    lam: float,
) -> np.ndarray:
    """Graph-regularized multiplicative step on V; zeros stay zero."""
    if not graph.normalized:
        raise InputError("graph must be normalized before the coefficient update")
    if graph.n != X.n or F.V.shape[0] != X.n or F.U.shape[0] != X.d:
        raise InputError("shapes of data, factors and graph disagree")
    if lam < 0:
        raise InputError(f"graph weight must be nonnegative, got {lam}")
    q = w.q
    A = q[:, None] * (X.values.T @ F.U)          # Q X^T U
    B = q[:, None] * (F.V @ (F.U.T @ F.U))       # Q V U^T U
    SV = graph.S @ F.V
    minus = F.V.T @ B                            # L5-
    plus = F.V.T @ A + 2.0 * lam * (F.V.T @ SV)  # L5+
    numer = A + 2.0 * lam * SV + F.V @ minus
    denom = B + F.V @ plus
    with np.errstate(invalid="ignore", divide="ignore"):
        return _check_finite(F.V * np.sqrt(numer / (denom + DELTA)), "V")
