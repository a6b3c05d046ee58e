"""Clustering quality measures: label-matched accuracy and normalized mutual
information, plus a small aggregate for repeated runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError


@dataclass(frozen=True)
class MetricSummary:
    acc_mean: float
    acc_std: float
    nmi_mean: float
    nmi_std: float
    runs: int


def _as_labels(a, name):
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{name} must be a non-empty 1-D label array, got shape {arr.shape}")
    return arr


def _contingency(pred, truth):
    pred_ids, pred_idx = np.unique(pred, return_inverse=True)
    truth_ids, truth_idx = np.unique(truth, return_inverse=True)
    table = np.zeros((pred_ids.size, truth_ids.size), dtype=np.int64)
    np.add.at(table, (pred_idx, truth_idx), 1)
    return table


def hungarian_match(pred, truth):
    """Best one-to-one map from predicted cluster ids to true labels.

    Maximizes total overlap; the cost matrix is zero-padded to square so the
    label sets may differ in size. Returns {pred id: truth label}."""
    pred = _as_labels(pred, "pred")
    truth = _as_labels(truth, "truth")
    if pred.size != truth.size:
        raise InputError(f"label arrays differ in length: {pred.size} vs {truth.size}")
    pred_ids = np.unique(pred)
    truth_ids = np.unique(truth)
    table = _contingency(pred, truth)
    size = max(pred_ids.size, truth_ids.size)
    cost = np.zeros((size, size), dtype=np.int64)
    cost[: pred_ids.size, : truth_ids.size] = -table
    rows, cols = linear_sum_assignment(cost)
    mapping = {}
    for r, c in zip(rows, cols):
        if r < pred_ids.size and c < truth_ids.size:
            mapping[pred_ids[r]] = truth_ids[c]
    return mapping


def accuracy(pred, truth) -> float:
    """Fraction of samples whose matched predicted label equals the truth."""
    pred = _as_labels(pred, "pred")
    truth = _as_labels(truth, "truth")
    if pred.size != truth.size:
        raise InputError(f"label arrays differ in length: {pred.size} vs {truth.size}")
    mapping = hungarian_match(pred, truth)
    matched = np.array([mapping.get(p, None) == t for p, t in zip(pred, truth)])
    return float(matched.mean())


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the entropies.

    Natural logarithms throughout. If both partitions are single-cluster the
    score is 1.0 (they agree trivially); if exactly one is single-cluster the
    score is 0.0. The result is clipped to [0, 1] to absorb rounding."""
    pred = _as_labels(pred, "pred")
    truth = _as_labels(truth, "truth")
    if pred.size != truth.size:
        raise InputError(f"label arrays differ in length: {pred.size} vs {truth.size}")
    n = pred.size
    table = _contingency(pred, truth).astype(float)
    joint = table / n
    p_pred = joint.sum(axis=1)
    p_truth = joint.sum(axis=0)
    h_pred = float(-np.sum(p_pred * np.log(p_pred, where=p_pred > 0, out=np.zeros_like(p_pred))))
    h_truth = float(-np.sum(p_truth * np.log(p_truth, where=p_truth > 0, out=np.zeros_like(p_truth))))
    if h_pred == 0.0 and h_truth == 0.0:
        return 1.0
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0
    outer = np.outer(p_pred, p_truth)
    mask = joint > 0
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / outer[mask])))
    return float(np.clip(mi / np.sqrt(h_pred * h_truth), 0.0, 1.0))


def summarize(acc_values, nmi_values) -> MetricSummary:
    """Means and population standard deviations over repeated runs."""
    acc_values = np.asarray(acc_values, dtype=float)
    nmi_values = np.asarray(nmi_values, dtype=float)
    if acc_values.size == 0 or acc_values.size != nmi_values.size:
        raise InputError("need equal, nonzero counts of accuracy and NMI values")
    return MetricSummary(
        acc_mean=float(acc_values.mean()),
        acc_std=float(acc_values.std()),
        nmi_mean=float(nmi_values.mean()),
        nmi_std=float(nmi_values.std()),
        runs=int(acc_values.size),
    )
