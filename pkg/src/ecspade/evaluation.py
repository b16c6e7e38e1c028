"""Empirical ROC curves and their scalar summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, OutOfRange

SUMMARY_PFAS = (1e-3, 1e-2, 1e-1)


@dataclass(frozen=True, eq=False)
class RocCurve:
    pfa: np.ndarray
    pd: np.ndarray
    auc: float
    n0: int
    n1: int

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.pfa, self.pd])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RocCurve):
            return NotImplemented
        return (self.n0 == other.n0 and self.n1 == other.n1 and self.auc == other.auc
                and np.array_equal(self.pfa, other.pfa) and np.array_equal(self.pd, other.pd))


def roc(h0_scores, h1_scores) -> RocCurve:
    """Empirical ROC with one vertex per distinct score value.

    The threshold sweeps the pooled scores from high to low; a pixel is
    declared a detection when its score is >= the threshold. Tied scores move
    together, so the trapezoidal area equals the Mann-Whitney statistic with
    half credit for ties.
    """
    h0 = np.asarray(h0_scores, dtype=float).ravel()
    h1 = np.asarray(h1_scores, dtype=float).ravel()
    if h0.size == 0 or h1.size == 0:
        raise EmptyInput("both score sets must be nonempty")
    if np.isnan(h0).any() or np.isnan(h1).any():
        raise ValueError("scores contain NaN")
    thresholds = np.unique(np.concatenate([h0, h1]))[::-1]
    s0, s1 = np.sort(h0), np.sort(h1)
    # counts of scores >= each threshold
    c0 = h0.size - np.searchsorted(s0, thresholds, side="left")
    c1 = h1.size - np.searchsorted(s1, thresholds, side="left")
    pfa = np.concatenate([[0.0], c0 / h0.size])
    pd = np.concatenate([[0.0], c1 / h1.size])
    # trapezoid on integer counts keeps the area exact up to the final divide
    n0c = np.concatenate([[0], c0]).astype(np.float64)
    n1c = np.concatenate([[0], c1]).astype(np.float64)
    area = np.sum(np.diff(n0c) * (n1c[1:] + n1c[:-1])) / 2.0
    auc = float(area / (h0.size * h1.size))
    return RocCurve(pfa=pfa, pd=pd, auc=auc, n0=h0.size, n1=h1.size)


def pd_at_pfa(curve: RocCurve, pfa: float) -> float:
    """Detection rate at a given false-alarm rate by linear interpolation.

    Where the curve has a vertical step exactly at ``pfa`` the top of the step
    is returned.
    """
    if not 0.0 <= pfa <= 1.0:
        raise OutOfRange(f"pfa must lie in [0, 1], got {pfa}")
    x, y = curve.pfa, curve.pd
    i = int(np.searchsorted(x, pfa, side="right")) - 1
    if x[i] == pfa or i == len(x) - 1:
        return float(y[i])
    frac = (pfa - x[i]) / (x[i + 1] - x[i])
    return float(y[i] + frac * (y[i + 1] - y[i]))


def auc_pairwise(h0_scores, h1_scores) -> float:
    """O(n0*n1) Mann-Whitney AUC with half credit for ties (reference value)."""
    h0 = np.asarray(h0_scores, dtype=float).ravel()
    h1 = np.asarray(h1_scores, dtype=float).ravel()
    if h0.size == 0 or h1.size == 0:
        raise EmptyInput("both score sets must be nonempty")
    wins = 0
    ties = 0
    for chunk in np.array_split(h1, max(1, h1.size // 512)):
        diff = chunk[:, None] - h0[None, :]
        wins += int(np.count_nonzero(diff > 0))
        ties += int(np.count_nonzero(diff == 0))
    return (wins + 0.5 * ties) / (h0.size * h1.size)


def thin(curve: RocCurve, n_points: int) -> RocCurve:
    """Resample a curve on a fixed pFA grid (log-spaced below 1e-2, linear above).

    Used to keep CSV output small. The summary false-alarm rates are always on
    the grid, and the AUC is carried over from the full curve.
    """
    if n_points <= 0 or curve.pfa.size <= n_points:
        return curve
    floor = max(1.0 / curve.n0, 1e-6)
    n_log = n_points // 2
    grid = np.unique(np.concatenate([
        [0.0], SUMMARY_PFAS, np.geomspace(floor, 1e-2, n_log),
        np.linspace(1e-2, 1.0, n_points - n_log)]))
    pd = np.array([pd_at_pfa(curve, p) for p in grid])
    pfa, pd = np.concatenate([[0.0], grid]), np.concatenate([[0.0], pd])
    keep = np.concatenate([[True], (np.diff(pfa) != 0) | (np.diff(pd) != 0)])
    return RocCurve(pfa=pfa[keep], pd=pd[keep], auc=curve.auc, n0=curve.n0, n1=curve.n1)
