"""Trace-distance dynamics, revival detection and information backflow."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import hermitize, kron, partial_trace
from .dynamics import check_grid, evolve_superoperator
from .model import ModelParams, liouvillian_matrix

TOL_REV = 1e-9
TOL_MONO = 1e-7
MIN_WIDTH = 2


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """``0.5 * ||rho1 - rho2||_1``."""
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise ValueError(f"shape mismatch: {rho1.shape} vs {rho2.shape}")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho1 - rho2)))))


def trace_distances(rhos1: np.ndarray, rhos2: np.ndarray) -> np.ndarray:
    """Vectorised trace distance for two equally shaped stacks."""
    diff = hermitize(np.asarray(rhos1, dtype=complex) - np.asarray(rhos2, dtype=complex))
    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)), axis=-1)


@dataclass
class Revival:
    t_start: float
    t_end: float
    amplitude: float  # increase of the distance over the interval
    i_start: int
    i_end: int


def find_revivals(times, series, tol: float = TOL_REV, min_width: int = MIN_WIDTH) -> list[Revival]:
    """Maximal intervals on which the distance grows.

    A grid step ``k -> k+1`` counts as rising when its forward slope exceeds
    ``tol``.  Runs of at least ``min_width`` consecutive rising steps are
    reported with their net increase as amplitude.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(series, dtype=float)
    if t.size < 2:
        return []
    slope = np.diff(x) / np.diff(t)
    rising = slope > tol
    out: list[Revival] = []
    k = 0
    n = rising.size
    while k < n:
        if not rising[k]:
            k += 1
            continue
        j = k
        while j + 1 < n and rising[j + 1]:
            j += 1
        if j - k + 1 >= min_width:
            out.append(Revival(float(t[k]), float(t[j + 1]), float(x[j + 1] - x[k]), k, j + 1))
        k = j + 1
    return out


def monotonicity_violations(series, tol: float = TOL_MONO) -> np.ndarray:
    """Indices where the series exceeds its running minimum by more than ``tol``."""
    x = np.asarray(series, dtype=float)
    return np.flatnonzero(x - np.minimum.accumulate(x) > tol)


@dataclass
class DistanceTrajectory:
    times: np.ndarray
    d_sa: np.ndarray
    d_s: np.ndarray
    revivals: list[Revival] = field(default_factory=list)
    slope_sa: np.ndarray | None = None
    slope_s: np.ndarray | None = None

    @property
    def revival_intervals(self) -> list[tuple[float, float, float]]:
        return [(r.t_start, r.t_end, r.amplitude) for r in self.revivals]


def _slope(t, x):
    if len(t) < 3:
        return np.gradient(x, t) if len(t) > 1 else np.zeros_like(x)
    return np.gradient(x, t, edge_order=2)


def distance_trajectory(
    p: ModelParams, pair_s, rho_a0: np.ndarray, times, tol_rev: float = TOL_REV, lmat=None
) -> DistanceTrajectory:
    """Evolve ``rho1_S (x) rho_A0`` and ``rho2_S (x) rho_A0`` and record distances."""
    t = check_grid(times)
    rho1, rho2 = pair_s
    lmat = liouvillian_matrix(p) if lmat is None else lmat
    s1 = evolve_superoperator(lmat, kron(rho1, rho_a0), t)
    s2 = evolve_superoperator(lmat, kron(rho2, rho_a0), t)
    d_sa = trace_distances(s1, s2)
    d_s = trace_distances(partial_trace(s1, "S"), partial_trace(s2, "S"))
    return DistanceTrajectory(
        times=t,
        d_sa=d_sa,
        d_s=d_s,
        revivals=find_revivals(t, d_s, tol_rev),
        slope_sa=_slope(t, d_sa),
        slope_s=_slope(t, d_s),
    )


def backflow_summary(d: DistanceTrajectory) -> float:
    """Total distance increase over the revival intervals of ``d_s``."""
    return float(sum(r.amplitude for r in d.revivals))


@dataclass
class OverlapReport:
    revivals: list[tuple[float, float]]
    negative_windows: list[tuple[float, float]]
    revivals_with_negative: int
    negatives_with_revival: int


def _intersects(a, b) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def overlap_report(revivals, negative_windows) -> OverlapReport:
    """Pairwise overlap counts between revival and negative-rate intervals.

    Nothing is asserted about containment in either direction.
    """
    rv = [(r.t_start, r.t_end) if isinstance(r, Revival) else (r[0], r[1]) for r in revivals]
    nw = [(w[0], w[1]) for w in negative_windows]
    return OverlapReport(
        revivals=rv,
        negative_windows=nw,
        revivals_with_negative=sum(any(_intersects(r, w) for w in nw) for r in rv),
        negatives_with_revival=sum(any(_intersects(w, r) for r in rv) for w in nw),
    )
