"""Entropy production and entropy production rates.

Two independent routes are provided for rates of the form
``-d/dt S(rho(t) || ref)``:

* finite differences of the relative-entropy series (``reduced_rate``);
* the exact derivative ``Tr[rho_dot (ln ref - ln rho)]`` with ``rho_dot``
  taken from the generator (``relative_entropy_rate``).  For the joint state
  and its stationary state this is the Spohn expression.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import EPS_LOG, hermitize, matrix_log, partial_trace, relative_entropy
from .correlations import mutual_information, mutual_information_series
from .dynamics import Trajectory, steady_state
from .model import ModelParams, apply_lindbladian, bath_beta, bath_gibbs_state, hamiltonian_s

TOL_RATE = 1e-8
IMAG_TOL = 1e-10
SINGULAR_EIG = 1e-12


class NearSingularWarning(UserWarning):
    """A log was evaluated on a (numerically) rank-deficient state."""


class CoarseGridWarning(UserWarning):
    pass


def _tr_prod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ji->...", a, b)


def is_near_singular(rho: np.ndarray, threshold: float = SINGULAR_EIG) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(np.asarray(rho, dtype=complex)))[..., 0] < threshold


def entropy_production(rho_t: np.ndarray, rho_0: np.ndarray, rho_ref: np.ndarray) -> float:
    """``S(rho_0 || ref) - S(rho_t || ref)``.

    With ``ref`` the bath Gibbs state this is the irreversible entropy
    production; infinities from support mismatch propagate.
    """
    return relative_entropy(rho_0, rho_ref) - relative_entropy(rho_t, rho_ref)


def entropy_production_first_law(rho_t, rho_0, h: np.ndarray, beta: float) -> float:
    """``Delta S - beta Delta Q`` with ``Q = Tr rho h``."""
    from .core import von_neumann_entropy

    ds = von_neumann_entropy(rho_t) - von_neumann_entropy(rho_0)
    dq = np.trace((rho_t - rho_0) @ h).real
    return ds - beta * dq


def relative_entropy_rate(rho_dot: np.ndarray, rho: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """``-d/dt S(rho || ref) = Tr[rho_dot (ln ref - ln rho)]`` (stack-aware).

    Exact when ``Tr rho_dot = 0``; ``ref`` is assumed full rank.
    """
    val = _tr_prod(rho_dot, matrix_log(ref) - matrix_log(rho))
    return val


def spohn_rate(apply_generator, rho: np.ndarray, rho_bar: np.ndarray) -> float:
    """``Tr{G(rho) (ln rho_bar - ln rho)}`` for a generator ``G``.

    Emits ``NearSingularWarning`` if ``rho`` is rank-deficient, since the
    logarithm is then dominated by the eigenvalue clamp.
    """
    rho = np.asarray(rho, dtype=complex)
    if bool(is_near_singular(rho)):
        warnings.warn("spohn_rate evaluated on a near-singular state", NearSingularWarning, stacklevel=2)
    val = complex(relative_entropy_rate(apply_generator(rho), rho, rho_bar))
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise ArithmeticError(f"Spohn rate has imaginary part {val.imag:.3e}")
    return val.real


def relative_entropy_series(states: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """``S(rho(t) || ref)`` along a stack of states (ref full rank)."""
    states = hermitize(np.asarray(states, dtype=complex))
    p = np.linalg.eigvalsh(states)
    neg_s = np.sum(np.where(p > EPS_LOG, p * np.log(np.where(p > EPS_LOG, p, 1.0)), 0.0), axis=-1)
    cross = _tr_prod(states, matrix_log(ref)).real
    return neg_s - cross


def time_derivative(times: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Second-order central differences, one-sided at the endpoints."""
    return np.gradient(np.asarray(series, dtype=float), np.asarray(times, dtype=float), edge_order=2)


def _truncation_estimate(times, series, deriv) -> float:
    # Richardson-style: compare against the derivative on every other point.
    if len(times) < 7:
        return 0.0
    coarse = np.gradient(series[::2], times[::2], edge_order=2)
    return float(np.max(np.abs(coarse[1:-1] - deriv[::2][1:-1])) / 3.0)


def reduced_rate(
    times: np.ndarray, states: np.ndarray, ref: np.ndarray, warn: bool = True, rel_tol: float = 1e-4
) -> np.ndarray:
    """``-d/dt S(rho(t) || ref)`` by finite differences of the relative entropy.

    Works for any series of states (reduced S or A, or joint).  A
    ``CoarseGridWarning`` is issued when the estimated truncation error
    exceeds ``rel_tol`` times the scale of the series.
    """
    t = np.asarray(times, dtype=float)
    s = relative_entropy_series(states, ref)
    return -series_rate(t, s, warn=warn, rel_tol=rel_tol)


def series_rate(times, series, warn: bool = True, rel_tol: float = 1e-4) -> np.ndarray:
    """Finite-difference time derivative of a scalar series with a coarse-grid check."""
    t = np.asarray(times, dtype=float)
    s = np.asarray(series, dtype=float)
    d = time_derivative(t, s)
    if warn:
        scale = max(float(np.max(np.abs(s))), 1e-300)
        err = _truncation_estimate(t, s, d)
        if err > rel_tol * scale:
            warnings.warn(
                f"finite-difference truncation error ~{err:.2e} exceeds {rel_tol:g} x series scale",
                CoarseGridWarning,
                stacklevel=2,
            )
    return d


def decomposition_check(rho_sa: np.ndarray, tau_s: np.ndarray, w_a: np.ndarray) -> float:
    """Residual of ``S(rho||tau (x) w) = I(rho) + S(rho_S||tau) + S(rho_A||w)``."""
    rho_sa = np.asarray(rho_sa, dtype=complex)
    lhs = relative_entropy(rho_sa, np.kron(tau_s, w_a))
    rhs = (
        mutual_information(rho_sa)
        + relative_entropy(partial_trace(rho_sa, "S"), tau_s)
        + relative_entropy(partial_trace(rho_sa, "A"), w_a)
    )
    return abs(lhs - rhs)


def heat(rho_s: np.ndarray, omega_s: float) -> float:
    """Mean energy ``Tr[rho_S omega_s sigma_z]`` of the system."""
    from .core import pauli

    return float(np.trace(np.asarray(rho_s) @ (omega_s * pauli("z"))).real)


@dataclass
class ThermoTrajectory:
    times: np.ndarray
    sigma_sa: np.ndarray
    sigma_s: np.ndarray
    sigma_a: np.ndarray
    mi_rate: np.ndarray
    mutual_info: np.ndarray
    entropy_production_s: np.ndarray
    heat_series: np.ndarray
    decomposition_residual: np.ndarray
    near_singular: np.ndarray
    reference_s: np.ndarray
    reference_a: np.ndarray
    thermodynamic: bool
    """True when the S reference equals the bath Gibbs state, so that sigma_s
    and the entropy production carry their thermodynamic meaning."""

    def decomposition_tolerance(self, abs_tol: float = 1e-6, rel_tol: float = 1e-3) -> np.ndarray:
        return np.maximum(abs_tol, rel_tol * np.abs(self.sigma_sa))


def thermo_trajectory(traj: Trajectory, p: ModelParams | None = None, reference=None, method: str = "exact") -> ThermoTrajectory:
    """Entropy production quantities along a joint trajectory.

    ``reference`` is the invariant joint state used by the Spohn rate; it
    defaults to the SVD steady state.  The S and A references are its
    marginals.  ``method="exact"`` differentiates with the generator,
    ``method="fd"`` uses finite differences of the series on the grid.
    """
    p = p if p is not None else traj.params
    if p is None:
        raise ValueError("model parameters are required")
    if reference is None:
        reference = steady_state(p).state
    tau_s = partial_trace(reference, "S")
    w_a = partial_trace(reference, "A")

    states = traj.states
    rho_s, rho_a = traj.reduced_s, traj.reduced_a
    rho_dot = apply_lindbladian(p, states)
    sigma_sa = relative_entropy_rate(rho_dot, states, reference)
    if np.max(np.abs(sigma_sa.imag), initial=0.0) > IMAG_TOL * max(1.0, np.max(np.abs(sigma_sa.real))):
        raise ArithmeticError("Spohn rate series has a significant imaginary part")
    sigma_sa = sigma_sa.real

    mi = mutual_information_series(states)
    if method == "exact":
        ds, da = partial_trace(rho_dot, "S"), partial_trace(rho_dot, "A")
        sigma_s = relative_entropy_rate(ds, rho_s, tau_s).real
        sigma_a = relative_entropy_rate(da, rho_a, w_a).real
        mi_rate = (
            -_tr_prod(ds, matrix_log(rho_s))
            - _tr_prod(da, matrix_log(rho_a))
            + _tr_prod(rho_dot, matrix_log(states))
        ).real
    elif method == "fd":
        t = traj.times
        sigma_s = reduced_rate(t, rho_s, tau_s, warn=False)
        sigma_a = reduced_rate(t, rho_a, w_a, warn=False)
        mi_rate = time_derivative(t, mi)
    else:
        raise ValueError(f"unknown method {method!r}")

    rel_s = relative_entropy_series(rho_s, tau_s)
    try:
        thermodynamic = bool(np.allclose(tau_s, bath_gibbs_state(p), atol=1e-10, rtol=0))
    except ValueError:
        thermodynamic = False

    return ThermoTrajectory(
        times=traj.times,
        sigma_sa=sigma_sa,
        sigma_s=sigma_s,
        sigma_a=sigma_a,
        mi_rate=mi_rate,
        mutual_info=mi,
        entropy_production_s=rel_s[0] - rel_s,
        heat_series=np.einsum("tij,ji->t", rho_s, hamiltonian_s(p)).real,
        decomposition_residual=np.abs(sigma_sa - (sigma_s + sigma_a - mi_rate)),
        near_singular=is_near_singular(states),
        reference_s=tau_s,
        reference_a=w_a,
        thermodynamic=thermodynamic,
    )


def first_law_series(traj: Trajectory, p: ModelParams) -> np.ndarray:
    """``Delta S - beta Delta Q`` of the system along a trajectory."""
    from .core import entropies

    beta = bath_beta(p)
    rho_s = traj.reduced_s
    s = entropies(rho_s)
    q = np.einsum("tij,ji->t", rho_s, hamiltonian_s(p)).real
    return (s - s[0]) - beta * (q - q[0])


def negative_windows(times, series, tol: float = 0.0) -> list[tuple[float, float, float]]:
    """Maximal intervals where ``series < -tol``: (t_start, t_end, minimum)."""
    t = np.asarray(times)
    x = np.asarray(series)
    neg = x < -tol
    out = []
    i = 0
    n = len(x)
    while i < n:
        if neg[i]:
            j = i
            while j + 1 < n and neg[j + 1]:
                j += 1
            out.append((float(t[i]), float(t[j]), float(x[i : j + 1].min())))
            i = j + 1
        else:
            i += 1
    return out
