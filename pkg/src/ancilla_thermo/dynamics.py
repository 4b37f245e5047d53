"""Time evolution under the master equation and its stationary states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import hermitize, kron, partial_trace
from .model import (
    ModelParams,
    bath_beta,
    gibbs_state,
    hamiltonian_a,
    hamiltonian_s,
    liouvillian_matrix,
    unvec,
    vec,
)

RTOL = 1e-9
ATOL = 1e-12
NULL_REL_TOL = 1e-10


class IntegrationError(RuntimeError):
    """Raised when the ODE solver gives up; ``t_fail`` is where it stopped."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t={t_fail:.6g})")
        self.t_fail = t_fail


class SteadyStateError(RuntimeError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, 4, 4)
    params: ModelParams | None = None
    reduced_s: np.ndarray = field(init=False, repr=False)
    reduced_a: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.reduced_s = partial_trace(self.states, "S")
        self.reduced_a = partial_trace(self.states, "A")

    def __len__(self) -> int:
        return len(self.times)


def check_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("time grid must be a non-empty 1-d array")
    if t[0] != 0.0:
        raise ValueError("time grid must start at t=0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def make_grid(t_max: float, n_steps: int, t_fine: float = 0.0, dt_fine: float = 1e-3) -> np.ndarray:
    """Time grid on ``[0, t_max]``.

    With ``t_fine > 0`` the interval ``[0, t_fine]`` is sampled with spacing
    ``dt_fine`` and the rest with ``n_steps`` uniform steps.
    """
    if t_max <= 0 or n_steps < 1:
        raise ValueError("need t_max > 0 and n_steps >= 1")
    if t_fine <= 0 or t_fine >= t_max:
        return np.linspace(0.0, t_max, n_steps + 1)
    n_fine = max(1, int(round(t_fine / dt_fine)))
    head = np.linspace(0.0, t_fine, n_fine + 1)
    tail = np.linspace(t_fine, t_max, n_steps + 1)[1:]
    return np.concatenate([head, tail])


def evolve_superoperator(
    lmat: np.ndarray, rho0: np.ndarray, times, rtol: float = RTOL, atol: float = ATOL
) -> np.ndarray:
    """Integrate ``d vec(rho)/dt = lmat @ vec(rho)`` and return the states.

    Uses the explicit embedded Runge-Kutta pair DOP853 with dense output on
    the requested grid.  Each output state is re-Hermitised.
    """
    t = check_grid(times)
    rho0 = np.asarray(rho0, dtype=complex)
    dim = rho0.shape[0]
    y0 = vec(rho0)
    if t.size == 1:
        return rho0[None].copy()

    def rhs(_t, y):
        return lmat @ y

    sol = solve_ivp(
        rhs, (t[0], t[-1]), y0, method="DOP853", t_eval=t, rtol=rtol, atol=atol
    )
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else float(t[0])
        raise IntegrationError(sol.message, t_fail)
    states = unvec(sol.y.T, dim)
    return hermitize(states)


def evolve(p: ModelParams, rho0: np.ndarray, times, rtol: float = RTOL, atol: float = ATOL) -> Trajectory:
    """Solve the master equation for the joint S+A state on the grid ``times``."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (4, 4):
        raise ValueError("evolve expects a 4x4 joint state")
    t = check_grid(times)
    states = evolve_superoperator(liouvillian_matrix(p), rho0, t, rtol, atol)
    return Trajectory(times=t, states=states, params=p)


def evolve_product(p: ModelParams, rho_s0: np.ndarray, rho_a0: np.ndarray, times, **kw) -> Trajectory:
    return evolve(p, kron(rho_s0, rho_a0), times, **kw)


@dataclass
class SteadyState:
    state: np.ndarray
    null_dim: int
    residual: float
    singular_values: np.ndarray = field(repr=False, default=None)

    @property
    def unique(self) -> bool:
        return self.null_dim == 1


def null_space(lmat: np.ndarray, rel_tol: float = NULL_REL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Right null vectors (columns) of ``lmat`` from its SVD, and all singular values."""
    _, s, vh = np.linalg.svd(lmat)
    cut = rel_tol * s[0]
    mask = s <= cut
    return vh[mask].conj().T, s


def steady_state(p: ModelParams, rel_tol: float = NULL_REL_TOL) -> SteadyState:
    """Stationary state of the Liouvillian via its SVD null space.

    With a degenerate null space the identity is projected onto it, which
    gives a valid (unit-trace, positive) invariant state for the block
    structures of this model; ``null_dim`` reports the degeneracy.
    """
    lmat = liouvillian_matrix(p)
    basis, s = null_space(lmat, rel_tol)
    k = basis.shape[1]
    if k == 0:
        raise SteadyStateError(
            f"no null vector found (smallest singular value {s[-1]:.3e}, "
            f"threshold {rel_tol * s[0]:.3e})"
        )
    ident = vec(np.eye(4, dtype=complex))
    v = basis @ (basis.conj().T @ ident)
    rho = hermitize(unvec(v, 4))
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise SteadyStateError("null vector has vanishing trace")
    rho = rho / tr
    residual = float(np.max(np.abs(lmat @ vec(rho))))
    return SteadyState(state=rho, null_dim=k, residual=residual, singular_values=s)


def ancilla_beta(p: ModelParams) -> float:
    """Effective ancilla inverse temperature ``beta * omega_s / omega_a``."""
    if p.omega_a == 0:
        raise ValueError("omega_a must be nonzero")
    return bath_beta(p) * p.omega_s / p.omega_a


def product_steady_state(p: ModelParams, tol: float = 1e-12) -> np.ndarray:
    """Factorised stationary state for exchange-symmetric coupling.

    ``Gibbs(H_S, beta) (x) Gibbs(H_A, beta * omega_s / omega_a)``; only valid
    for ``j_x == j_y``.
    """
    if abs(p.j_x - p.j_y) > tol:
        raise ValueError("product steady state requires j_x == j_y")
    beta = bath_beta(p)
    return kron(gibbs_state(hamiltonian_s(p), beta), gibbs_state(hamiltonian_a(p), ancilla_beta(p)))


def relaxation_time(p: ModelParams, target: float = 1e-6, prefactor: float = 10.0) -> float:
    """Rough time after which deviations from stationarity fall below ``target``.

    Based on the slowest nonzero Liouvillian decay rate; ``prefactor`` absorbs
    the unknown overlap of the initial state with the slow modes.
    """
    ev = np.linalg.eigvals(liouvillian_matrix(p))
    rates = -ev.real
    rates = rates[rates > 1e-9]
    if rates.size == 0:
        raise SteadyStateError("no decaying modes")
    return float(np.log(prefactor / target) / rates.min())
