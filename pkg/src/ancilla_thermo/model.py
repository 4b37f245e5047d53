"""Hamiltonian, dissipator and Liouvillian of the system + ancilla model.

The system qubit S is damped by a bath through the jump operators
``sigma_- (x) 1`` (rate ``gamma``) and ``sigma_+ (x) 1`` (rate ``big_gamma``);
the ancilla A only couples to S through the exchange Hamiltonian.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import dagger, kron, lowering, pauli, raising

_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants in units with hbar = k_B = 1."""

    omega_s: float = 1.0
    omega_a: float = 1.0
    j_x: float = 1.0
    j_y: float = 1.0
    j_z: float = 0.0
    gamma: float = 10.0
    big_gamma: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v}")
        if self.gamma < 0 or self.big_gamma < 0:
            raise ValueError("dissipation rates must be nonnegative")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def uncoupled(self) -> "ModelParams":
        return self.replace(j_x=0.0, j_y=0.0, j_z=0.0)

    @property
    def exchange_symmetric(self) -> bool:
        return abs(self.j_x - self.j_y) <= 1e-12

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


PARAM_NAMES = tuple(f.name for f in dataclasses.fields(ModelParams))


def hamiltonian_s(p: ModelParams) -> np.ndarray:
    return p.omega_s * pauli("z")


def hamiltonian_a(p: ModelParams) -> np.ndarray:
    return p.omega_a * pauli("z")


def hamiltonian_interaction(p: ModelParams) -> np.ndarray:
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    return p.j_x * kron(sx, sx) + p.j_y * kron(sy, sy) + p.j_z * kron(sz, sz)


def hamiltonian_total(p: ModelParams) -> np.ndarray:
    """``H_S (x) 1 + 1 (x) H_A + H_I`` on the S (x) A space."""
    return kron(hamiltonian_s(p), _I2) + kron(_I2, hamiltonian_a(p)) + hamiltonian_interaction(p)


def jump_operators(p: ModelParams) -> list[tuple[float, np.ndarray]]:
    """(rate, operator) pairs of the bath acting on S."""
    return [(p.gamma, kron(lowering(), _I2)), (p.big_gamma, kron(raising(), _I2))]


def hamiltonian_part(p: ModelParams, rho: np.ndarray) -> np.ndarray:
    h = hamiltonian_total(p)
    return -1j * (h @ rho - rho @ h)


def dissipator_part(p: ModelParams, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho, dtype=complex)
    for rate, op in jump_operators(p):
        if rate == 0:
            continue
        opd = dagger(op)
        n = opd @ op
        out = out + rate * (op @ rho @ opd - 0.5 * (n @ rho + rho @ n))
    return out


def apply_lindbladian(p: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation, ``L(rho)``.

    Accepts a single 4x4 matrix or a stack ``(..., 4, 4)``.
    """
    rho = np.asarray(rho, dtype=complex)
    return hamiltonian_part(p, rho) + dissipator_part(p, rho)


# ---------------------------------------------------------------------------
# Vectorisation.  Column stacking: vec(A X B) = (B^T (x) A) vec(X).

def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    d = dim or int(round(math.sqrt(v.shape[-1])))
    if v.ndim == 1:
        return v.reshape(d, d, order="F")
    # stacks: (..., d*d) -> (..., d, d)
    return np.swapaxes(v.reshape(v.shape[:-1] + (d, d)), -1, -2)


def superop_left(a: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> a X``."""
    return np.kron(np.eye(a.shape[0]), a)


def superop_right(b: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> X b``."""
    return np.kron(b.T, np.eye(b.shape[0]))


def lindblad_superoperator(h: np.ndarray, jumps) -> np.ndarray:
    """Column-stacked superoperator of ``-i[h, .] + sum_k rate_k D[L_k]``."""
    lmat = -1j * (superop_left(h) - superop_right(h))
    for rate, op in jumps:
        if rate == 0:
            continue
        n = dagger(op) @ op
        lmat = lmat + rate * (
            np.kron(op.conj(), op) - 0.5 * superop_left(n) - 0.5 * superop_right(n)
        )
    return lmat


def liouvillian_matrix(p: ModelParams) -> np.ndarray:
    """16x16 matrix with ``L_hat @ vec(rho) == vec(apply_lindbladian(p, rho))``."""
    return lindblad_superoperator(hamiltonian_total(p), jump_operators(p))


def trace_functional(dim: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(X) == Tr X``."""
    return vec(np.eye(dim)).astype(complex)


# ---------------------------------------------------------------------------
# Thermodynamics of the bath

def bath_beta(p: ModelParams) -> float:
    """Inverse bath temperature ``ln(gamma / big_gamma) / (2 omega_s)``.

    Negative values (population inversion, ``big_gamma > gamma``) are returned
    unchanged.
    """
    if p.omega_s == 0:
        raise ValueError("bath temperature undefined for omega_s = 0")
    if p.gamma <= 0 or p.big_gamma <= 0:
        raise ValueError("bath temperature needs gamma > 0 and big_gamma > 0")
    return math.log(p.gamma / p.big_gamma) / (2.0 * p.omega_s)


def gibbs_state(h: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-beta h) / Tr exp(-beta h)`` for Hermitian ``h``."""
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - dagger(h))) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise ValueError("gibbs_state needs a Hermitian operator")
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    x = -beta * w
    x = x - np.max(x)
    p = np.exp(x)
    p = p / p.sum()
    return (v * p) @ dagger(v)


def bath_gibbs_state(p: ModelParams) -> np.ndarray:
    """Gibbs state of ``H_S`` at the bath temperature."""
    return gibbs_state(hamiltonian_s(p), bath_beta(p))


def stationary_excited_population(p: ModelParams) -> float:
    """Excited population of the bare S channel, ``big_gamma / (gamma + big_gamma)``."""
    return p.big_gamma / (p.gamma + p.big_gamma)


__all__ = [
    "ModelParams",
    "PARAM_NAMES",
    "apply_lindbladian",
    "bath_beta",
    "bath_gibbs_state",
    "dissipator_part",
    "gibbs_state",
    "hamiltonian_a",
    "hamiltonian_interaction",
    "hamiltonian_part",
    "hamiltonian_s",
    "hamiltonian_total",
    "jump_operators",
    "lindblad_superoperator",
    "liouvillian_matrix",
    "stationary_excited_population",
    "trace_functional",
    "unvec",
    "vec",
]
