"""Two-qubit correlation quantifiers and the effective inverse temperature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import entropies, hermitize, kron, partial_trace, pauli, von_neumann_entropy

MI_NEG_TOL = 1e-10
OFFDIAG_TOL = 1e-8

_YY = kron(pauli("y"), pauli("y"))


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence from the spin-flipped density matrix."""
    rho = np.asarray(rho, dtype=complex)
    flipped = rho @ _YY @ rho.conj() @ _YY
    lam = np.sort(np.linalg.eigvals(flipped).real)[::-1]
    roots = np.sqrt(np.clip(lam, 0.0, None))
    return float(max(0.0, roots[0] - roots[1:].sum()))


def binary_entropy(x: float) -> float:
    """Shannon entropy of a Bernoulli(x) variable, in bits."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def eof(rho: np.ndarray) -> float:
    """Entanglement of formation in bits."""
    return eof_from_concurrence(concurrence(rho))


def mutual_information(rho: np.ndarray, base: float | None = None) -> float:
    """``S(rho_S) + S(rho_A) - S(rho_SA)``; nats by default.

    Tiny negative values from rounding are clamped to zero; anything below
    ``-MI_NEG_TOL`` means the input was not a valid state and raises.
    """
    rho = np.asarray(rho, dtype=complex)
    mi = (
        von_neumann_entropy(partial_trace(rho, "S"))
        + von_neumann_entropy(partial_trace(rho, "A"))
        - von_neumann_entropy(rho)
    )
    if mi < -MI_NEG_TOL:
        raise ValueError(f"mutual information {mi:.3e} is negative; input is not a state")
    mi = max(mi, 0.0)
    return mi if base is None else mi / math.log(base)


def mutual_information_series(states: np.ndarray) -> np.ndarray:
    """Vectorised mutual information (nats) along a stack of joint states."""
    states = hermitize(np.asarray(states, dtype=complex))
    return (
        entropies(partial_trace(states, "S"))
        + entropies(partial_trace(states, "A"))
        - entropies(states)
    )


def effective_beta(rho_q: np.ndarray, omega: float, tol_offdiag: float = OFFDIAG_TOL) -> float:
    """Inverse temperature at which a diagonal qubit state is Gibbs for ``omega sigma_z``.

    ``ln(p0 / p1) / (2 omega)``; ``math.inf`` when the excited population is
    zero.  States with coherences are rejected.
    """
    rho_q = np.asarray(rho_q, dtype=complex)
    if rho_q.shape != (2, 2):
        raise ValueError("effective_beta expects a single-qubit state")
    if omega == 0:
        raise ValueError("effective temperature undefined for omega = 0")
    if abs(rho_q[0, 1]) > tol_offdiag:
        raise ValueError(
            f"state has coherence {abs(rho_q[0, 1]):.3e}; effective temperature undefined"
        )
    p0, p1 = rho_q[0, 0].real, rho_q[1, 1].real
    if p1 <= 0.0:
        return math.inf
    if p0 <= 0.0:
        return -math.inf
    return math.log(p0 / p1) / (2.0 * omega)


@dataclass
class CorrelationRecord:
    concurrence: float
    eof: float
    mutual_info: float  # nats
    beta_eff_s: float | None  # None: undefined (coherent marginal)
    beta_eff_a: float | None

    def mutual_info_in(self, base: float | None) -> float:
        return self.mutual_info if base is None else self.mutual_info / math.log(base)


def _maybe_beta(rho_q, omega):
    try:
        return effective_beta(rho_q, omega)
    except ValueError:
        return None


def correlation_record(rho: np.ndarray, omega_s: float, omega_a: float) -> CorrelationRecord:
    c = concurrence(rho)
    return CorrelationRecord(
        concurrence=c,
        eof=eof_from_concurrence(c),
        mutual_info=mutual_information(rho),
        beta_eff_s=_maybe_beta(partial_trace(rho, "S"), omega_s),
        beta_eff_a=_maybe_beta(partial_trace(rho, "A"), omega_a),
    )
