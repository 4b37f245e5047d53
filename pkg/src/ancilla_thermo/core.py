"""Dense linear algebra for one- and two-qubit operators.

Basis conventions used everywhere in the package:

* single qubit: ``|0>`` (ground) first, ``|1>`` (excited) second;
* two qubits: ``S (x) A`` with the system as the first tensor factor, so the
  product basis is ``|00>, |01>, |10>, |11>``;
* ``sigma_z = |1><1| - |0><0|`` is +1 on the excited level, so that a
  Hamiltonian ``omega * sigma_z`` with ``omega > 0`` really has ``|0>`` as its
  ground state;
* ``sigma_+ = |1><0|`` and ``sigma_- = |0><1|``; with these choices
  ``[sigma_+, sigma_-] = +sigma_z``.

Density matrices are plain complex ``numpy`` arrays.  All entropies are in
nats unless a ``base`` is requested explicitly.
"""

from __future__ import annotations

import math

import numpy as np

EPS_LOG = 1e-14
"""Eigenvalue floor applied before taking logarithms."""

SUPPORT_TOL = 1e-12

_PAULI = {
    "identity": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}
_PAULI["i"] = _PAULI["identity"]


def pauli(name: str) -> np.ndarray:
    """Return a Pauli matrix (``"x"``, ``"y"``, ``"z"`` or ``"identity"``).

    ``y`` is fixed by ``sigma_x sigma_y = i sigma_z`` for the ``z`` above.
    """
    try:
        return _PAULI[name.lower()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli operator {name!r}") from None


def raising() -> np.ndarray:
    """``sigma_+ = |1><0|``."""
    return np.array([[0, 0], [1, 0]], dtype=complex)


def lowering() -> np.ndarray:
    """``sigma_- = |0><1|``."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product ``a (x) b`` of two single-qubit operators (S first)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 operators, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return ``(a + a^dagger) / 2``; works on stacks of matrices."""
    return 0.5 * (a + dagger(a))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def partial_trace(rho: np.ndarray, keep: str = "S") -> np.ndarray:
    """Reduce a two-qubit operator to one factor.

    ``keep="S"`` traces out the ancilla, ``keep="A"`` traces out the system.
    Stacks of shape ``(..., 4, 4)`` are reduced elementwise.
    """
    rho = np.asarray(rho)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"partial_trace expects 4x4 operators, got {rho.shape}")
    t = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    key = keep.upper()
    if key == "S":
        return np.einsum("...iaja->...ij", t)
    if key == "A":
        return np.einsum("...aiaj->...ij", t)
    raise ValueError(f"keep must be 'S' or 'A', got {keep!r}")


def _eigh_hermitian(a: np.ndarray):
    return np.linalg.eigh(hermitize(np.asarray(a, dtype=complex)))


def matrix_log(rho: np.ndarray, floor: float = EPS_LOG) -> np.ndarray:
    """Natural logarithm of a Hermitian matrix, eigenvalues clamped at ``floor``."""
    w, v = _eigh_hermitian(rho)
    w = np.log(np.maximum(w, floor))
    return (v * w[..., None, :]) @ dagger(v)


def matrix_function(a: np.ndarray, func) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its eigenbasis."""
    w, v = _eigh_hermitian(a)
    return (v * func(w)[..., None, :]) @ dagger(v)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def trace_norm(a: np.ndarray, tol: float = 1e-10) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    a = np.asarray(a, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if not is_hermitian(a, tol * scale):
        raise ValueError("trace_norm is only defined here for Hermitian operators")
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(a)))))


def _entropy_from_eigs(p: np.ndarray) -> float:
    p = p[p > EPS_LOG]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: np.ndarray, base: float | None = None) -> float:
    """von Neumann entropy ``-Tr rho ln rho`` (``0 ln 0 = 0``).

    ``base=2`` converts to bits; any other positive base is accepted too.
    """
    s = _entropy_from_eigs(np.linalg.eigvalsh(hermitize(np.asarray(rho, dtype=complex))))
    if base is None:
        return s
    return s / math.log(base)


def entropies(rhos: np.ndarray) -> np.ndarray:
    """Vectorised von Neumann entropy (nats) for a stack of states."""
    p = np.linalg.eigvalsh(hermitize(np.asarray(rhos, dtype=complex)))
    logs = np.log(np.where(p > EPS_LOG, p, 1.0))
    return -np.sum(np.where(p > EPS_LOG, p * logs, 0.0), axis=-1)


def relative_entropy(rho: np.ndarray, w: np.ndarray) -> float:
    """Umegaki relative entropy ``Tr rho ln rho - Tr rho ln w`` in nats.

    Returns ``math.inf`` when ``rho`` has weight outside the support of ``w``.
    """
    rho = hermitize(np.asarray(rho, dtype=complex))
    w = np.asarray(w, dtype=complex)
    if rho.shape != w.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {w.shape}")
    ww, vw = _eigh_hermitian(w)
    weights = np.real(np.einsum("ki,kl,li->i", vw.conj(), rho, vw))
    outside = ww <= EPS_LOG
    if np.any(weights[outside] > SUPPORT_TOL):
        return math.inf
    cross = float(np.sum(weights[~outside] * np.log(ww[~outside])))
    return -von_neumann_entropy(rho) - cross


def expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


# ---------------------------------------------------------------------------
# State construction and validation

def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-10,
    psd_tol: float = 1e-10,
) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise ValueError(f"density matrix must be 2x2 or 4x4, got shape {rho.shape}")
    if not is_hermitian(rho, herm_tol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace is {tr.real:.3e}, expected 1")
    lo = float(np.min(np.linalg.eigvalsh(hermitize(rho))))
    if lo < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def pure_state(vec) -> np.ndarray:
    psi = np.asarray(vec, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bloch_state(r) -> np.ndarray:
    """Single-qubit state ``(I + r . sigma) / 2``; requires ``|r| <= 1``."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if np.linalg.norm(r) > 1 + 1e-12:
        raise ValueError("Bloch vector lies outside the unit ball")
    return 0.5 * (_PAULI["identity"] + r[0] * _PAULI["x"] + r[1] * _PAULI["y"] + r[2] * _PAULI["z"])


_NAMED = {
    "g": [1, 0],
    "e": [0, 1],
    "plus": [1, 1],
    "minus": [1, -1],
}


def qubit_state(name: str) -> np.ndarray:
    """Named single-qubit states: ``g``, ``e``, ``plus``, ``minus``, ``mixed``.

    A comma separated triple such as ``"0.3,0,0.2"`` is read as a Bloch vector.
    """
    key = name.strip().lower()
    if key == "mixed":
        return 0.5 * np.eye(2, dtype=complex)
    if key in _NAMED:
        return pure_state(_NAMED[key])
    parts = key.split(",")
    if len(parts) == 3:
        try:
            return bloch_state([float(x) for x in parts])
        except ValueError as exc:
            raise ValueError(f"bad Bloch vector {name!r}: {exc}") from None
    raise ValueError(f"unknown state {name!r}")


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state (full rank unless ``rank`` is given)."""
    k = dim if rank is None else rank
    x = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return hermitize(x)
