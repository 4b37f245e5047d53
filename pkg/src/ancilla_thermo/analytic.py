"""Closed-form treatment of the resonant, exchange-symmetric model.

Valid for ``j_x == j_y``, ``j_z == 0`` and ``omega_s == omega_a = omega``.
The coupling enters through ``J = 8 j_x``.

Element labels follow the excited-first convention of the closed forms, in which index
``0`` is the *excited* level: the element ``rho^{ijkl} = <ij|rho|kl>`` is
our ``rho[(1-i)(1-j), (1-k)(1-l)]`` in the package basis (ground first).

The five lambda functions parametrise the reduced map of S for an ancilla
started in ``I/2``.  With ``z = Tr sigma_z rho_S`` and ``c = <0|rho_S|1>``,

    z(t) = a(t) + b(t) z(0),    a = (l2 + l3 + l5) / 2,  b = (l2 + l4 - l5) / 2,
    c(t) = l1(t) exp(2 i omega t) c(0).

Two time-local generators are offered.  ``form="printed"`` evaluates the
rate combinations in their original closed form.  ``form="exact"`` is rebuilt from the
map above and reproduces the reduced dynamics; see ``exact_tcl_rates``.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import hermitize, lowering, pauli, raising
from .dynamics import ATOL, RTOL, check_grid
from .model import ModelParams, hamiltonian_s

DELTA_TOL = 1e-12
DENOM_TOL = 1e-12
IMAG_TOL = 1e-9
RESTRICT_TOL = 1e-12

ELEMENT_LABELS = ("0000", "0001", "0010", "0011", "0101", "0110", "0111", "1010", "1011")


class DegenerateDeltaError(ValueError):
    """``eta == J``: the closed forms have a removable singularity there."""


class RestrictionError(ValueError):
    pass


class SingularGeneratorError(ArithmeticError):
    pass


def check_restriction(p: ModelParams, tol: float = RESTRICT_TOL) -> float:
    """Validate the parameter restriction and return ``J = 8 j_x``."""
    bad = []
    if abs(p.j_x - p.j_y) > tol:
        bad.append("j_x != j_y")
    if abs(p.j_z) > tol:
        bad.append("j_z != 0")
    if abs(p.omega_s - p.omega_a) > tol:
        bad.append("omega_s != omega_a")
    if bad:
        raise RestrictionError("closed forms need " + ", ".join(s.replace("!=", "==") for s in bad))
    return 8.0 * p.j_x


# ---------------------------------------------------------------------------
# Element equations


def _index(label: str) -> tuple[int, int]:
    b = [1 - int(c) for c in label]
    return 2 * b[0] + b[1], 2 * b[2] + b[3]


_IDX = {lab: _index(lab) for lab in ELEMENT_LABELS}


def matrix_to_elements(rho: np.ndarray) -> np.ndarray:
    """The nine independent elements, in ``ELEMENT_LABELS`` order."""
    rho = np.asarray(rho)
    return np.array([rho[_IDX[lab]] for lab in ELEMENT_LABELS], dtype=complex)


def elements_to_matrix(v) -> np.ndarray:
    """Rebuild the 4x4 state from the nine elements via Hermiticity and unit trace."""
    v = np.asarray(v, dtype=complex)
    rho = np.zeros((4, 4), dtype=complex)
    for lab, x in zip(ELEMENT_LABELS, v):
        i, j = _IDX[lab]
        rho[i, j] = x
        rho[j, i] = np.conj(x)
    for lab in ("0000", "0101", "1010"):
        i, _ = _IDX[lab]
        rho[i, i] = rho[i, i].real
    k = _index("1111")[0]
    rho[k, k] = 1.0 - (rho[_IDX["0000"]] + rho[_IDX["0101"]] + rho[_IDX["1010"]]).real
    return rho


def element_rhs(p: ModelParams, v) -> np.ndarray:
    """Time derivatives of the nine independent elements."""
    big_j = check_restriction(p)
    g, gg, w = p.gamma, p.big_gamma, p.omega_s
    jq = big_j / 4.0
    x = dict(zip(ELEMENT_LABELS, np.asarray(v, dtype=complex)))
    flow = 1j * jq * (np.conj(x["0110"]) - x["0110"])
    return np.array(
        [
            -g * x["0000"] + gg * x["1010"],
            1j * jq * x["0010"] - (2j * w + g) * x["0001"] + gg * x["1011"],
            -(0.5 * (g + gg) + 2j * w) * x["0010"] + 1j * jq * x["0001"],
            -0.5 * (g + gg + 8j * w) * x["0011"],
            -(g + gg) * x["0101"] + gg * (1 - x["0000"] - x["1010"]) - flow,
            1j * jq * (x["0101"] - x["1010"]) - 0.5 * (g + gg) * x["0110"],
            -(0.5 * (g + gg) + 2j * w) * x["0111"] - 1j * jq * x["1011"],
            g * x["0000"] - gg * x["1010"] + flow,
            -1j * jq * x["0111"] - (2j * w + gg) * x["1011"] + g * x["0001"],
        ]
    )


def reduced_element_rhs(p: ModelParams, rho_sa: np.ndarray) -> np.ndarray:
    """``(d/dt rho_S^{00}, d/dt rho_S^{01})`` in the excited-first labelling."""
    big_j = check_restriction(p)
    g, gg, w = p.gamma, p.big_gamma, p.omega_s
    jq = big_j / 4.0
    x = dict(zip(ELEMENT_LABELS, matrix_to_elements(rho_sa)))
    rs = np.einsum("iaja->ij", np.asarray(rho_sa).reshape(2, 2, 2, 2))
    s00, s01 = rs[1, 1], rs[1, 0]
    return np.array(
        [
            gg - (g + gg) * s00 - 1j * jq * (np.conj(x["0110"]) - x["0110"]),
            -0.5 * (g + gg + 4j * w) * s01 + 1j * jq * (x["0001"] - x["1011"]),
        ]
    )


def integrate_elements(p: ModelParams, rho0: np.ndarray, times, rtol=RTOL, atol=ATOL) -> np.ndarray:
    """Integrate the element equations; returns the stack of 4x4 states."""
    t = check_grid(times)
    check_restriction(p)
    v0 = matrix_to_elements(rho0)

    def rhs(_t, y):
        d = element_rhs(p, y[:9] + 1j * y[9:])
        return np.concatenate([d.real, d.imag])

    sol = solve_ivp(rhs, (t[0], t[-1]), np.concatenate([v0.real, v0.imag]), method="DOP853",
                    t_eval=t, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise RuntimeError(sol.message)
    return np.array([elements_to_matrix(y[:9] + 1j * y[9:]) for y in sol.y.T])


# ---------------------------------------------------------------------------
# Lambda functions

_corruption = {"scale": 0.0}


@contextlib.contextmanager
def corrupted_lambdas(scale: float = 0.05):
    """Test hook: scale ``l1`` by ``1 + scale`` inside the block (negative control)."""
    old = _corruption["scale"]
    _corruption["scale"] = scale
    try:
        yield
    finally:
        _corruption["scale"] = old


@dataclass
class AnalyticCoefficients:
    t: np.ndarray
    eta: float
    delta: float
    omega_plus: complex
    omega_minus: complex
    sigma_plus: complex
    sigma_minus: complex
    lam: np.ndarray  # (5, ...) real
    lam_dot: np.ndarray
    imag_residue: float
    b: np.ndarray  # z(t) = a + b z(0); equals (l2 + l4 - l5) / 2
    b_dot: np.ndarray
    gamma_s: np.ndarray | None = None  # printed rates (4, ...)
    d_denom: np.ndarray | None = None
    singular: np.ndarray | None = None

    @property
    def a(self):
        return 0.5 * (self.lam[1] + self.lam[2] + self.lam[4])

    @property
    def a_dot(self):
        return 0.5 * (self.lam_dot[1] + self.lam_dot[2] + self.lam_dot[4])



def _complex_lambdas(t, gamma, big_gamma, big_j):
    t = np.asarray(t, dtype=float)
    eta = gamma + big_gamma
    delta = eta**2 - big_j**2
    if abs(delta) < DELTA_TOL:
        raise DegenerateDeltaError(
            f"degenerate Delta: eta={eta:g} equals J={big_j:g}; closed forms are not evaluated there"
        )
    s = np.sqrt(complex(delta))
    om_p = eta**2 - big_j**2 / 2 + eta * s
    om_m = eta**2 - big_j**2 / 2 - eta * s
    sg_p, sg_m = eta + s, eta - s

    h = -0.5 * eta * t
    e = np.exp(h)
    ep = np.exp(-0.5 * sg_p * t)  # exp(-(eta + s) t / 2)
    em = np.exp(-0.5 * sg_m * t)

    # 2 Omega_pm = Sigma_pm^2 and Re Sigma_pm = eta > 0, so the principal
    # roots are sqrt(Omega_pm) = Sigma_pm / sqrt(2).  The sinh/cosh form of l1
    # then collapses to two exponentials; evaluating it literally loses all
    # relative accuracy once l1 has decayed (see lambda1_literal).
    fp = np.exp(-(0.5 * eta + 0.25 * sg_m) * t)
    fm = np.exp(-(0.5 * eta + 0.25 * sg_p) * t)
    l1 = (sg_p * fp - sg_m * fm) / (2 * s)
    dl1 = (-sg_p * (0.5 * eta + 0.25 * sg_m) * fp + sg_m * (0.5 * eta + 0.25 * sg_p) * fm) / (2 * s)

    s3 = s**3
    g, gg, j2 = gamma, big_gamma, big_j**2
    l2 = (s * eta * (gg - g) + g * eta * (sg_p * ep - sg_m * em)) / s3
    dl2 = -g * eta * (sg_p**2 * ep - sg_m**2 * em) / (2 * s3)

    esh = 0.5 * (em - ep)  # exp(-eta t/2) sinh(s t/2)
    l3 = j2 * (s * (g - gg) + 2 * g * (eta * esh - s * e)) / (s3 * eta)
    desh = 0.25 * (sg_p * ep - sg_m * em)
    dl3 = 2 * g * j2 * (eta * desh + 0.5 * s * eta * e) / (s3 * eta)

    l4 = (j2 / eta) * ((g - gg) / (2 * delta) * (em - 2 * e + ep) - l2 / eta)
    dl4 = (j2 / eta) * (
        (g - gg) / (2 * delta) * (-0.5 * sg_m * em + eta * e - 0.5 * sg_p * ep) - dl2 / eta
    )

    l5 = 2 * j2 * gg * e / (delta * eta) + (gg - g) / eta - gg * (s * (ep - em) + eta * (ep + em)) / delta
    dl5 = -j2 * gg * e / delta + gg * (sg_p**2 * ep + sg_m**2 * em) / (2 * delta)

    scale = _corruption["scale"]
    if scale:
        l1 = l1 * (1 + scale)
        dl1 = dl1 * (1 + scale)
    lam = np.array([l1, l2, l3, l4, l5])
    lam_dot = np.array([dl1, dl2, dl3, dl4, dl5])
    # b = (l2 + l4 - l5) / 2 in closed form, free of the O(1) cancellations
    b = (om_p * ep + om_m * em - j2 * e) / (2 * delta)
    db = -(om_p * sg_p * ep + om_m * sg_m * em - j2 * eta * e) / (4 * delta)
    return t, eta, delta, om_p, om_m, sg_p, sg_m, lam, lam_dot, b, db


def lambda1_literal(t, gamma: float, big_gamma: float, big_j: float) -> np.ndarray:
    """``l1`` evaluated term by term from its sinh/cosh form (reference only).

    Accurate while ``l1`` is not much smaller than ``exp(-(eta/2 - q) t)``.
    """
    t = np.asarray(t, dtype=float)
    eta = gamma + big_gamma
    delta = eta**2 - big_j**2
    s = np.sqrt(complex(delta))
    om_p = eta**2 - big_j**2 / 2 + eta * s
    om_m = eta**2 - big_j**2 / 2 - eta * s
    rp, rm = np.sqrt(om_p), np.sqrt(om_m)
    e = np.exp(-0.5 * eta * t)
    k = 2 * math.sqrt(2)
    return (
        e * (rm * np.sinh(t * rp / k) - rp * np.sinh(t * rm / k)) / np.sqrt(2 * delta + 0j)
        + e * ((eta + s) * np.cosh(t * rm / k) - (eta - s) * np.cosh(t * rp / k)) / (2 * s)
    )


def lambda_functions(t, gamma: float, big_gamma: float, big_j: float) -> AnalyticCoefficients:
    """Evaluate the lambda functions and their time derivatives.

    Complex arithmetic with principal square roots is used throughout and
    real parts are returned.  For ``eta > J`` the imaginary residue must stay
    below ``IMAG_TOL``.
    """
    t, eta, delta, om_p, om_m, sg_p, sg_m, lam, lam_dot, b, db = _complex_lambdas(
        t, gamma, big_gamma, big_j
    )
    resid = float(max(np.max(np.abs(lam.imag)), np.max(np.abs(lam_dot.imag)),
                      np.max(np.abs(b.imag)), np.max(np.abs(db.imag))))
    if eta > big_j and resid > IMAG_TOL:
        raise ArithmeticError(f"lambda functions have imaginary residue {resid:.3e} for eta > J")
    return AnalyticCoefficients(
        t=t, eta=eta, delta=delta, omega_plus=om_p, omega_minus=om_m,
        sigma_plus=sg_p, sigma_minus=sg_m, lam=lam.real, lam_dot=lam_dot.real, imag_residue=resid,
        b=b.real, b_dot=db.real,
    )


def tcl_rates(t, gamma: float, big_gamma: float, big_j: float) -> AnalyticCoefficients:
    """Printed rate combinations ``gamma_1..4`` and ``D = 4 l1 (l4 - l3)``.

    ``singular`` flags times with ``|D| < DENOM_TOL``.  Note that ``D``
    vanishes identically at ``t = 0``.
    """
    c = lambda_functions(t, gamma, big_gamma, big_j)
    l1, l2, l3, l4, l5 = c.lam
    d1, d2, d3, d4, d5 = c.lam_dot
    g1 = 4 * d1 * (l3 - l4) - 2 * l1 * (d3 - d4)
    g2 = -2 * l1 * (l4 * (d2 + d3) + (l2 - 1) * (d3 - d4) - l3 * (d2 + d4))
    g3 = 4 * l1 * (d3 - d4) - g2
    r2 = math.sqrt(2)
    g4 = r2 * (l5 - l2) * (d3 - d4) - r2 * l4 * (d2 + d3 - d5) + r2 * l3 * (d2 + d4 - d5)
    c.gamma_s = np.array([g1, g2, g3, g4])
    c.d_denom = 4 * l1 * (l4 - l3)
    c.singular = np.abs(c.d_denom) < DENOM_TOL
    return c


def exact_tcl_rates(t, gamma: float, big_gamma: float, big_j: float):
    """Rates of the time-local generator that reproduces the reduced map.

    Returns ``(rates, denom)`` with ``rates = (k_z, k_minus, k_plus)``
    multiplying ``sigma_z rho sigma_z - rho``, ``D[sigma_-]`` and
    ``D[sigma_+]`` after division by ``denom = 4 l1 b``.  They follow from
    matching ``z' = a' + b' (z - a) / b`` and ``c'/c = l1'/l1 + 2 i omega``.
    """
    c = lambda_functions(t, gamma, big_gamma, big_j)
    l1, dl1 = c.lam[0], c.lam_dot[0]
    a, b, da, db = c.a, c.b, c.a_dot, c.b_dot
    k_z = l1 * db - 2 * dl1 * b
    k_minus = 2 * l1 * (db * (a - 1) - da * b)
    k_plus = 2 * l1 * (da * b - db * (a + 1))
    return np.array([k_z, k_minus, k_plus]), 4 * l1 * b


def exact_denominator_singular(t, gamma: float, big_gamma: float, big_j: float) -> np.ndarray:
    """Scale-free test for a zero of ``4 l1 b``.

    Both factors decay exponentially without ever vanishing for ``eta > J``,
    so an absolute threshold would misfire at late times.
    """
    c = lambda_functions(t, gamma, big_gamma, big_j)
    l1, dl1, b, db = c.lam[0], c.lam_dot[0], c.b, c.b_dot
    return (np.abs(l1) < DENOM_TOL * np.abs(dl1)) | (np.abs(b) < DENOM_TOL * np.abs(db))


def _lind(a, b, rho):
    """``a rho b - {b a, rho} / 2``."""
    ba = b @ a
    return a @ rho @ b - 0.5 * (ba @ rho + rho @ ba)


def _dissipator(op, rho):
    return _lind(op, op.conj().T, rho)


def tcl_apply(rho_s: np.ndarray, t: float, p: ModelParams, form: str = "exact") -> np.ndarray:
    """Time-local generator of the reduced dynamics for ``rho_A(0) = I/2``."""
    big_j = check_restriction(p)
    rho_s = np.asarray(rho_s, dtype=complex)
    sz, sm, sp = pauli("z"), lowering(), raising()
    h = hamiltonian_s(p)
    out = -1j * (h @ rho_s - rho_s @ h)
    if form == "exact":
        (k_z, k_m, k_p), den = exact_tcl_rates(float(t), p.gamma, p.big_gamma, big_j)
        if den == 0 or bool(exact_denominator_singular(float(t), p.gamma, p.big_gamma, big_j)):
            raise SingularGeneratorError(f"generator denominator vanishes at t={t:g}")
        out = out + (k_z * (sz @ rho_s @ sz - rho_s) + k_m * _dissipator(sm, rho_s)
                     + k_p * _dissipator(sp, rho_s)) / den
        return out
    if form == "printed":
        c = tcl_rates(float(t), p.gamma, p.big_gamma, big_j)
        if bool(c.singular):
            raise SingularGeneratorError(f"printed generator denominator vanishes at t={t:g}")
        g1, g2, g3, g4 = c.gamma_s
        ph = np.exp(-1j * (2 * p.omega_s * t + math.pi / 4))
        diss = (
            g1 * (sz @ rho_s @ sz - rho_s)
            + g2 * _dissipator(sm, rho_s)
            + g3 * _dissipator(sp, rho_s)
            + ph * g4 * (_lind(sz, sp, rho_s) + _lind(sp, sz, rho_s))
            + np.conj(ph) * g4 * (_lind(sz, sm, rho_s) + _lind(sm, sz, rho_s))
        )
        return out + diss / c.d_denom
    raise ValueError(f"unknown generator form {form!r}")


def reduced_state_analytic(rho_s0: np.ndarray, t, p: ModelParams) -> np.ndarray:
    """``rho_S(t)`` from the closed forms for ``rho_A(0) = I/2``.

    ``t`` may be an array; the result then has shape ``(len(t), 2, 2)``.
    """
    big_j = check_restriction(p)
    rho_s0 = np.asarray(rho_s0, dtype=complex)
    c = lambda_functions(t, p.gamma, p.big_gamma, big_j)
    z0 = (rho_s0[1, 1] - rho_s0[0, 0]).real
    z = c.a + c.b * z0
    coh = c.lam[0] * np.exp(2j * p.omega_s * c.t) * rho_s0[0, 1]
    out = np.empty(np.shape(z) + (2, 2), dtype=complex)
    out[..., 0, 0] = 0.5 * (1 - z)
    out[..., 1, 1] = 0.5 * (1 + z)
    out[..., 0, 1] = coh
    out[..., 1, 0] = np.conj(coh)
    return hermitize(out)
