import math

import numpy as np
import pytest
from hypothesis import given
from scipy.linalg import expm, logm

from ancilla_thermo.core import (
    EPS_LOG,
    bloch_state,
    check_density_matrix,
    commutator,
    kron,
    lowering,
    matrix_log,
    partial_trace,
    pauli,
    pure_state,
    qubit_state,
    raising,
    random_density_matrix,
    random_hermitian,
    relative_entropy,
    trace_norm,
    von_neumann_entropy,
)

from conftest import density_matrices

I2 = np.eye(2)
PHI_PLUS = pure_state([1, 0, 0, 1])


def test_pauli_involution():
    for n in "xyz":
        assert np.allclose(pauli(n) @ pauli(n), I2)


def test_pauli_algebra_and_unknown_name():
    assert np.allclose(pauli("x") @ pauli("y"), 1j * pauli("z"))
    with pytest.raises(ValueError):
        pauli("w")


def test_ladder_operators():
    assert np.allclose(raising() @ lowering(), np.diag([0, 1]))
    # sign recorded for this basis convention
    assert np.allclose(commutator(raising(), lowering()), pauli("z"))


def test_z_has_ground_state_first():
    # omega sigma_z with omega > 0 must have |0> as its ground state
    assert pauli("z")[0, 0].real == -1 and pauli("z")[1, 1].real == 1


def test_kron_examples(rng):
    assert np.allclose(kron(I2, I2), np.eye(4))
    # S first; sigma_z is -1 on the ground level
    assert np.allclose(np.diag(kron(pauli("z"), I2)), [-1, -1, 1, 1])
    a, b = random_hermitian(2, rng), random_hermitian(2, rng)
    assert np.isclose(np.trace(kron(a, b)), np.trace(a) * np.trace(b))
    with pytest.raises(ValueError):
        kron(np.eye(4), I2)


def test_partial_trace_examples(rng):
    rs, ra = random_density_matrix(2, rng), random_density_matrix(2, rng)
    assert np.allclose(partial_trace(kron(rs, ra), "S"), rs)
    assert np.allclose(partial_trace(kron(rs, ra), "A"), ra)
    assert np.allclose(partial_trace(PHI_PLUS, "S"), I2 / 2)
    with pytest.raises(ValueError):
        partial_trace(PHI_PLUS, "B")


def test_partial_trace_stack(rng):
    stack = np.array([random_density_matrix(4, rng) for _ in range(5)])
    red = partial_trace(stack, "A")
    for k in range(5):
        assert np.allclose(red[k], partial_trace(stack[k], "A"))


@given(density_matrices())
def test_partial_trace_preserves_trace_and_positivity(rho):
    for keep in "SA":
        r = partial_trace(rho, keep)
        assert abs(np.trace(r) - 1) < 1e-12
        assert np.linalg.eigvalsh(r).min() > -1e-12


def test_matrix_log_examples(rng):
    assert np.allclose(matrix_log(I2 / 2), -math.log(2) * I2)
    assert np.allclose(matrix_log(np.diag([1.0, 0.0])), np.diag([0.0, math.log(EPS_LOG)]))
    rho = random_density_matrix(4, rng)
    assert np.max(np.abs(expm(matrix_log(rho)) - rho)) < 1e-10
    assert np.max(np.abs(matrix_log(rho) - logm(rho))) < 1e-10


@pytest.mark.parametrize(
    "a, expected",
    [(pauli("z"), 2.0), (np.diag([0.5, -0.25, -0.25, 0.0]), 1.0)],
)
def test_trace_norm_examples(a, expected):
    assert math.isclose(trace_norm(a), expected, rel_tol=1e-12)


def test_trace_norm_of_state_and_rejects_non_hermitian(rng):
    assert math.isclose(trace_norm(random_density_matrix(4, rng)), 1.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        trace_norm(lowering())


def test_trace_norm_triangle(rng):
    for _ in range(20):
        a, b = random_hermitian(4, rng), random_hermitian(4, rng)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-12


def test_entropy_examples():
    assert abs(von_neumann_entropy(pure_state([1, 1j]))) < 1e-12
    assert math.isclose(von_neumann_entropy(I2 / 2), math.log(2))
    assert math.isclose(von_neumann_entropy(I2 / 2, base=2), 1.0)
    p = np.array([10 / 11, 1 / 11])
    oracle = -float(np.sum(p * np.log(p)))
    assert math.isclose(von_neumann_entropy(np.diag(p)), oracle, rel_tol=1e-14)
    assert math.isclose(oracle, 0.3046, abs_tol=1e-4)


def test_relative_entropy_examples(rng):
    rho = random_density_matrix(4, rng)
    assert abs(relative_entropy(rho, rho)) < 1e-12
    assert math.isclose(relative_entropy(np.diag([1.0, 0.0]), I2 / 2), math.log(2))
    w = np.diag([10 / 11, 1 / 11])
    assert math.isclose(relative_entropy(np.diag([0.0, 1.0]), w), math.log(11), rel_tol=1e-13)


def test_relative_entropy_support_violation_is_infinite():
    assert relative_entropy(I2 / 2, np.diag([1.0, 0.0])) == math.inf


@given(density_matrices(), density_matrices())
def test_relative_entropy_nonnegative_and_matches_logm(rho, w):
    s = relative_entropy(rho, w)
    assert s >= -1e-12
    oracle = np.trace(rho @ (logm(rho) - logm(w))).real
    assert abs(s - oracle) < 1e-9


def test_check_density_matrix():
    check_density_matrix(I2 / 2)
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


@pytest.mark.parametrize(
    "name, rho",
    [
        ("g", np.diag([1, 0])),
        ("e", np.diag([0, 1])),
        ("plus", 0.5 * np.ones((2, 2))),
        ("minus", 0.5 * np.array([[1, -1], [-1, 1]])),
        ("mixed", I2 / 2),
        ("0,0,1", np.diag([0, 1])),
    ],
)
def test_named_states(name, rho):
    assert np.allclose(qubit_state(name), rho)


def test_bad_states():
    with pytest.raises(ValueError):
        qubit_state("up")
    with pytest.raises(ValueError):
        bloch_state([1, 1, 0])
