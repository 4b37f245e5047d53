import math

import numpy as np
import pytest
from hypothesis import given
from scipy.stats import entropy as shannon

from ancilla_thermo.core import kron, pure_state, random_density_matrix
from ancilla_thermo.correlations import (
    binary_entropy,
    concurrence,
    correlation_record,
    effective_beta,
    eof,
    eof_from_concurrence,
    mutual_information,
    mutual_information_series,
)
from ancilla_thermo.dynamics import steady_state
from ancilla_thermo.model import ModelParams

from conftest import density_matrices

PHI_PLUS = pure_state([1, 0, 0, 1])


def werner(p):
    return p * PHI_PLUS + (1 - p) * np.eye(4) / 4


def test_concurrence_examples(rng):
    assert math.isclose(concurrence(PHI_PLUS), 1.0, abs_tol=1e-12)
    prod = kron(random_density_matrix(2, rng), random_density_matrix(2, rng))
    assert concurrence(prod) < 1e-7
    assert math.isclose(concurrence(werner(0.8)), 0.7, abs_tol=1e-12)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_werner_closed_form(p):
    assert math.isclose(concurrence(werner(p)), max(0.0, (3 * p - 1) / 2), abs_tol=1e-7)


def test_eof_examples():
    assert math.isclose(eof_from_concurrence(1.0), 1.0)
    assert eof_from_concurrence(0.0) == 0.0
    x = (1 + math.sqrt(0.51)) / 2
    assert math.isclose(eof_from_concurrence(0.7), shannon([x, 1 - x], base=2), rel_tol=1e-12)
    assert math.isclose(eof(PHI_PLUS), 1.0, abs_tol=1e-12)
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0


@given(density_matrices())
def test_record_invariants(rho):
    r = correlation_record(rho, 1.0, 1.0)
    assert 0 <= r.concurrence <= 1 + 1e-10 and 0 <= r.eof <= 1 + 1e-10
    if r.concurrence == 0:
        assert r.eof == 0
    assert r.mutual_info >= 0
    # random states are coherent, so no effective temperature
    assert r.beta_eff_s is None


def test_mutual_information_examples(rng):
    assert mutual_information(kron(random_density_matrix(2, rng), random_density_matrix(2, rng))) < 1e-12
    assert math.isclose(mutual_information(PHI_PLUS), 2 * math.log(2), rel_tol=1e-12)
    assert math.isclose(mutual_information(PHI_PLUS, base=2), 2.0, rel_tol=1e-12)
    assert mutual_information(steady_state(ModelParams(omega_a=1.7)).state) <= 1e-9


def test_mutual_information_rejects_invalid_input():
    with pytest.raises(ValueError):
        mutual_information(np.diag([0.5, 0.5, 0.5, -0.5]))


def test_mutual_information_series(rng):
    stack = np.array([random_density_matrix(4, rng) for _ in range(4)])
    assert np.allclose(mutual_information_series(stack), [mutual_information(r) for r in stack])


def test_effective_beta_examples():
    assert math.isclose(effective_beta(np.diag([10 / 11, 1 / 11]), 1.0), math.log(10) / 2, rel_tol=1e-13)
    assert effective_beta(np.eye(2) / 2, 1.0) == 0.0
    assert effective_beta(np.diag([1.0, 0.0]), 1.0) == math.inf
    with pytest.raises(ValueError):
        effective_beta(0.5 * np.ones((2, 2)), 1.0)
    with pytest.raises(ValueError):
        effective_beta(np.eye(2) / 2, 0.0)
