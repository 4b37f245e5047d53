import math

import numpy as np
import pytest

from ancilla_thermo.core import kron, qubit_state, random_density_matrix
from ancilla_thermo.dynamics import evolve
from ancilla_thermo.model import ModelParams
from ancilla_thermo.nonmarkov import (
    DistanceTrajectory,
    Revival,
    backflow_summary,
    distance_trajectory,
    find_revivals,
    monotonicity_violations,
    overlap_report,
    trace_distance,
    trace_distances,
)


def test_trace_distance_examples(rng):
    r = random_density_matrix(4, rng)
    assert trace_distance(r, r) == 0.0
    assert math.isclose(trace_distance(qubit_state("g"), qubit_state("e")), 1.0)
    assert math.isclose(trace_distance(np.diag([0.75, 0.25]), np.eye(2) / 2), 0.25)
    with pytest.raises(ValueError):
        trace_distance(np.eye(2) / 2, np.eye(4) / 4)


def test_vectorised_distance(rng):
    a = np.array([random_density_matrix(4, rng) for _ in range(3)])
    b = np.array([random_density_matrix(4, rng) for _ in range(3)])
    assert np.allclose(trace_distances(a, b), [trace_distance(x, y) for x, y in zip(a, b)])


def test_unitary_evolution_preserves_distance(rng):
    p = ModelParams(gamma=0.0, big_gamma=0.0, j_z=0.3, omega_a=1.4)
    t = np.linspace(0, 5, 51)
    r1, r2 = random_density_matrix(4, rng), random_density_matrix(4, rng)
    d = trace_distances(evolve(p, r1, t).states, evolve(p, r2, t).states)
    assert np.max(np.abs(d - d[0])) < 1e-8


def test_revival_detection():
    t = np.linspace(0, 1, 11)
    x = np.array([1.0, 0.6, 0.4, 0.2, 0.25, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01])
    rev = find_revivals(t, x)
    assert len(rev) == 1 and rev[0].i_start == 3 and rev[0].i_end == 5
    d = DistanceTrajectory(times=t, d_sa=x, d_s=x, revivals=rev)
    assert math.isclose(backflow_summary(d), 0.1)
    assert d.revival_intervals == [(pytest.approx(0.3), pytest.approx(0.5), pytest.approx(0.1))]


def test_monotone_series_has_no_backflow():
    t = np.linspace(0, 1, 50)
    x = np.exp(-t)
    assert find_revivals(t, x) == []
    assert backflow_summary(DistanceTrajectory(t, x, x)) == 0.0
    assert monotonicity_violations(x).size == 0


def test_single_step_rise_ignored():
    t = np.arange(5.0)
    assert find_revivals(t, [1.0, 0.5, 0.6, 0.4, 0.3]) == []
    assert monotonicity_violations([1.0, 0.5, 0.6, 0.4]).tolist() == [2]


def test_uncoupled_reduced_distance_monotone():
    p = ModelParams(gamma=1, big_gamma=0.1).uncoupled()
    d = distance_trajectory(p, (qubit_state("g"), qubit_state("e")), qubit_state("plus"), np.linspace(0, 20, 2001))
    assert d.revivals == []
    assert monotonicity_violations(d.d_s).size == 0
    assert np.all(d.d_sa <= 1 + 1e-10) and np.all(d.d_s >= 0)


def test_overlap_report():
    rev = [Revival(1.0, 2.0, 0.1, 0, 1), Revival(5.0, 6.0, 0.1, 2, 3)]
    rep = overlap_report(rev, [(1.5, 1.8, -0.2), (3.0, 4.0, -0.1)])
    assert rep.revivals_with_negative == 1 and rep.negatives_with_revival == 1
    assert rep.revivals == [(1.0, 2.0), (5.0, 6.0)]
