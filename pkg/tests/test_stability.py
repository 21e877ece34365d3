import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerohopf.averaging import AveragedSet
from zerohopf.oracles import FIG1, case_b_printed
from zerohopf.stability import (
    DegenerateEpsilonError,
    EscapeError,
    RosslerSection,
    StabilityReport,
    StroboscopicMap,
    UnsupportedShapeError,
    a_matrices,
    classify_jacobian,
    classify_ladder,
    k_determined_ladder,
    locate_periodic_orbit,
    routh_hurwitz_2,
    scaling_slope,
)
from zerohopf.systems import RosslerParams, scalar_test_system

TWO_PI = 2 * math.pi


@settings(max_examples=1000, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_routh_hurwitz_matches_roots(p, q):
    roots = np.roots([1.0, p, q])
    if np.min(np.abs(roots.real)) < 1e-6:
        return  # near-marginal: sign decided by rounding
    direct = "stable" if np.all(roots.real < 0) else "unstable"
    assert routh_hurwitz_2(p, q) == direct


def test_routh_hurwitz_marginal():
    assert routh_hurwitz_2(0.0, 1.0) == "marginal"
    assert routh_hurwitz_2(1.0, 0.0) == "marginal"


def test_a_matrices_scalar_linear():
    avg = AveragedSet(scalar_test_system(1.0, 1))
    A0, A1, A2 = a_matrices(avg, [0.8])
    assert A0[0, 0] == pytest.approx(TWO_PI, rel=1e-12)
    assert A1[0, 0] == pytest.approx(TWO_PI**2 / 2 * 2 / 2, rel=1e-12)
    assert A2[0, 0] == pytest.approx(TWO_PI**3 / 6, rel=1e-12)


def test_a0_matches_jacobian_and_printed(fig1_avg, fig1_zero, fig1):
    _, _, (z0, z1, z2) = fig1_zero
    A0, _, _ = a_matrices(fig1_avg, z0, z1, z2)
    np.testing.assert_array_equal(A0, fig1_avg.g_derivatives(z0, 1, 1))
    pc = case_b_printed(fig1.omega, fig1.alpha_coeffs, fig1.beta_coeffs, fig1.gamma_coeffs)
    assert A0[1, 1] == pytest.approx(pc["A0_22"], abs=1e-9)
    assert max(abs(A0[0, 0]), abs(A0[0, 1]), abs(A0[1, 0])) <= 1e-9


def test_ladder_trivial_diagonal():
    A0 = np.diag([0.0, -2.0])
    A1 = np.diag([-1.0, 0.5])
    lad = k_determined_ladder(A0, A1, np.zeros((2, 2)))
    assert lad["offdiagonal_residual"] < 1e-14
    assert lad["slow"]["rate_A"] == 1 and lad["slow"]["coefficient"] == -1.0
    assert lad["fast"]["rate_A"] == 0 and lad["fast"]["coefficient"] == -2.0
    assert lad["slow"]["multiplier_rate"] == 2
    assert classify_ladder(lad) == "asymptotically stable"


def test_ladder_offdiagonal_eliminated_to_second_order():
    rng = np.random.default_rng(3)
    A1, A2 = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    lad = k_determined_ladder(np.diag([0.0, -3.0]), A1, A2)
    L = lad["Lambda"]
    assert abs(L[1][0, 1]) < 1e-12 and abs(L[2][0, 1]) < 1e-12
    # slow branch eigenvalue agrees with the exact eigenvalue to O(eps^3)
    for e in (1e-2, 5e-3):
        ev = np.linalg.eigvals(np.diag([0.0, -3.0]) + e * A1 + e * e * A2)
        slow = ev[np.argmin(np.abs(ev))]
        approx = sum(c * e**k for k, c in enumerate(lad["slow"]["series"]))
        assert abs(slow - approx) < 50 * e**3


def test_ladder_verdicts_and_shapes():
    lad = k_determined_ladder(np.diag([0.0, -2.0]), np.diag([1.0, 0.0]), np.zeros((2, 2)))
    assert classify_ladder(lad) == "unstable (1,1) splitting"
    lad = k_determined_ladder(np.diag([0.0, 2.0]), np.diag([1.0, 0.0]), np.zeros((2, 2)))
    assert classify_ladder(lad) == "unstable (0,2) splitting"
    lad = k_determined_ladder(np.diag([0.0, 2.0]), np.zeros((2, 2)), np.zeros((2, 2)))
    assert classify_ladder(lad) == "undetermined"
    with pytest.raises(UnsupportedShapeError):
        k_determined_ladder(np.eye(3), np.eye(3), np.eye(3))
    with pytest.raises(UnsupportedShapeError):
        k_determined_ladder(np.array([[0.0, 1.0], [0.0, -1.0]]), np.eye(2), np.eye(2))
    with pytest.raises(UnsupportedShapeError):
        k_determined_ladder(np.zeros((2, 2)), np.eye(2), np.eye(2))


def test_classify_jacobian():
    assert classify_jacobian([[-1.0, 2.0], [-2.0, -1.0]]) == "asymptotically stable"
    assert classify_jacobian([[1.0, 0.0], [0.0, -1.0]]) == "unstable"
    assert classify_jacobian([[0.0, 1.0], [-1.0, 0.0]]) == "undetermined"
    assert classify_jacobian(-np.eye(3)) == "asymptotically stable"


def test_fig1_ladder_is_stable(fig1_avg, fig1_zero):
    _, _, (z0, z1, z2) = fig1_zero
    lad = k_determined_ladder(*a_matrices(fig1_avg, z0, z1, z2))
    assert lad["fast"]["rate_A"] == 0 and lad["slow"]["rate_A"] == 2
    assert classify_ladder(lad) == "asymptotically stable"
    assert lad["slow"]["coefficient"] == pytest.approx(-191.7638, rel=1e-6)
    rep = StabilityReport("B", {}, (0, 0, 0), lad, None, classify_ladder(lad))
    assert rep.to_dict()["classification"] == "asymptotically stable"


def test_stroboscopic_orbit_fig1(fig1_avg, fig1_zero):
    _, _, (z0, z1, z2) = fig1_zero
    e = 0.02
    orb = locate_periodic_orbit(StroboscopicMap(fig1_avg.source), z0 + e * z1 + e * e * z2, e)
    assert orb.residual <= 1e-10
    assert np.all(np.abs(orb.multipliers) < 1)
    with pytest.raises(DegenerateEpsilonError):
        locate_periodic_orbit(StroboscopicMap(fig1_avg.source), z0, 1e-8)


def test_escape_reported(fig1_avg):
    h = StroboscopicMap(fig1_avg.source)
    with pytest.raises(EscapeError):
        h.map(np.array([99.9, 99.0]), 0.3)


def test_section_liouville_and_transversality():
    sec = RosslerSection(RosslerParams(0.2, 0.2, 5.7), axis=0, direction=-1)
    q, D, diag = sec.map_with_jacobian(np.array([-2.0, 0.1]))
    assert abs(diag["det"] - diag["liouville_det"]) <= 1e-8
    np.testing.assert_allclose(sec.map(np.array([-2.0, 0.1])), q, rtol=1e-10)
    h = 1e-6
    fd = np.column_stack([(sec.map(np.array([-2.0, 0.1]) + h * e) - sec.map(np.array([-2.0, 0.1]) - h * e)) / (2 * h)
                          for e in np.eye(2)])
    np.testing.assert_allclose(D, fd, rtol=1e-5, atol=1e-6)


def test_scaling_slope_exact_power():
    e = np.array(FIG1_LADDER)
    assert scaling_slope(e, 3.0 * e**3) == pytest.approx(3.0)


FIG1_LADDER = [1 / 50, 1 / 100, 1 / 200, 1 / 400]
