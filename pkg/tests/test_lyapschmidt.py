import math

import numpy as np
import pytest

from zerohopf import lyapschmidt as ls
from zerohopf.oracles import case_b_printed


@pytest.fixture(scope="module")
def printed(fig1):
    return case_b_printed(fig1.omega, fig1.alpha_coeffs, fig1.beta_coeffs, fig1.gamma_coeffs)


def test_chart_and_f1_vanish(fig1_avg):
    chart = ls.axis_chart()
    assert ls.verify_chart(fig1_avg, chart) <= 1e-9
    for r in np.linspace(0.5, 100.0, 12):
        assert abs(ls.bifurcation_f(fig1_avg, chart, [r], 1)[0]) <= 1e-9


def test_unique_simple_zero_of_f2(fig1_zero, fig1, printed):
    _, rep, _ = fig1_zero
    assert len(rep.zeros) == 1
    assert rep.u_star[0] == pytest.approx(4 * fig1.omega * math.sqrt(printed["delta"] / 3), abs=1e-6)
    assert abs(np.linalg.det(rep.jacobian)) > 1e-8


def test_f2_is_the_negated_closed_form(fig1_avg, printed):
    # finding: the published f2 carries the opposite overall sign
    chart = ls.axis_chart()
    for r in (1.0, 17.0, 60.0):
        assert ls.bifurcation_f(fig1_avg, chart, [r], 2)[0] == pytest.approx(-printed["f2"](r), rel=1e-7)


def test_df2_sign_at_zero(fig1_zero, fig1):
    _, rep, _ = fig1_zero
    g1 = fig1.gamma_coeffs[0]
    assert np.sign(rep.jacobian[0, 0]) == -np.sign(g1 * (fig1.omega**2 - 1))


def test_explicit_consistent_matches_jet_route(fig1_avg, fig1_zero):
    chart, rep, _ = fig1_zero
    red = ls.reduce_branch(fig1_avg, chart, rep.u_star, order=4)
    expl = ls.explicit_corrections(fig1_avg, chart, rep.u_star, "consistent")
    for i in range(1, 5):
        np.testing.assert_allclose(expl["c"][i], red.c_value(i), rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(expl["f"][i], red.f_value(i), rtol=1e-9, atol=1e-7)


def test_printed_variant_differs_from_jet_route(fig1_avg, fig1_zero):
    chart, rep, _ = fig1_zero
    red = ls.reduce_branch(fig1_avg, chart, rep.u_star, order=4)
    expl = ls.explicit_corrections(fig1_avg, chart, rep.u_star, "printed")
    np.testing.assert_allclose(expl["c"][2], red.c_value(2), rtol=1e-9)
    assert abs(expl["c"][3][0] - red.c_value(3)[0]) > 1.0
    with pytest.raises(ValueError):
        ls.explicit_corrections(fig1_avg, chart, rep.u_star, "other")


def test_z_series_conventions(fig1_avg, fig1_zero):
    chart, rep, (z0, z1, z2) = fig1_zero
    red = ls.reduce_branch(fig1_avg, chart, rep.u_star, order=4)
    assert z0[1] == 0.0
    assert z1[1] == pytest.approx(red.c_value(1)[0])
    _, _, z2p = ls.z_series(fig1_avg, chart, rep, "printed")
    assert z2p[1] - z2[1] == pytest.approx(red.c_value(2)[0] / 2, rel=1e-9)


def test_search_errors(fig1_avg):
    chart = ls.axis_chart()
    with pytest.raises(ValueError):
        ls.find_simple_zero(fig1_avg, chart, 4)
    with pytest.raises(ls.NoZeroFoundError):
        ls.find_simple_zero(fig1_avg, chart, 2, box=((40.0,), (60.0,)), scan_points=8)
    with pytest.raises(ls.NoZeroFoundError):
        ls.find_simple_zero(fig1_avg, chart, 1, scan_points=8)
