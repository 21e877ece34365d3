import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerohopf.systems import (
    CaseAFamily,
    CaseBFamily,
    DomainError,
    RosslerParams,
    case_a_standard_form,
    case_b_standard_form,
    eps_taylor_coeffs,
    rossler_jacobian,
    rossler_rhs,
)

TWO_PI = 2 * math.pi


def test_rossler_rhs_and_jacobian():
    p = RosslerParams(0.2, 0.2, 5.7)
    x = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(rossler_rhs(p, x), [2.0 - 0.5, 1.0 + 0.2 * -2.0, 0.2 + 0.5 * (1.0 - 5.7)])
    h = 1e-6
    fd = np.column_stack([(rossler_rhs(p, x + h * e) - rossler_rhs(p, x - h * e)) / (2 * h) for e in np.eye(3)])
    np.testing.assert_allclose(rossler_jacobian(p, x), fd, atol=1e-8)


def test_family_guards():
    with pytest.raises(DomainError):
        CaseAFamily(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        CaseAFamily(1.5, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        CaseBFamily(1.0, (0,) * 5, (0,) * 5, (1,) + (0,) * 4)
    with pytest.raises(DomainError):
        CaseBFamily(math.sqrt(2), (0,) * 5, (0,) * 5, (1,) + (0,) * 4)
    with pytest.raises(DomainError):
        case_b_standard_form(CaseBFamily(1.3, (0,) * 5, (0,) * 5, (1,) + (0,) * 4), lower=(0.0, -1.0))


@pytest.mark.parametrize("abar", [-1.0, 0.5, 1.3])
def test_case_a_origin_is_zero_hopf(abar):
    f = CaseAFamily(abar, 2.0, -3.0, 1.0)
    ev = np.linalg.eigvals(rossler_jacobian(f.rossler(0.0), np.zeros(3)))
    ev = ev[np.argsort(ev.imag)]
    np.testing.assert_allclose(ev, [-1j * math.sqrt(2 - abar**2), 0, 1j * math.sqrt(2 - abar**2)], atol=1e-12)
    assert f.rotation_rate == pytest.approx(math.sqrt(2 - abar**2))


def test_case_b_origin_is_zero_hopf(fig1):
    ev = np.linalg.eigvals(rossler_jacobian(fig1.rossler(0.0), np.zeros(3)))
    assert sorted(np.abs(ev.imag))[1:] == pytest.approx([fig1.omega] * 2)
    assert np.min(np.abs(ev)) < 1e-14


@settings(max_examples=25, deadline=None)
@given(st.floats(0, TWO_PI), st.floats(0.5, 40.0), st.floats(-5.0, 5.0), st.floats(0.0, 0.05))
def test_standard_form_is_periodic(t, r, z, eps):
    for s in (case_b_standard_form(CaseBFamily.constrained(39 / 32, (55, 0.925, 11.4), (-1, -1, -17.7, -1, 18),
                                                            (1, -1, 0, 19.3, -24.7))),
              case_a_standard_form(CaseAFamily(-1.0, 41.0, -38.0, 4.299))):
        a, b = s.field(t, [r, z], eps), s.field(t + TWO_PI, [r, z], eps)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_unperturbed_flow_is_trivial(fig1):
    s = case_b_standard_form(fig1)
    np.testing.assert_allclose(s.field(0.3, [5.0, 1.0], 0.0), 0.0, atol=1e-14)


def test_eps_coefficients_match_richardson_differences(fig1):
    s = case_b_standard_form(fig1)
    t, z = 0.7, np.array([3.0, 0.4])
    bundle = eps_taylor_coeffs(s, t, z, eps_order=2, state_order=1)

    def dd(h):  # second-order central differences in eps around eps = 0
        fp, fm, f0 = s.field(t, z, h), s.field(t, z, -h), s.field(t, z, 0.0)
        return (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (2 * h * h)

    h = 1e-3
    (a1, a2), (b1, b2) = dd(h), dd(h / 2)
    np.testing.assert_allclose(bundle.F(1), (4 * b1 - a1) / 3, rtol=1e-6)
    np.testing.assert_allclose(bundle.F(2), (4 * b2 - a2) / 3, rtol=1e-6)


def test_to_rossler_chart():
    f = CaseBFamily.constrained(39 / 32, (55, 0.925, 11.4), (-1, -1, -17.7, -1, 18), (1, -1, 0, 19.3, -24.7))
    s = case_b_standard_form(f)
    p = s.to_rossler(0.0, [2.0, 0.5], 0.1)
    np.testing.assert_allclose(p, 0.1 * f.linear_change() @ [2.0, 0.0, 0.5])
