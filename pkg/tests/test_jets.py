import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerohopf.jets import (
    IncompatibleSpecError,
    Jet,
    JetDomainError,
    JetSpec,
    extract_tensor,
    jet_div,
    jet_elem,
    jet_mul,
)

SPEC = JetSpec(2, (3, 2), 4)
coeff_lists = st.lists(st.floats(-2, 2, allow_nan=False), min_size=SPEC.size, max_size=SPEC.size)


def jet(c):
    return Jet(SPEC, np.array(c))


def close(a, b, rel):
    scale = max(1.0, float(np.max(np.abs(b.coeffs))))
    return float(np.max(np.abs(a.coeffs - b.coeffs))) <= rel * scale


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_ring_axioms(a, b, c):
    a, b, c = jet(a), jet(b), jet(c)
    assert close((a * b) * c, a * (b * c), 1e-13)
    assert close(a * (b + c), a * b + a * c, 1e-13)
    assert close(a * b, b * a, 1e-15)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, st.floats(0.5, 2.0), st.sampled_from([-1.0, 1.0]))
def test_division_inverts_multiplication(a, b, mag, sign):
    b = list(b)
    b[0] = sign * mag  # unit-size constant term
    a, b = jet(a), jet(b)
    assert close(jet_mul(jet_div(a, b), b), a, 1e-12)


@settings(max_examples=60, deadline=None)
@given(coeff_lists)
def test_pythagorean_identity(a):
    a = jet(a)
    one = jet_elem("sin", a) ** 2 + jet_elem("cos", a) ** 2
    assert close(one, Jet.constant(SPEC, 1.0), 1e-12)


def test_extract_tensor_of_explicit_polynomial():
    spec = JetSpec.total(2, 3)
    x, y = Jet.variable(spec, 0, 0.5), Jet.variable(spec, 1, -1.0)
    p = x * x * y + 3.0 * y * y
    # p = x^2 y + 3 y^2 at (0.5, -1)
    assert float(p.value) == pytest.approx(0.25 * -1 + 3)
    np.testing.assert_allclose(extract_tensor(p, [0, 1], 1), [2 * 0.5 * -1, 0.25 + 6 * -1])
    np.testing.assert_allclose(extract_tensor(p, [0, 1], 2), [[-2.0, 1.0], [1.0, 6.0]])
    d3 = extract_tensor(p, [0, 1], 3)
    assert d3[0, 0, 1] == d3[0, 1, 0] == d3[1, 0, 0] == 2.0
    assert d3[0, 0, 0] == d3[1, 1, 1] == 0.0


def test_geometric_series_and_sqrt():
    e = Jet.variable(JetSpec.univariate(5), 0)
    np.testing.assert_allclose((1 / (1 - e)).coeffs, np.ones(6))
    s = (1 + e).sqrt()
    np.testing.assert_allclose(s.coeffs[:3], [1.0, 0.5, -0.125])
    np.testing.assert_allclose((s * s).coeffs, (1 + e).coeffs, atol=1e-15)


def test_truncation_drops_terms_beyond_caps():
    spec = JetSpec(2, (1, 2), 2)
    x, y = Jet.variable(spec, 0), Jet.variable(spec, 1)
    assert np.all((x * x).coeffs == 0)
    assert np.all((x * y * y).coeffs == 0)
    assert (y * y).coeff([0, 2]) == 1.0


def test_scalar_linear_field_tensor():
    spec = JetSpec.univariate(2)
    x = Jet.variable(spec, 0, 0.7)
    assert extract_tensor(1.0 * x, [0], 1)[0] == 1.0


def test_errors():
    with pytest.raises(IncompatibleSpecError):
        Jet.variable(JetSpec.univariate(2), 0) + Jet.variable(JetSpec.univariate(3), 0)
    with pytest.raises(JetDomainError):
        Jet.variable(JetSpec.univariate(2), 0).reciprocal()
    with pytest.raises(ValueError):
        jet_elem("tan", Jet.variable(JetSpec.univariate(2), 0, 1.0))


def test_batch_axes_broadcast():
    spec = JetSpec.univariate(3)
    x = Jet.variable(spec, 0, np.array([0.1, 0.2, 0.3]))
    s = x.sin()
    np.testing.assert_allclose(s.value, np.sin([0.1, 0.2, 0.3]))
    np.testing.assert_allclose(s.coeffs[3], -np.cos([0.1, 0.2, 0.3]) / math.factorial(3))
