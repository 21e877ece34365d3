from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerohopf.oracles import (
    FIG1,
    FIG2,
    DiscrepancyRecord,
    InvalidDomain,
    case_a_constants,
    case_a_g1_closed,
    case_b_delta_exact,
    case_b_g1,
    case_b_printed,
    standard_analysis_template,
    template_has_positive_zero,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_verdict_rule(engine, printed):
    rec = DiscrepancyRecord.compare("x", engine, printed)
    gap = abs(engine - printed)
    rel = gap / abs(printed) if printed else (0.0 if gap == 0 else float("inf"))
    assert (rec.verdict == "match") == (rel <= 1e-6 or gap <= 1e-9)


def test_verdict_examples():
    assert DiscrepancyRecord.compare("a", 1.0, 1.0 + 5e-7).verdict == "match"
    assert DiscrepancyRecord.compare("a", 1.0, 1.1).verdict == "mismatch"
    assert DiscrepancyRecord.compare("a", 1e-12, 0.0).verdict == "match"
    rec = DiscrepancyRecord.compare("a", 1.0, InvalidDomain("a", "negative radicand"))
    assert rec.verdict == "printed-formula-invalid-domain"
    d = rec.to_dict()
    assert d["printed_value"]["quantity"] == "a" and d["gap"] == "not comparable"


def test_fig1_exact_constants():
    w = FIG1["omega"]
    g1 = FIG1["gamma"][0]
    assert g1 * (w * w - 2) == Fraction(-527, 1024)
    assert g1 * (1 - w * w) == Fraction(-497, 1024)
    delta = case_b_delta_exact(w, FIG1["beta"], FIG1["gamma"], FIG1["alpha_rest"][0])
    assert delta == Fraction(57933599, 508928)
    pc = case_b_printed(float(w), [0, 0, *map(float, FIG1["alpha_rest"])], FIG1["beta"], FIG1["gamma"])
    assert pc["delta"] == float(delta)
    assert abs(pc["delta"] - float(FIG1["delta_caption"])) / float(FIG1["delta_caption"]) < 1e-4
    assert abs(pc["lambda1"] - float(FIG1["lambda1_caption"])) < 1e-4
    assert abs(pc["lambda2"] - float(FIG1["lambda2_caption"])) < 1e-4


def test_case_b_g1_matches_engine(fig1_avg, fig1):
    for r, z in [(3.0, 0.2), (40.0, -1.0)]:
        np.testing.assert_allclose(fig1_avg.g([r, z], 1),
                                   case_b_g1(fig1.omega, fig1.alpha_coeffs[0], fig1.gamma_coeffs[0], r, z),
                                   rtol=1e-10, atol=1e-12)


def test_case_a_g1_closed_matches_engine(fig2_avg):
    for r, z in [(3.0, 0.2), (40.0, -1.0)]:
        np.testing.assert_allclose(
            fig2_avg.g([r, z], 1),
            case_a_g1_closed(FIG2["abar"], FIG2["alpha"], FIG2["beta"], FIG2["gamma"], r, z), rtol=1e-9)


def test_case_a_printed_constants_at_fig2():
    pc = case_a_constants(FIG2["abar"], FIG2["alpha"], FIG2["beta"], FIG2["gamma"])
    assert pc["gamma_bar"] == 3.0
    assert pc["omega0"] == pytest.approx(38.0, abs=1e-12)
    assert pc["dre_dgamma"] == pytest.approx(0.5)
    assert pc["ell"] == pytest.approx(1043404.0)
    assert isinstance(pc["r_bar"], InvalidDomain)


def test_template_trivial_and_predicate():
    assert np.all(standard_analysis_template(1.3, 0.0, 0.0, 2.0, 1.0) == 0.0)
    assert not template_has_positive_zero(1.3, 1.0, 0.5)
    w = 1.3
    assert template_has_positive_zero(w, -0.5 * (1 - w * w), 0.5)


@pytest.mark.parametrize("grouping", ["literal", "regrouped"])
def test_printed_g2_groupings(fig1_avg, fig1, grouping):
    pc = case_b_printed(fig1.omega, fig1.alpha_coeffs, fig1.beta_coeffs, fig1.gamma_coeffs)
    z = (12.0, 0.7)
    gap = np.max(np.abs(fig1_avg.g(np.array(z), 2) - pc["g2"](*z, grouping=grouping)))
    if grouping == "regrouped":
        assert gap <= 1e-7 * max(1.0, np.max(np.abs(fig1_avg.g(np.array(z), 2))))
    else:
        assert gap > 1e-3  # finding: the literal bracket is not the averaged function


def test_printed_g3_matches(fig1_avg, fig1):
    pc = case_b_printed(fig1.omega, fig1.alpha_coeffs, fig1.beta_coeffs, fig1.gamma_coeffs)
    for z in [(12.0, 0.7), (30.0, -2.0)]:
        e = fig1_avg.g(np.array(z), 3)
        np.testing.assert_allclose(pc["g3"](*z), e, rtol=1e-7, atol=1e-7 * np.max(np.abs(e)))
