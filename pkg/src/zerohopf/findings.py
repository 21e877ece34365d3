"""Engine-versus-published comparison tables.

Each entry is a :class:`DiscrepancyRecord`.  Mismatches are findings, not
failures: the engine and its independent expansion oracle are the
reference, and the published closed forms are the cross-check.
"""
from __future__ import annotations

import numpy as np

from . import lyapschmidt as ls
from .averaging import AveragedSet
from .oracles import (
    FIG1,
    FIG2,
    FIG2_CAPTION_L1,
    DiscrepancyRecord,
    case_a_constants,
    case_a_jordan_map,
    case_b_printed,
)
from .stability import a_matrices, classify_jacobian, k_determined_ladder, routh_hurwitz_2
from .systems import CaseAFamily, CaseBFamily, case_a_standard_form, case_b_standard_form
from .torus import find_crossing, jordan_normalize, l1_terms

__all__ = ["case_a_findings", "case_b_findings", "collect_findings", "fig1_family", "fig2_family",
           "solve_first_order_zero"]


def fig1_family(eps: float = 0.0) -> CaseBFamily:
    return CaseBFamily.constrained(
        float(FIG1["omega"]),
        [float(a) for a in FIG1["alpha_rest"]],
        [float(b) for b in FIG1["beta"]],
        [float(g) for g in FIG1["gamma"]],
        eps,
    )


def fig2_family(gamma: float | None = None, eps: float = 0.0) -> CaseAFamily:
    g = FIG2["gamma"] if gamma is None else gamma
    return CaseAFamily(FIG2["abar"], FIG2["alpha"], FIG2["beta"], g, eps)


def solve_first_order_zero(avg, x, tol=1e-12):
    """Newton iteration on ``g_1`` from the seed ``x``; raises ``RuntimeError`` after 50 steps."""
    for _ in range(50):
        step = np.linalg.solve(avg.jacobian(x, 1), avg.g(x, 1))
        x = x - step
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(x))):
            return x
    raise RuntimeError("Newton on g_1 did not converge")


def case_a_findings(abar=None, alpha=None, beta=None, gamma=None, seed=(52.8, -0.72)) -> list[DiscrepancyRecord]:
    """Case A closed forms against the engine (Fig-2 parameters by default)."""
    a = FIG2["abar"] if abar is None else abar
    al = FIG2["alpha"] if alpha is None else alpha
    be = FIG2["beta"] if beta is None else beta
    ga = FIG2["gamma"] if gamma is None else gamma
    pc = case_a_constants(a, al, be, ga)
    out: list[DiscrepancyRecord] = []
    avg = AveragedSet(case_a_standard_form(CaseAFamily(a, al, be, ga)))
    zero = solve_first_order_zero(avg, np.asarray(seed, dtype=float))
    out.append(DiscrepancyRecord.compare("r_bar", zero[0], pc["r_bar"],
                                         f"printed radicand {pc['r_bar_radicand']:.17g}; engine zero of g_1 by Newton"))
    out.append(DiscrepancyRecord.compare("z_bar", zero[1], pc["z_bar"], "engine zero of g_1 by Newton"))
    J = avg.jacobian(zero, 1)
    T = avg.source.period
    charpoly = (-np.trace(J) / T, np.linalg.det(J) / T**2)
    out.append(DiscrepancyRecord.compare("torus characteristic polynomial (p, q)", charpoly, pc["p_torus"],
                                         "coefficients of det(lambda - Dg_1 / T)"))
    out.append(DiscrepancyRecord.compare("stability characteristic polynomial (p, q)", charpoly, pc["p_stability"],
                                         "coefficients of det(lambda - Dg_1 / T)"))
    engine_verdict = classify_jacobian(J)
    printed_verdict = {"stable": "asymptotically stable", "unstable": "unstable", "marginal": "undetermined"}[
        routh_hurwitz_2(pc["d1"], pc["d0"])]
    rec = DiscrepancyRecord.compare("periodic orbit stability", engine_verdict, printed_verdict,
                                    f"Routh-Hurwitz on d1 = {pc['d1']:.17g}, d0 = {pc['d0']:.17g}")
    rec.verdict = "match" if engine_verdict == printed_verdict else "mismatch"
    out.append(rec)
    cross = find_crossing(lambda g: AveragedSet(case_a_standard_form(CaseAFamily(a, al, be, g))),
                          (min(1.5, pc["gamma_bar"] - 1.5), max(4.5, pc["gamma_bar"] + 1.5)),
                          zero, parameter="gamma")
    out.append(DiscrepancyRecord.compare("gamma_bar", cross.mu0, pc["gamma_bar"]))
    out.append(DiscrepancyRecord.compare("omega0", cross.omega0, pc["omega0"], "frequency of Dg_1 / T"))
    out.append(DiscrepancyRecord.compare("d Re(lambda) / d gamma", cross.speed, pc["dre_dgamma"],
                                         "Richardson centred difference on the averaged field"))
    avg0 = AveragedSet(case_a_standard_form(CaseAFamily(a, al, be, cross.mu0)))
    nf = jordan_normalize(avg0, cross, case_a_jordan_map(a, be))
    cubic, quad = l1_terms(nf.second, nf.third, nf.omega0)
    l1 = cubic + quad
    note = f"published normalisation; term sums {cubic:.6g} and {quad:.6g}"
    out.append(DiscrepancyRecord.compare("l1 (closed form)", l1, pc["ell1"], note))
    out.append(DiscrepancyRecord.compare("l1 (figure caption constant)", l1, FIG2_CAPTION_L1,
                                         note + f"; caption / closed form = {FIG2_CAPTION_L1 / pc['ell1']:.17g}"))
    return out


def case_b_findings() -> list[DiscrepancyRecord]:
    """Case B closed forms against the engine at the Fig-1 parameters."""
    fam = fig1_family()
    w = float(FIG1["omega"])
    alpha = list(fam.alpha_coeffs)
    beta, gamma = list(fam.beta_coeffs), list(fam.gamma_coeffs)
    pc = case_b_printed(w, alpha, beta, gamma)
    out: list[DiscrepancyRecord] = []
    out.append(DiscrepancyRecord.compare("delta (caption)", pc["delta"], float(FIG1["delta_caption"])))
    out.append(DiscrepancyRecord.compare("lambda1 (caption)", pc["lambda1"], float(FIG1["lambda1_caption"])))
    out.append(DiscrepancyRecord.compare("lambda2 (caption)", pc["lambda2"], float(FIG1["lambda2_caption"])))
    avg = AveragedSet(case_b_standard_form(fam))
    chart = ls.axis_chart()
    rep = ls.find_simple_zero(avg, chart, 2, seed=(0.9 * pc["r_star"],))
    r = float(rep.u_star[0])
    out.append(DiscrepancyRecord.compare("r_star", r, pc["r_star"]))
    rng = np.random.default_rng(7)
    pts = [(float(rng.uniform(1.0, 60.0)), float(rng.uniform(-3.0, 3.0))) for _ in range(5)]
    for grouping in ("literal", "regrouped"):
        eng = [avg.g(np.array(p), 2) for p in pts]
        prn = [pc["g2"](*p, grouping=grouping) for p in pts]
        out.append(DiscrepancyRecord.compare(f"g2 ({grouping} bracket)", eng, prn, "5 random points"))
    out.append(DiscrepancyRecord.compare("g3", [avg.g(np.array(p), 3) for p in pts],
                                         [pc["g3"](*p) for p in pts], "5 random points"))
    rs = [5.0, 20.0, 45.0]
    f2e = [float(ls.bifurcation_f(avg, chart, [x], 2)[0]) for x in rs]
    out.append(DiscrepancyRecord.compare("f2 closed form", f2e, [pc["f2"](x) for x in rs], "r = 5, 20, 45"))
    expl_p = ls.explicit_corrections(avg, chart, [r], "printed")
    red = ls.reduce_branch(avg, chart, [r], order=4)
    for name, i in (("c3", 3), ("c4", 4)):
        out.append(DiscrepancyRecord.compare(f"{name} explicit formula", red.c_value(i), expl_p["c"][i],
                                             "jet-route value versus published formula at r_star"))
    out.append(DiscrepancyRecord.compare("f4 explicit formula", red.f_value(4), expl_p["f"][4],
                                         "jet-route value versus published formula at r_star"))
    z0, z1, z2 = ls.z_series(avg, chart, rep, "taylor")
    _, _, z2p = ls.z_series(avg, chart, rep, "printed")
    out.append(DiscrepancyRecord.compare("z2 (normal component)", z2[1], z2p[1],
                                         "Taylor coefficient uses c2 / 2; published series uses c2"))
    A0, A1, A2 = a_matrices(avg, z0, z1, z2)
    out.append(DiscrepancyRecord.compare("A0[1,1]", A0[1, 1], pc["A0_22"]))
    lad = k_determined_ladder(A0, A1, A2)
    out.append(DiscrepancyRecord.compare("fast multiplier coefficient", lad["fast"]["coefficient"],
                                         pc["fast_multiplier_coeff"], "leading eps-coefficient of the fast multiplier"))
    out.append(DiscrepancyRecord.compare("slow multiplier coefficient", lad["slow"]["coefficient"],
                                         pc["slow_multiplier_coeff"], "eps**3 coefficient of the slow multiplier"))
    out.append(DiscrepancyRecord.compare("Lambda1[1,1]", lad["fast"]["series"][1], pc["Lambda1_22"],
                                         "first-order correction of the fast eigenvalue"))
    return out


def collect_findings() -> dict:
    return {"case_a": [r.to_dict() for r in case_a_findings()],
            "case_b": [r.to_dict() for r in case_b_findings()]}
