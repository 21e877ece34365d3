"""Command-line front end.

``analyze --config <path> [--out <dir>]`` runs the analyses listed in the
config and writes JSON reports, CSV series and a provenance manifest.
``selftest`` runs the quick consistency suite.

Exit codes: 0 success, 2 an invariant check failed, 3 configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 2, 3
ANALYSES = ("averaging", "bifurcation", "orbit", "stability", "scaling", "torus", "findings")
CASES = ("A", "B", "scalar")


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


# -- configuration ----------------------------------------------------------------


def parse_number(text: str) -> float:
    """Decimal or exact rational ``p/q``."""
    t = text.strip()
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def parse_list(text: str) -> list[float]:
    return [parse_number(p) for p in text.replace(";", ",").split(",") if p.strip()]


@dataclass
class RunConfig:
    case: str
    analyses: list
    params: dict
    eps: float
    eps_ladder: list
    tolerances: dict
    section: dict
    torus: dict
    out: Path
    source: str = ""
    notes: list = field(default_factory=list)


DEFAULT_TOLERANCES = {"newton": 1e-10, "quadrature": 1e-11, "integrator": 1e-12, "oracle": 1e-6, "invariant": 1e-9}

REQUIRED = {
    "A": ("abar", "alpha", "beta", "gamma"),
    "B": ("omega", "alpha_rest", "beta", "gamma"),
    "scalar": ("rate", "power"),
}


def load_config(path: str | Path, out: str | Path | None = None) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if "run" not in cp:
        raise ConfigError("missing [run] section")
    run = cp["run"]
    case = run.get("case", "").strip()
    if case not in CASES:
        raise ConfigError(f"case must be one of {CASES}, got {case!r}")
    analyses = [a.strip() for a in run.get("analyses", "").split(",") if a.strip()]
    if not analyses:
        raise ConfigError("no analyses requested")
    bad = [a for a in analyses if a not in ANALYSES]
    if bad:
        raise ConfigError(f"unknown analyses {bad}; choose from {ANALYSES}")
    if "parameters" not in cp:
        raise ConfigError("missing [parameters] section")
    list_keys = {"seed", "probe"} | ({"alpha_rest", "beta", "gamma"} if case == "B" else set())
    params = {}
    for k, v in cp["parameters"].items():
        vals = parse_list(v)
        if not vals:
            raise ConfigError(f"parameter {k} is empty")
        params[k] = vals if k in list_keys or len(vals) > 1 else vals[0]
    missing = [k for k in REQUIRED[case] if k not in params]
    if missing:
        raise ConfigError(f"case {case} needs parameters {missing}")
    if case == "B":
        if len(params["alpha_rest"]) != 3 or len(params["beta"]) != 5 or len(params["gamma"]) != 5:
            raise ConfigError("case B needs 3 alpha_rest, 5 beta and 5 gamma coefficients")
    eps = parse_number(run.get("eps", "0.01"))
    ladder = parse_list(run.get("eps_ladder", "")) if run.get("eps_ladder") else []
    for e in [eps, *ladder]:
        if not 0 < e < 0.5:
            raise ConfigError(f"eps values must lie in (0, 0.5), got {e}")
    tol = dict(DEFAULT_TOLERANCES)
    if "tolerances" in cp:
        for k, v in cp["tolerances"].items():
            tol[k] = parse_number(v)
    for k, v in tol.items():
        if not v > 0:
            raise ConfigError(f"tolerance {k} must be positive, got {v}")
    section = {k: v for k, v in cp["section"].items()} if "section" in cp else {}
    torus = {k: v for k, v in cp["torus"].items()} if "torus" in cp else {}
    out_dir = Path(out) if out is not None else Path(run.get("out", "results"))
    return RunConfig(case, analyses, params, eps, ladder, tol, section, torus, out_dir, text)


# -- deterministic writers -----------------------------------------------------------


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return {"real": _clean(v.real), "imag": _clean(v.imag)}
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return float(f"{v:.17g}")
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, set):
        return sorted(_clean(x) for x in v)
    return v


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, (float, np.floating)) else x for x in row])


# -- analyses --------------------------------------------------------------------------


@dataclass
class Outcome:
    reports: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def check(self, ok: bool, message: str):
        if not ok:
            self.failures.append(message)


def _families(cfg: RunConfig):
    from .systems import CaseAFamily, CaseBFamily, case_a_standard_form, case_b_standard_form, scalar_test_system

    p = cfg.params
    if cfg.case == "A":
        fam = CaseAFamily(p["abar"], p["alpha"], p["beta"], p["gamma"])
        return fam, case_a_standard_form(fam)
    if cfg.case == "B":
        fam = CaseBFamily.constrained(p["omega"], p["alpha_rest"], p["beta"], p["gamma"])
        return fam, case_b_standard_form(fam)
    return None, scalar_test_system(p["rate"], int(p["power"]))


def _section_spec(cfg: RunConfig, fam, eps):
    from .stability import RosslerSection

    axes = {"x": 0, "y": 1, "z": 2}
    s = cfg.section
    if not s:
        raise ConfigError("orbit analysis of the full flow needs a [section] block")
    axis = axes.get(s.get("axis", "").strip())
    if axis is None:
        raise ConfigError("section axis must be x, y or z")
    direction = int(parse_number(s.get("direction", "1")))
    tol = cfg.tolerances["integrator"]
    return RosslerSection(fam.rossler(eps), axis, parse_number(s.get("offset", "0")), direction, rtol=tol, atol=tol)


def run_averaging(cfg, out_dir, oc: Outcome):
    from .averaging import AveragedSet, chebyshev_ladder, default_half_width, poincare_expansion_oracle

    _, s = _families(cfg)
    avg = AveragedSet(s)
    probes = cfg.params.get("probe", None)
    if probes is None:
        probes = [1.0] if s.dim == 1 else ([20.0, 1.0] if cfg.case == "A" else [20.0, 0.5])
    z = np.atleast_1d(np.asarray(probes, dtype=float))
    orders = range(1, 6) if cfg.case != "A" else range(1, 2)
    engine = np.array([avg.g(z, i) for i in orders])
    h = cfg.params.get("oracle_h", 1e-4 if cfg.case == "A" else default_half_width(z))
    oracle = poincare_expansion_oracle(s, z, eps_list=chebyshev_ladder(h))[: len(engine)]
    rel = np.abs(engine - oracle) / np.maximum(1.0, np.abs(oracle))
    rows = [(i, k, float(engine[i - 1][k]), float(oracle[i - 1][k]), float(rel[i - 1][k]))
            for i in orders for k in range(s.dim)]
    write_csv(out_dir / "averaging.csv", ["order", "component", "engine", "oracle", "relative_gap"], rows)
    limits = [cfg.tolerances["oracle"] if i <= 3 else 1e-4 for i in orders]
    ok = all(rel[i - 1].max() <= limits[i - 1] for i in orders)
    oc.check(ok, "averaged functions disagree with the expansion oracle")
    oc.reports["averaging"] = {"point": z, "engine": engine, "oracle": oracle, "relative_gap": rel,
                               "tolerance": {"quadrature": cfg.tolerances["quadrature"], "oracle": limits},
                               "oracle_half_width": h,
                               "quadrature_error_estimate": avg.last_error_estimate}
    if cfg.case == "scalar":
        rate, power = cfg.params["rate"], int(cfg.params["power"])
        if power == 1:
            exact = np.array([[(2 * math.pi * rate) ** i * z[0] / math.factorial(i)] for i in orders])
            gap = float(np.max(np.abs(engine - exact) / np.abs(exact)))
            oc.reports["averaging"]["exact_gap"] = gap
            oc.check(gap <= 1e-10, f"scalar-linear averaged functions off by {gap:.2e}")


def run_bifurcation(cfg, out_dir, oc: Outcome):
    from . import lyapschmidt as ls
    from .averaging import AveragedSet

    if cfg.case != "B":
        raise ConfigError("bifurcation analysis applies to case B")
    _, s = _families(cfg)
    avg = AveragedSet(s)
    chart = ls.axis_chart()
    sup = ls.verify_chart(avg, chart)
    grid = np.linspace(0.5, 100.0, 100)
    f1 = max(abs(float(ls.bifurcation_f(avg, chart, [r], 1)[0])) for r in grid)
    oc.check(f1 <= cfg.tolerances["invariant"], f"f_1 does not vanish on the chart (sup {f1:.2e})")
    rep = ls.find_simple_zero(avg, chart, 2, box=((1e-3,), (100.0,)))
    z0, z1, z2 = ls.z_series(avg, chart, rep)
    oc.reports["bifurcation"] = {"chart_sup_g1": sup, "f1_sup": f1, "report": rep.to_dict(),
                                 "z_series": {"z0": z0, "z1": z1, "z2": z2},
                                 "tolerance": {"f_zero": 1e-10, "invariant": cfg.tolerances["invariant"]}}
    write_csv(out_dir / "bifurcation_f2.csv", ["r", "f2"],
              [(float(r), float(ls.bifurcation_f(avg, chart, [r], 2)[0])) for r in np.linspace(1.0, 60.0, 60)])
    return z0, z1, z2


def run_orbit(cfg, out_dir, oc: Outcome):
    from .stability import StroboscopicMap, locate_periodic_orbit

    fam, s = _families(cfg)
    eps = cfg.eps
    seed = cfg.params.get("seed")
    if seed is None:
        raise ConfigError("orbit analysis needs a standard-form 'seed' parameter")
    seed = np.asarray(seed, dtype=float)
    strob = locate_periodic_orbit(StroboscopicMap(s, rtol=cfg.tolerances["integrator"], atol=cfg.tolerances["integrator"]),
                                  seed, eps, tol=cfg.tolerances["newton"])
    rep = {"eps": eps, "standard_form": strob.to_dict(),
           "tolerance": {"newton": cfg.tolerances["newton"], "integrator": cfg.tolerances["integrator"]}}
    if cfg.section and fam is not None:
        sec = _section_spec(cfg, fam, eps)
        if "seed" in cfg.section:
            q0 = np.asarray(parse_list(cfg.section["seed"]), dtype=float)
        else:
            q0 = sec.project(s.to_rossler(parse_number(cfg.section.get("theta", "0")), strob.fixed_point, eps))
        orb = locate_periodic_orbit(sec, q0, eps, tol=cfg.tolerances["newton"])
        d = orb.diagnostics
        liouville = abs(d["det"] - d["liouville_det"])
        oc.check(liouville <= 1e-8, f"Liouville check failed ({liouville:.2e})")
        rep["section"] = orb.to_dict()
        rep["section"]["liouville_gap"] = liouville
        rows = []
        seeds = [parse_list(x) for x in cfg.section.get("seeds", "").split("|") if x.strip()]
        n = int(parse_number(cfg.section.get("crossings", "50")))
        for k, sd in enumerate(seeds):
            q = sec.project(np.asarray(sd, dtype=float))
            for it in range(n + 1):
                rows.append((k, it, float(q[0]), float(q[1]), float(np.linalg.norm(q - orb.fixed_point))))
                if it < n:
                    q = sec.map(q)
        write_csv(out_dir / "crossings.csv", ["seed", "crossing", "u", "v", "distance"], rows)
        rep["section"]["seed_final_distance"] = [r[4] for r in rows if r[1] == n]
    oc.reports["orbit"] = rep
    return strob


def run_stability(cfg, out_dir, oc: Outcome, series=None):
    from .averaging import AveragedSet
    from .oracles import case_a_constants, case_b_printed
    from .stability import (StabilityReport, a_matrices, classify_jacobian, classify_ladder,
                            k_determined_ladder, routh_hurwitz_2)

    fam, s = _families(cfg)
    avg = AveragedSet(s)
    if cfg.case == "B":
        if series is None:
            raise ConfigError("case B stability needs the bifurcation analysis")
        z0, z1, z2 = series
        A = a_matrices(avg, z0, z1, z2)
        lad = k_determined_ladder(*A)
        pc = case_b_printed(fam.omega, fam.alpha_coeffs, fam.beta_coeffs, fam.gamma_coeffs)
        consts = {k: pc[k] for k in ("lambda1", "lambda2", "delta")}
        rep = StabilityReport("B", consts, A, {k: lad[k] for k in ("slow", "fast", "offdiagonal_residual")},
                              None, classify_ladder(lad))
    elif cfg.case == "A":
        z = np.asarray(cfg.params.get("seed"), dtype=float)
        from .findings import solve_first_order_zero

        z0 = solve_first_order_zero(avg, z)
        J = avg.jacobian(z0, 1)
        pc = case_a_constants(fam.abar, fam.alpha, fam.beta, fam.gamma)
        printed = routh_hurwitz_2(pc["d1"], pc["d0"])
        rep = StabilityReport("A", {"d0": pc["d0"], "d1": pc["d1"]}, (J, None, None), None, None,
                              classify_jacobian(J), printed,
                              ["classification uses the characteristic polynomial of Dg_1 at the zero"])
    else:
        raise ConfigError("stability analysis applies to cases A and B")
    d = rep.to_dict()
    d["tolerance"] = {"sign_floor": 1e-9, "quadrature": cfg.tolerances["quadrature"]}
    oc.reports["stability"] = d


def run_scaling(cfg, out_dir, oc: Outcome, series):
    from .averaging import AveragedSet  # noqa: F401
    from .stability import StroboscopicMap, locate_periodic_orbit, scaling_slope

    if not cfg.eps_ladder:
        raise ConfigError("scaling analysis needs run.eps_ladder")
    _, s = _families(cfg)
    z0, z1, z2 = series
    h = StroboscopicMap(s, rtol=cfg.tolerances["integrator"], atol=cfg.tolerances["integrator"])
    rows, fast, slow = [], [], []
    for e in cfg.eps_ladder:
        orb = locate_periodic_orbit(h, z0 + e * z1 + e * e * z2, e, tol=cfg.tolerances["newton"])
        mu = np.sort(np.real(orb.multipliers))
        fast.append(1 - mu[0])
        slow.append(1 - mu[1])
        rows.append((e, float(mu[0]), float(mu[1]), float((mu[0] - 1) / e), float((mu[1] - 1) / e**3)))
    write_csv(out_dir / "scaling.csv", ["eps", "fast_multiplier", "slow_multiplier", "fast_rate", "slow_rate"], rows)
    sf, ss = scaling_slope(cfg.eps_ladder, fast), scaling_slope(cfg.eps_ladder, slow)
    oc.reports["scaling"] = {"fast_slope": sf, "slow_slope": ss, "rows": rows,
                             "tolerance": {"fast": 0.05, "slow": 0.1, "newton": cfg.tolerances["newton"]}}
    oc.check(abs(ss - 3) <= 0.1, f"slow multiplier slope {ss:.4f} outside 3 +- 0.1")
    if abs(sf - 1) > 0.05:
        oc.reports["scaling"]["note"] = "fast slope outside 1 +- 0.05: second-order term is large on this ladder"


def run_torus(cfg, out_dir, oc: Outcome):
    from .averaging import AveragedSet
    from .findings import solve_first_order_zero
    from .oracles import case_a_jordan_map
    from .stability import RosslerSection
    from .systems import CaseAFamily, case_a_standard_form
    from .torus import FastRosslerSection, find_crossing, jordan_normalize, l1_terms, torus_regime_scan

    if cfg.case != "A":
        raise ConfigError("torus analysis applies to case A")
    p, t = cfg.params, cfg.torus
    lo, hi = parse_number(t.get("gamma_min", "1.5")), parse_number(t.get("gamma_max", "4.5"))

    def family(g):
        return AveragedSet(case_a_standard_form(CaseAFamily(p["abar"], p["alpha"], p["beta"], g)))

    z = solve_first_order_zero(family(p["gamma"]), np.asarray(p["seed"], dtype=float))
    cross = find_crossing(family, (lo, hi), z, parameter="gamma")
    nf = jordan_normalize(family(cross.mu0), cross, case_a_jordan_map(p["abar"], p["beta"]))
    cubic, quad = l1_terms(nf.second, nf.third, nf.omega0)
    l1 = cubic + quad
    l1_floor = 1e-9 * max(1.0, abs(cubic) + abs(quad))
    rep = {"crossing": cross.to_dict(), "l1": l1, "l1_terms": [cubic, quad], "l1_floor": l1_floor,
           "tolerance": {"re_lambda": 1e-10, "rotation_block": 1e-6}}
    eps = parse_number(t.get("eps", str(cfg.eps)))
    axes = {"x": 0, "y": 1, "z": 2}
    s = cfg.section
    axis, direction = axes[s.get("axis", "z").strip()], int(parse_number(s.get("direction", "1")))
    step = parse_number(t.get("step", "0.25"))
    mus = list(np.round(np.arange(lo, hi + 0.5 * step, step), 12))

    def fam(g):
        return CaseAFamily(p["abar"], p["alpha"], p["beta"], g)

    table = torus_regime_scan(
        lambda g, rev: FastRosslerSection(fam(g).rossler(eps), axis, 0.0, direction, reverse=rev),
        lambda g: RosslerSection(fam(g).rossler(eps), axis, 0.0, direction),
        mus, eps, parse_list(t.get("orbit_seed", "0.05, -0.001")), parse_number(t.get("offset", "0.001")),
        l1=l1, iterations=int(parse_number(t.get("iterations", "4000"))),
        transient=int(parse_number(t.get("transient", "150000"))), l1_floor=l1_floor)
    rep["regime"] = table.to_dict()
    write_csv(out_dir / "regime.csv", ["gamma", "multiplier_modulus", "rotation_at_orbit", "forward", "reverse"],
              [(r.mu, r.multiplier_modulus, r.rotation_at_orbit, r.forward, r.reverse) for r in table.rows])
    pts = []
    for r in table.rows:
        for rr in (r.forward_report, r.reverse_report):
            if rr is not None and rr.confirmed:
                pts += [(r.mu, int(rr.reversed), float(u), float(v)) for u, v in rr.points]
    write_csv(out_dir / "curve_points.csv", ["gamma", "reversed", "u", "v"], pts)
    oc.reports["torus"] = rep


def run_findings(cfg, out_dir, oc: Outcome):
    from .findings import case_a_findings, case_b_findings

    if cfg.case == "A":
        p = cfg.params
        recs = case_a_findings(p["abar"], p["alpha"], p["beta"], p["gamma"], p.get("seed", (52.8, -0.72)))
    elif cfg.case == "B":
        recs = case_b_findings()
    else:
        raise ConfigError("findings apply to cases A and B")
    oc.reports["findings"] = {"records": [r.to_dict() for r in recs],
                              "tolerance": {"match_relative": 1e-6, "match_absolute": 1e-9}}


def cmd_analyze(cfg: RunConfig) -> int:
    out_dir = cfg.out
    out_dir.mkdir(parents=True, exist_ok=True)
    oc = Outcome()
    started = time.time()
    series = None
    want = set(cfg.analyses)
    if "averaging" in want:
        run_averaging(cfg, out_dir, oc)
    if want & {"bifurcation", "stability", "scaling"} and cfg.case == "B":
        series = run_bifurcation(cfg, out_dir, oc)
    if "orbit" in want:
        run_orbit(cfg, out_dir, oc)
    if "stability" in want:
        run_stability(cfg, out_dir, oc, series)
    if "scaling" in want:
        run_scaling(cfg, out_dir, oc, series)
    if "torus" in want:
        run_torus(cfg, out_dir, oc)
    if "findings" in want:
        run_findings(cfg, out_dir, oc)
    for name, rep in oc.reports.items():
        write_json(out_dir / f"{name}.json", rep)
    write_json(out_dir / "checks.json", {"failures": oc.failures, "passed": not oc.failures})
    manifest = {
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config_sha256": hashlib.sha256(cfg.source.encode()).hexdigest(),
        "analyses": cfg.analyses,
        "started_unix": started,
        "elapsed_seconds": time.time() - started,
        "files": sorted(p.name for p in out_dir.iterdir() if p.name != "manifest.json"),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for f in oc.failures:
        print(f"invariant failure: {f}", file=sys.stderr)
    return EXIT_INVARIANT if oc.failures else EXIT_OK


# -- selftest ----------------------------------------------------------------------------


def cmd_selftest(tolerance: float = 1e-10, perturb: float = 0.0) -> int:
    """Quick suite: jet axioms, scalar-linear averaging, Routh-Hurwitz and a
    synthetic rotation map.  ``perturb`` shifts the scalar fixture (used to
    check that a mismatch is reported)."""
    from .averaging import AveragedSet
    from .jets import Jet, JetSpec
    from .stability import routh_hurwitz_2
    from .systems import scalar_test_system
    from .torus import detect_invariant_curve

    if not tolerance > 0:
        print(f"config error: tolerance must be positive, got {tolerance}", file=sys.stderr)
        return EXIT_CONFIG
    results = []
    spec = JetSpec.total(2, 4)
    x, y = Jet.variable(spec, 0, 0.3), Jet.variable(spec, 1, -0.2)
    lhs = (x + y) * (x - y)
    rhs = x * x - y * y
    results.append(("jet ring identity", float(np.max(np.abs(lhs.coeffs - rhs.coeffs))) <= tolerance))
    e = (x.sin() ** 2 + x.cos() ** 2) - 1.0
    results.append(("jet trigonometric identity", float(np.max(np.abs(e.coeffs))) <= 1e3 * tolerance))
    avg = AveragedSet(scalar_test_system(1.0, 1))
    z = 0.7
    gap = max(abs(avg.g([z], i)[0] - ((2 * math.pi) ** i * z / math.factorial(i) + perturb))
              / ((2 * math.pi) ** i * z / math.factorial(i)) for i in range(1, 6))
    results.append(("scalar-linear averaging", gap <= tolerance))
    rng = np.random.default_rng(0)
    agree = True
    for _ in range(200):
        p, q = rng.normal(size=2)
        roots = np.roots([1.0, p, q])
        direct = "stable" if np.all(roots.real < 0) else "unstable"
        agree &= routh_hurwitz_2(p, q) == direct
    results.append(("Routh-Hurwitz vs roots", bool(agree)))

    class Rotation:
        def __init__(self, angle):
            self.c, self.s = math.cos(angle), math.sin(angle)

        def map(self, q, eps=None):
            return np.array([self.c * q[0] - self.s * q[1], self.s * q[0] + self.c * q[1]])

    rho = (math.sqrt(5) - 1) / 20
    rep = detect_invariant_curve(Rotation(2 * math.pi * rho), [1.0, 0.0], 400, 0, center=[0.0, 0.0])
    results.append(("synthetic rotation curve", rep.confirmed and abs(rep.rotation_number - rho) < 1e-4))
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_INVARIANT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="zerohopf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    an = sub.add_parser("analyze", help="run the analyses listed in a config file")
    an.add_argument("--config", required=True)
    an.add_argument("--out", default=None)
    st = sub.add_parser("selftest", help="run the quick consistency suite")
    st.add_argument("--tolerance", type=float, default=1e-10)
    st.add_argument("--perturb-fixture", type=float, default=0.0, help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest(args.tolerance, args.perturb_fixture)
    try:
        cfg = load_config(args.config, args.out)
        return cmd_analyze(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
