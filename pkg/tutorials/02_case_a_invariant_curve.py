"""Case A: the eigenvalue crossing of the averaged field, the first
Lyapunov coefficient, and a closed invariant curve of the full flow's
return map.

Run with ``python tutorials/02_case_a_invariant_curve.py`` (about a minute).
"""
import numpy as np

from zerohopf.averaging import AveragedSet
from zerohopf.findings import solve_first_order_zero, fig2_family
from zerohopf.oracles import FIG2
from zerohopf.stability import RosslerSection, locate_periodic_orbit
from zerohopf.systems import case_a_standard_form
from zerohopf.torus import FastRosslerSection, detect_invariant_curve, find_crossing, jordan_normalize, l1_terms


def averaged(gamma):
    return AveragedSet(case_a_standard_form(fig2_family(gamma)))


zero = solve_first_order_zero(averaged(FIG2["gamma"]), np.array([52.8, -0.72]))
crossing = find_crossing(averaged, (1.5, 4.5), zero, parameter="gamma")
print("crossing at gamma =", crossing.mu0, " omega0 =", crossing.omega0, " speed =", crossing.speed)

normal = jordan_normalize(averaged(crossing.mu0), crossing)
cubic, quad = l1_terms(normal.second, normal.third, normal.omega0)
print("l1 terms: cubic %.6g, quadratic %.6g, sum %.3g" % (cubic, quad, cubic + quad))

# On the section z = 0 the orbit of the full flow is unstable for gamma a
# little below 4.34 and is surrounded by an attracting closed curve.
gamma, eps = 4.25, FIG2["eps"]
params = fig2_family(gamma).rossler(eps)
orbit = locate_periodic_orbit(RosslerSection(params, axis=2, direction=1), [0.0506, -0.001], eps)
print("orbit multiplier moduli", np.abs(orbit.multipliers))
fast = FastRosslerSection(params, axis=2, direction=1)
rep = detect_invariant_curve(fast, orbit.fixed_point + [0.001, 0.0], iterations=4000, transient=150000,
                             center=orbit.fixed_point)
print(rep.status, "| rotation number", rep.rotation_number, "| defect / diameter",
      None if rep.closure_defect is None else rep.closure_defect / rep.diameter)
