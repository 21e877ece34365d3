"""Case B end to end: averaged functions, the bifurcation function, the
periodic orbit of the full Rossler flow and its stability.

Run with ``python tutorials/01_case_b_periodic_orbit.py``.
"""
import math

import numpy as np

from zerohopf import lyapschmidt as ls
from zerohopf.averaging import AveragedSet
from zerohopf.findings import fig1_family
from zerohopf.oracles import FIG1
from zerohopf.stability import (
    RosslerSection,
    a_matrices,
    classify_ladder,
    k_determined_ladder,
    locate_periodic_orbit,
)
from zerohopf.systems import case_b_standard_form

family = fig1_family()
avg = AveragedSet(case_b_standard_form(family))

# g_1 vanishes on the axis z = 0, so g_1 alone cannot pick a periodic orbit.
chart = ls.axis_chart()
print("sup |g_1| on the axis:", ls.verify_chart(avg, chart))

# The reduced second-order function f_2(r) has one simple zero.
report = ls.find_simple_zero(avg, chart, 2)
z0, z1, z2 = ls.z_series(avg, chart, report)
print("simple zero r* =", report.u_star[0], " Df_2 =", report.jacobian[0, 0])

# Seed Newton on the section x = 0 of the full flow with z(eps).
eps = float(FIG1["eps"])
section = RosslerSection(family.rossler(eps), axis=0, direction=-1)
seed = section.project(avg.source.to_rossler(math.pi / 2, z0 + eps * z1 + eps**2 * z2, eps))
orbit = locate_periodic_orbit(section, seed, eps)
print("fixed point", orbit.fixed_point, "residual", orbit.residual)
print("multiplier moduli", np.abs(orbit.multipliers))

# The eps-expansion of the monodromy predicts the same verdict.
ladder = k_determined_ladder(*a_matrices(avg, z0, z1, z2))
print("fast branch  eps^%d coefficient %.6g" % (ladder["fast"]["multiplier_rate"], ladder["fast"]["coefficient"]))
print("slow branch  eps^%d coefficient %.6g" % (ladder["slow"]["multiplier_rate"], ladder["slow"]["coefficient"]))
print("verdict:", classify_ladder(ladder))
