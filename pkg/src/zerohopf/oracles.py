"""Published closed forms, transcribed once and used only as cross-checks.

Nothing in the numerical engine imports from here.  Expressions that are
undefined for the given arguments (negative radicands, zero denominators)
return an :class:`InvalidDomain` marker instead of raising, so that a
comparison table can still be assembled.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any

import numpy as np

__all__ = [
    "InvalidDomain",
    "DiscrepancyRecord",
    "case_a_g1_closed",
    "case_a_constants",
    "case_b_g1",
    "case_b_g2_printed",
    "case_b_g3_printed",
    "case_b_printed",
    "case_b_delta_exact",
    "standard_analysis_template",
    "template_has_positive_zero",
    "case_a_jordan_map",
    "FIG1",
    "FIG2",
    "FIG2_CAPTION_L1",
]

PI = math.pi

# Figure fixtures; exact rationals where the captions give them.
FIG1 = {
    "eps": Fraction(1, 50),
    "omega": Fraction(39, 32),
    "alpha_rest": (Fraction(55), Fraction(37, 40), Fraction(57, 5)),
    "beta": (Fraction(-1), Fraction(-1), Fraction(-177, 10), Fraction(-1), Fraction(18)),
    "gamma": (Fraction(1), Fraction(-1), Fraction(0), Fraction(193, 10), Fraction(-247, 10)),
    "lambda1_caption": Fraction(-123, 239),
    "lambda2_caption": Fraction(-116, 239),
    "delta_caption": Fraction(30963, 272),
    "seeds": (
        (0.0, 425 / 1000, 39725 / 100000),
        (0.0, 428 / 1000, 393 / 1000),
        (0.0, 4471 / 10530, 751 / 1902),
        (0.0, 4907 / 11449, 751 / 1902),
    ),
}
FIG2 = {
    "eps": 0.0012,
    "abar": -1.0,
    "alpha": 41.0,
    "beta": -38.0,
    "gamma": 4.299,
    "gamma_bar_caption": 3.0,
    "seeds": ((46 / 1000, -85 / 10000, 0.0), (441 / 10000, 0.0, 0.0)),
}
FIG2_CAPTION_L1 = 2086808 * PI / 25


@dataclass(frozen=True)
class InvalidDomain:
    """Marker for a closed form that is undefined at the given arguments."""

    quantity: str
    reason: str

    def __bool__(self):
        return False

    def to_dict(self):
        return {"invalid": True, "quantity": self.quantity, "reason": self.reason}


def _sqrt(x: float, name: str):
    if x < 0:
        return InvalidDomain(name, f"negative radicand {x:.17g}")
    return math.sqrt(x)


@dataclass
class DiscrepancyRecord:
    """Engine value versus published value for one quantity.

    ``verdict`` is ``"match"`` when the relative gap is at most 1e-6 or the
    absolute gap at most 1e-9, ``"printed-formula-invalid-domain"`` when the
    published expression is undefined, and ``"mismatch"`` otherwise.
    """

    name: str
    engine_value: Any
    printed_value: Any
    gap: Any
    abs_gap: float | None = None
    rel_gap: float | None = None
    verdict: str = "mismatch"
    note: str = ""

    @classmethod
    def compare(cls, name, engine, printed, note=""):
        if isinstance(printed, InvalidDomain) or (
            isinstance(printed, (list, tuple)) and any(isinstance(p, InvalidDomain) for p in printed)
        ):
            return cls(name, engine, printed, "not comparable", None, None, "printed-formula-invalid-domain", note)
        try:
            e = np.asarray(engine, dtype=float)
            p = np.asarray(printed, dtype=float)
            gap = e - p
        except (TypeError, ValueError):
            return cls(name, engine, printed, "not comparable", None, None, "mismatch", note)
        abs_gap = float(np.max(np.abs(gap)))
        scale = float(np.max(np.abs(p)))
        rel_gap = abs_gap / scale if scale > 0 else (0.0 if abs_gap == 0 else math.inf)
        verdict = "match" if (rel_gap <= 1e-6 or abs_gap <= 1e-9) else "mismatch"
        return cls(name, engine, printed, gap.tolist(), abs_gap, rel_gap, verdict, note)

    def to_dict(self):
        def conv(v):
            if isinstance(v, InvalidDomain):
                return v.to_dict()
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, Fraction):
                return {"fraction": f"{v.numerator}/{v.denominator}", "value": float(v)}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v

        return {k: conv(v) for k, v in asdict(self).items()}


# -- Case A ----------------------------------------------------------------------


def case_a_g1_closed(abar, alpha, beta, gamma, r, z) -> np.ndarray:
    """First averaged function of the Case A standard form."""
    a = abar
    s = 2.0 - a * a
    g1 = -PI * r * (a * (beta + a * (alpha - gamma + r * z)) - alpha + gamma) / s**1.5
    g2 = PI / s**2.5 * (
        -(a**4) * z * (alpha - gamma + r * z)
        - 3 * beta * a**3 * z
        + a**2 * (r + z * (alpha - gamma))
        + 6 * beta * a * z
        + 2 * z * (alpha - gamma + 2 * r * z)
    )
    return np.array([g1, g2])


def case_a_constants(abar, alpha, beta, gamma) -> dict:
    """Every Case A constant as printed.

    Keys: ``d0``, ``d1``, ``ell``, ``ell1``, ``gamma_bar``, ``omega0``,
    ``dre_dgamma``, ``r_bar``, ``z_bar`` (for the root lying in ``r > 0``),
    ``det_dg1``, ``p_stability`` and ``p_torus`` (monic quadratic
    coefficients ``(p, q)`` of the two printed characteristic polynomials).
    """
    a, al, be, ga = abar, alpha, beta, gamma
    s = 2.0 - a * a
    first = ga - al - be * a * (a * a - 1)
    second = al * (a * a - 1) + a * (be - a * ga) + ga
    d0 = first * second
    d1 = ga - al + be * a
    ell = (be / a) * (
        16 * be * (2 * be + 1)
        + 3 * (1 - 2 * be) ** 2 * a**6
        + (-40 * be**2 + 6 * be + 9) * a**4
        + 2 * (2 * be + 1) * (4 * be + 5) * a**2
    )
    ell1 = ell / (math.sqrt(s) * (a * a + 4) ** 2)
    rad_r = 2 * (a * a - 2) * (al + be * a * (a * a - 1) - ga) * second
    sign = 1.0 if a > 0 else -1.0
    r_root = _sqrt(rad_r, "r_bar")
    r_bar = sign * r_root / a**3 if not isinstance(r_root, InvalidDomain) else r_root
    den_z = s * (al + be * a**3 - be * a - ga)
    if den_z == 0:
        z_bar = InvalidDomain("z_bar", "zero denominator")
    else:
        z_root = _sqrt((-al + al * a * a - a * a * ga + be * a + ga) / den_z, "z_bar")
        z_bar = sign * a * z_root if not isinstance(z_root, InvalidDomain) else z_root
    det_dg1 = -4 * PI**2 * (al + be * a * (a * a - 1) - ga) * second / (a * a * (a * a - 2) ** 3)
    p_stab = (d1 / (a * a * math.sqrt(s)), d0 / (a * a * s**3))
    p_torus = (
        -((a * a - 2) ** 3) * (be * a - al + ga) / (a * a * s**3.5),
        -(al + be * a**3 - be * a - ga) * (al * a * a - al - a * a * ga + be * a + ga) / (a * a * (a * a - 2) ** 3),
    )
    return {
        "d0": d0,
        "d1": d1,
        "ell": ell,
        "ell1": ell1,
        "gamma_bar": al - a * be,
        "omega0": abs(be) * a * a / s**1.5,
        "dre_dgamma": 1.0 / (2 * a * a * math.sqrt(s)),
        "r_bar": r_bar,
        "r_bar_radicand": rad_r,
        "z_bar": z_bar,
        "det_dg1": det_dg1,
        "p_stability": p_stab,
        "p_torus": p_torus,
    }


def case_a_jordan_map(abar, beta) -> np.ndarray:
    """Printed linear map ``(u, v) -> (r, z)`` (acting on offsets)."""
    a = abar
    k = -2 * beta * (a * a - 2) / (a * a + 4)
    return np.array([[-2 * k, k * a], [0.0, 1.0]])


# -- Case B ----------------------------------------------------------------------


def case_b_g1(omega, alpha1, gamma1, r, z) -> np.ndarray:
    w = omega
    return np.array([
        PI * r * (alpha1 + gamma1 * (1 - w * w)) / w**3,
        -2 * PI * z * (gamma1 + alpha1 * (1 - w * w)) / w**3,
    ])


def case_b_g2_printed(omega, alpha, beta, gamma, r, z, grouping: str = "literal") -> np.ndarray:
    """Second averaged function as printed (general coefficients).

    ``grouping="literal"`` keeps the printed bracket, which puts the
    ``-2 gamma_2 r omega**5`` term inside ``omega**3 (...)``;
    ``grouping="regrouped"`` moves that term outside the bracket.
    """
    if grouping not in ("literal", "regrouped"):
        raise ValueError("grouping must be 'literal' or 'regrouped'")
    w = omega
    a1, a2 = alpha[0], alpha[1]
    b1 = beta[0]
    g1, g2 = gamma[0], gamma[1]
    inner = r * (a1 * z - 2 * (a2 + g2) + g1 * (3 * z - b1)) + 2 * z * (a1 + g1) * (2 * a1 + g1)
    w5 = 2 * g2 * r * w**5
    bracket = w**3 * (inner - w5) if grouping == "literal" else w**3 * inner + w5
    first = PI / (2 * w**6) * (
        PI * r * (a1 + g1 * (1 - w * w)) ** 2
        - bracket
        + w * (a1 + g1) * (r * (4 * z - 3 * b1) + 6 * z * (a1 + g1))
    )
    second = PI / (2 * w**7) * (
        r * r * (1 - w * w) * (a1 * (w * w - 1) + g1 * (2 * w * w - 1))
        + 2 * r * (w * w - 1) * (a1 + g1) * (a1 * (2 * w * w - 3) + g1 * (w * w - 3))
        + 2 * w * z * (
            2 * PI * (a1 * (1 - w * w) + g1) ** 2
            + 2 * a2 * w**5
            + w**3 * (a1 * (z - b1) - 2 * (a2 + g2))
            - 3 * w * (a1 + g1) * (z - b1)
        )
    )
    return np.array([first, second])


def case_b_g3_printed(omega, alpha, beta, gamma, r, z) -> np.ndarray:
    """Third averaged function as printed (first two constraints imposed)."""
    w = omega
    a3 = alpha[2]
    b1, b2 = beta[0], beta[1]
    g1, g2, g3 = gamma[0], gamma[1], gamma[2]
    w2 = w * w
    first = PI / (16 * w**5) * (
        g1 * r**3 * (1 - w2)
        + 16 * g1**2 * r**2 * (w2 - 1)
        + 4 * r * (
            4 * w2 * (a3 - b1 * g2 - b2 * g1 - 3 * g1**3 * (w**4 - 3 * w2 + 2) - g3 * w2 + g3)
            + g1 * (8 - 3 * w2) * z**2
            + z * (b1 * g1 * (w2 - 6) - 2 * w * (w2 - 2) * (PI * g1**2 * (w2 - 2) + g2 * w))
        )
        - 8 * g1 * w2 * z * (
            2 * (b1 * g1 * (w2 + 2) + 2 * w * (w2 - 2) * (PI * g1**2 * (w2 - 2) + 2 * g2 * w))
            + g1 * (11 * w2 - 26) * z
        )
    )
    second = PI / (24 * w**7) * (
        r**2 * (
            6 * w2 * (b1 * g1 * (w2 - 3) - 2 * w * (w2 - 1) * (PI * g1**2 * (w2 - 2) + g2 * w))
            + g1 * (2 * w**6 - 29 * w**4 + 37 * w2 - 10) * z
        )
        + 12 * g1 * r * w2 * (
            2 * (b1 * g1 * (w**4 + 3 * w2 - 6) + 2 * w * (w**4 - 3 * w2 + 2) * (PI * g1**2 * (w2 - 2) + 2 * g2 * w))
            + 3 * g1 * (w**4 - 7 * w2 + 6) * z
        )
        + 2 * w2 * z * (
            4 * w2 * (
                6 * a3 * (w2 - 1)
                - 3 * b2 * g1 * (w2 - 4)
                + g1 * (w2 - 2) * (g1**2 * (15 * (w2 - 1) + 4 * PI**2 * (w2 - 2) ** 2) + 12 * PI * g2 * w * (w2 - 2))
                - 6 * g3
            )
            - 3 * b1**2 * g1 * (w2 + 6)
            + 12 * b1 * w * (2 * PI * g1**2 * (w**4 - 4) - g2 * w * (w2 - 4))
            + 9 * g1 * (w2 - 6) * z**2
            + 6 * z * (2 * w * (w2 - 4) * (3 * PI * g1**2 * (w2 - 2) + g2 * w) - b1 * g1 * (w2 - 12))
        )
    )
    return np.array([first, second])


def case_b_delta_exact(omega, beta, gamma, alpha3) -> Fraction:
    """``delta`` in exact rational arithmetic (inputs must be rationals)."""
    w = Fraction(omega)
    b1, b2 = Fraction(beta[0]), Fraction(beta[1])
    g1, g2, g3 = Fraction(gamma[0]), Fraction(gamma[1]), Fraction(gamma[2])
    a3 = Fraction(alpha3)
    num = b1 * g2 + b2 * g1 + g1**3 * (w**4 - 3 * w**2 + 2) + g3 * (w**2 - 1) - a3
    return num / (g1 * (1 - w**2))


def case_b_printed(omega, alpha, beta, gamma) -> dict:
    """Case B constants and closed-form functions as printed.

    ``alpha``, ``beta``, ``gamma`` hold the five coefficients each.  The
    returned callables take ``r`` (and ``z`` where relevant).
    """
    w = float(omega)
    al = [float(v) for v in alpha]
    be = [float(v) for v in beta]
    ga = [float(v) for v in gamma]
    g1 = ga[0]
    lam1 = g1 * (w * w - 2)
    lam2 = g1 * (1 - w * w)
    den = g1 * (1 - w * w)
    delta = (be[0] * ga[1] + be[1] * g1 + g1**3 * (w**4 - 3 * w * w + 2) + ga[2] * (w * w - 1) - al[2]) / den
    r_root = _sqrt(delta / 3, "r_star")
    r_star = 4 * w * r_root if not isinstance(r_root, InvalidDomain) else r_root

    def f1(r):
        return PI * r * (al[1] - be[0] * g1 + ga[1] * (1 - w * w)) / w**3

    def f2(r):
        return 3 * PI * g1 * (w * w - 1) * r / (16 * w**5) * (r * r - 16 * w * w * delta / 3)

    b1, b2 = be[0], be[1]
    g2, g3 = ga[1], ga[2]
    a3 = al[2]
    w2 = w * w
    lambda1_22 = (
        2 * PI * g3 * (w2 - 1) * (2 * w**6 - 13 * w**4 + 4 * w2 - 20) * delta / (9 * w**5 * (w2 - 2))
        + 2 * PI**2 * b1 * g1**2 * (w**4 - 4) / w**4
        - PI * g1 * (b1**2 * (w2 + 6) + 4 * w2 * (b2 * (w2 - 4) - 4 * PI * g2 * w * (w2 - 2) ** 2)) / (4 * w**5)
        + PI * g1**3 * (w2 - 2) * (9 * w2 + 4 * PI**2 * (w2 - 2) ** 2 - 9) / (3 * w**3)
        + PI * (2 * a3 * (w2 - 1) - b1 * g2 * (w2 - 4) - 2 * g3) / w**3
    )
    return {
        "lambda1": lam1,
        "lambda2": lam2,
        "delta": delta,
        "r_star": r_star,
        "A0_22": 2 * PI * g1 * (w * w - 2) / w,
        "Delta": 2 * PI * g1 * (w * w - 2) / w,
        "Lambda0_22": g1 * (w * w - 2) * 2 * PI / w,
        "Lambda1_22": lambda1_22,
        "fast_rate_coeff": lam1 * 2 * PI / w,
        "fast_multiplier_coeff": lam1 * 2 * PI / w**3,
        "slow_multiplier_coeff": lam2 * 2 * PI * delta / w**3,
        "alpha1_constraint": g1 * (w * w - 1),
        "alpha2_constraint": be[0] * g1 + ga[1] * (w * w - 1),
        "f1": f1,
        "f2": f2,
        "g1": lambda r, z: case_b_g1(w, al[0], g1, r, z),
        "g2": lambda r, z, grouping="literal": case_b_g2_printed(w, al, be, ga, r, z, grouping),
        "g3": lambda r, z: case_b_g3_printed(w, al, be, ga, r, z),
    }


def standard_analysis_template(omega, alpha_next, gamma_next, r, z) -> np.ndarray:
    """``g_{l+1}`` when the first ``l`` coefficients of ``alpha`` and ``gamma`` vanish."""
    w = omega
    return np.array([
        PI * r * (alpha_next + gamma_next * (1 - w * w)) / w**3,
        -2 * PI * z * (gamma_next + alpha_next * (1 - w * w)) / w**3,
    ])


def template_has_positive_zero(omega, alpha_next, gamma_next, tol: float = 1e-14) -> bool:
    """Whether the template vanishes at some ``r > 0``; false whenever its
    ``r``-coefficient is nonzero."""
    return abs(alpha_next + gamma_next * (1 - omega * omega)) <= tol
