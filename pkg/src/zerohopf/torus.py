"""Neimark-Sacker analysis of averaged fields and invariant-curve detection.

The averaged side works on any object exposing ``g(z, 1)``, ``jacobian(z, 1)``
and ``g_derivatives(z, 1, k)``; :class:`AveragedSet` and :class:`JetField`
both qualify.  Eigenvalues are taken of ``scale * Dg_1`` where ``scale``
defaults to ``1/T``, so frequencies are in units of the averaged flow
``x' = g_1(x) / T``.

The map side iterates a return map (forward or time-reversed), fits a
closed curve in polar angle around the fixed point, and reports closure
defect and rotation number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numba
import numpy as np
from scipy.optimize import brentq
from scipy.spatial.distance import pdist

from .jets import Jet, JetSpec, extract_tensor
from .stability import (
    EscapeError,
    PoincareMapHandle,
    SectionError,
    locate_periodic_orbit,
)
from .systems import DomainError, RosslerParams

__all__ = [
    "NoCrossingError",
    "ContinuationError",
    "NormalizationError",
    "JetField",
    "CrossingData",
    "NormalizedField",
    "TorusReport",
    "RegimeRow",
    "RegimeTable",
    "FastRosslerSection",
    "find_crossing",
    "jordan_normalize",
    "lyapunov_l1",
    "l1_terms",
    "detect_invariant_curve",
    "torus_regime_scan",
    "nearest_resonance",
]

OMEGA_FLOOR = 1e-9
SPEED_FLOOR = 1e-9


class NoCrossingError(RuntimeError):
    """Re(lambda) does not change sign over the parameter range."""


class ContinuationError(RuntimeError):
    """Newton lost the equilibrium curve."""


class NormalizationError(ValueError):
    """The Jacobian is not a nondegenerate rotation-type matrix."""


class JetField:
    """A vector field given by a jet-compatible callable ``rhs(xs) -> list``.

    Mirrors the evaluator interface of :class:`AveragedSet` for order 1 so
    that synthetic fields can go through the same analysis.
    """

    def __init__(self, rhs: Callable, dim: int):
        self.rhs = rhs
        self.dim = dim

    def _jets(self, z, k: int):
        spec = JetSpec.total(self.dim, k)
        xs = [Jet.variable(spec, i, float(z[i])) for i in range(self.dim)]
        out = []
        for c in self.rhs(xs):
            out.append(c if isinstance(c, Jet) else Jet.constant(spec, float(c)))
        return out

    def g(self, z, i: int = 1) -> np.ndarray:
        return np.array([float(c.value) for c in self._jets(z, 0)])

    def g_derivatives(self, z, i: int, k: int) -> np.ndarray:
        return np.array([extract_tensor(c, range(self.dim), k) for c in self._jets(z, k)])

    def jacobian(self, z, i: int = 1) -> np.ndarray:
        return self.g_derivatives(z, 1, 1)


def _default_scale(fld) -> float:
    src = getattr(fld, "source", None)
    period = getattr(src, "period", None)
    return 1.0 / period if period else 1.0


def _newton_zero(fld, x, tol=1e-12, max_iter=40):
    x = np.asarray(x, dtype=float).copy()
    for _ in range(max_iter):
        try:
            g = fld.g(x, 1)
            J = fld.jacobian(x, 1)
            step = np.linalg.solve(J, g)
        except np.linalg.LinAlgError as exc:
            raise ContinuationError(f"singular Jacobian at {x}") from exc
        except DomainError as exc:
            raise ContinuationError(f"equilibrium branch left the domain at {x}") from exc
        x = x - step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(x))):
            if np.max(np.abs(fld.g(x, 1))) <= 1e-9 * max(1.0, np.max(np.abs(J))):
                return x
    raise ContinuationError(f"Newton on g_1 did not converge from {x}")


def _leading_pair(J):
    ev = np.linalg.eigvals(J)
    k = int(np.argmax(ev.real))
    return ev[k]


@dataclass
class CrossingData:
    """Result of :func:`find_crossing`."""

    parameter: str
    mu0: float
    omega0: float
    speed: float
    x0: np.ndarray
    scale: float
    re_lambda: float
    curve: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "mu0": self.mu0,
            "omega0": self.omega0,
            "speed": self.speed,
            "x0": self.x0.tolist(),
            "scale": self.scale,
            "re_lambda_at_mu0": self.re_lambda,
            "curve": [[m, *x.tolist()] for m, x in self.curve],
        }


def find_crossing(
    family: Callable[[float], object],
    mu_range: tuple[float, float],
    seed,
    samples: int = 13,
    scale: float | None = None,
    parameter: str = "mu",
    re_tol: float = 1e-10,
    diff_step: float = 1e-4,
) -> CrossingData:
    """Locate ``mu0`` where the leading eigenvalue of ``scale * Dg_1(x_mu)``
    crosses the imaginary axis.

    ``family(mu)`` returns the averaged field at parameter ``mu``.  The
    equilibrium is continued by Newton from ``seed`` across ``samples``
    parameter values, then Re(lambda) is bracketed and solved by Brent's
    method.  The transversal speed uses a Richardson-extrapolated centred
    difference with step ``diff_step * (mu_hi - mu_lo)``.
    """
    lo, hi = map(float, mu_range)
    if not hi > lo:
        raise ValueError("empty parameter range")
    fields: dict[float, object] = {}

    def fld(mu):
        if mu not in fields:
            fields[mu] = family(mu)
        return fields[mu]

    sc = _default_scale(fld(lo)) if scale is None else float(scale)
    mus = np.linspace(lo, hi, samples)
    x = np.asarray(seed, dtype=float)
    curve, res = [], []
    for mu in mus:
        x = _newton_zero(fld(mu), x)
        curve.append((float(mu), x.copy()))
        res.append(_leading_pair(sc * fld(mu).jacobian(x, 1)).real)
    res = np.array(res)
    sign_change = np.nonzero(np.sign(res[:-1]) * np.sign(res[1:]) <= 0)[0]
    if len(sign_change) == 0:
        raise NoCrossingError(f"Re(lambda) keeps sign on [{lo}, {hi}]")
    k = int(sign_change[0])
    a, b = mus[k], mus[k + 1]
    anchor = {"x": curve[k][1]}

    def re_at(mu, xseed=None):
        xs = _newton_zero(fld(mu), anchor["x"] if xseed is None else xseed)
        return _leading_pair(sc * fld(mu).jacobian(xs, 1)).real, xs

    def f(mu):
        val, xs = re_at(mu)
        anchor["x"] = xs
        return val

    try:
        mu0 = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    except ValueError as exc:
        # the leading eigenvalue switched branch inside the bracket
        raise NoCrossingError(f"no continuous crossing in [{a}, {b}]") from exc
    re0, x0 = re_at(mu0)
    if abs(re0) > re_tol * max(1.0, abs(res).max()):
        raise NoCrossingError(f"bisection stalled at |Re lambda| = {abs(re0):.2e}")
    lam = _leading_pair(sc * fld(mu0).jacobian(x0, 1))
    omega0 = abs(lam.imag)
    if omega0 < OMEGA_FLOOR:
        raise NoCrossingError("crossing eigenvalue is real (omega0 below floor)")
    h = diff_step * (hi - lo)

    def central(step):
        return (re_at(mu0 + step, x0)[0] - re_at(mu0 - step, x0)[0]) / (2 * step)

    speed = (4 * central(h / 2) - central(h)) / 3
    if abs(speed) < SPEED_FLOOR:
        raise NoCrossingError("crossing is not transversal")
    fields.clear()
    return CrossingData(parameter, float(mu0), float(omega0), float(speed), x0, sc, float(re0), curve)


# -- Jordan normalisation and the first Lyapunov coefficient ------------------------


@dataclass
class NormalizedField:
    """``w -> scale * P^-1 g_1(x0 + P w)`` through its third derivatives."""

    transform: np.ndarray
    x0: np.ndarray
    omega0: float
    jacobian: np.ndarray
    second: np.ndarray
    third: np.ndarray
    rotation_residual: float

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.jacobian)

    def l1(self) -> float:
        return lyapunov_l1(self.second, self.third, self.omega0)


def jordan_normalize(fld, crossing: CrossingData, transform=None, tol: float = 1e-6) -> NormalizedField:
    """Conjugate the averaged field at the crossing into real Jordan form.

    ``transform`` maps normalized offsets to state offsets; without it the
    real and (negated) imaginary parts of the eigenvector for ``+i omega0``
    are used, scaled to unit determinant.  The coefficient ``l1`` depends on
    that scale (its sign does not).  The derivative tensors are obtained by pushing the jet-carried
    tensors through the linear change.
    """
    x0 = np.asarray(crossing.x0, dtype=float)
    sc = crossing.scale
    J = sc * fld.jacobian(x0, 1)
    if J.shape != (2, 2):
        raise NormalizationError("only planar averaged fields are supported")
    ev, V = np.linalg.eig(J)
    if np.min(np.abs(ev.imag)) < OMEGA_FLOOR:
        raise NormalizationError("Jacobian has real eigenvalues")
    if transform is None:
        v = V[:, int(np.argmax(ev.imag))]
        P = np.column_stack([v.real, -v.imag])
        # l1 scales with the square of the coordinates; fix det P = 1
        P = P / math.sqrt(abs(np.linalg.det(P)))
    else:
        P = np.asarray(transform, dtype=float)
    Pinv = np.linalg.inv(P)
    D2 = sc * fld.g_derivatives(x0, 1, 2)
    D3 = sc * fld.g_derivatives(x0, 1, 3)
    Jn = Pinv @ J @ P
    D2n = np.einsum("ia,ajk,jb,kc->ibc", Pinv, D2, P, P)
    D3n = np.einsum("ia,ajkl,jb,kc,ld->ibcd", Pinv, D3, P, P, P)
    w = 0.5 * (Jn[1, 0] - Jn[0, 1])
    target = np.array([[0.0, -w], [w, 0.0]])
    resid = float(np.max(np.abs(Jn - target)))
    if w <= 0 or resid > tol * abs(w):
        raise NormalizationError(f"transformed Jacobian is not a rotation block (residual {resid:.2e}, omega {w:.6g})")
    return NormalizedField(P, x0, float(w), Jn, D2n, D3n, resid)


def l1_terms(second, third, omega0: float) -> tuple[float, float]:
    """Third-derivative part and second-derivative part of the coefficient."""
    if omega0 < OMEGA_FLOOR:
        raise ValueError("omega0 below floor")
    f2, g2 = second[0], second[1]
    f3, g3 = third[0], third[1]
    cubic = (f3[0, 0, 0] + f3[0, 1, 1] + g3[0, 0, 1] + g3[1, 1, 1]) / 8.0
    quad = (
        f2[0, 1] * (f2[0, 0] + f2[1, 1])
        - g2[0, 1] * (g2[0, 0] + g2[1, 1])
        - f2[0, 0] * g2[0, 0]
        + f2[1, 1] * g2[1, 1]
    ) / (8.0 * omega0)
    return float(cubic), float(quad)


def lyapunov_l1(second, third, omega0: float) -> float:
    """First Lyapunov coefficient of a planar field in real Jordan form.

    ``second[i]`` and ``third[i]`` are the Hessian and third-derivative
    tensors of component ``i``; the linear part is assumed to be
    ``((0, -omega0), (omega0, 0))``.  Normalised so that the cubic normal
    form ``x' = -omega0 y - x (x^2 + y^2)``, ``y' = omega0 x - y (x^2 + y^2)``
    gives ``-2``.
    """
    cubic, quad = l1_terms(np.asarray(second), np.asarray(third), omega0)
    return cubic + quad


# -- fast Rossler return map (fixed-step RK4 with Henon's trick) -------------------


@numba.njit(cache=True, inline="always")
def _ros(x, y, z, a, b, c):
    return -y - z, x + a * y, b * x - c * z + x * z


@numba.njit(cache=True)
def _rk4(x, y, z, h, a, b, c):
    k1x, k1y, k1z = _ros(x, y, z, a, b, c)
    k2x, k2y, k2z = _ros(x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z, a, b, c)
    k3x, k3y, k3z = _ros(x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z, a, b, c)
    k4x, k4y, k4z = _ros(x + h * k3x, y + h * k3y, z + h * k3z, a, b, c)
    s = h / 6.0
    return (x + s * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + s * (k1y + 2 * k2y + 2 * k3y + k4y),
            z + s * (k1z + 2 * k2z + 2 * k3z + k4z))


@numba.njit(cache=True)
def _henon_rhs(x, y, z, axis, a, b, c):
    fx, fy, fz = _ros(x, y, z, a, b, c)
    d = fx if axis == 0 else (fy if axis == 1 else fz)
    return fx / d, fy / d, fz / d


@numba.njit(cache=True)
def _henon(x, y, z, axis, ds, a, b, c):
    # one RK4 step in the independent variable x[axis]
    k1x, k1y, k1z = _henon_rhs(x, y, z, axis, a, b, c)
    k2x, k2y, k2z = _henon_rhs(x + 0.5 * ds * k1x, y + 0.5 * ds * k1y, z + 0.5 * ds * k1z, axis, a, b, c)
    k3x, k3y, k3z = _henon_rhs(x + 0.5 * ds * k2x, y + 0.5 * ds * k2y, z + 0.5 * ds * k2z, axis, a, b, c)
    k4x, k4y, k4z = _henon_rhs(x + ds * k3x, y + ds * k3y, z + ds * k3z, axis, a, b, c)
    s = ds / 6.0
    return (x + s * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + s * (k1y + 2 * k2y + 2 * k3y + k4y),
            z + s * (k1z + 2 * k2z + 2 * k3z + k4z))


@numba.njit(cache=True)
def _orbit(y0, n, axis, offset, direction, dt, a, b, c, max_steps, radius, floor):
    """Iterate the return map ``n`` times; returns (points, count, status).

    status: 0 ok, 1 escaped, 2 no return, 3 tangential crossing.
    """
    pts = np.empty((n, 3))
    x, y, z = y0[0], y0[1], y0[2]
    sgn = direction * (1.0 if dt > 0 else -1.0)
    r2 = radius * radius
    for it in range(n):
        cur = x if axis == 0 else (y if axis == 1 else z)
        g_old = (cur - offset) * sgn
        left = False
        found = False
        for _ in range(max_steps):
            xn, yn, zn = _rk4(x, y, z, dt, a, b, c)
            cur = xn if axis == 0 else (yn if axis == 1 else zn)
            g_new = (cur - offset) * sgn
            if not left:
                if g_new < 0:
                    left = True
            elif g_old < 0 and g_new >= 0:
                fx, fy, fz = _ros(x, y, z, a, b, c)
                fa = fx if axis == 0 else (fy if axis == 1 else fz)
                if abs(fa) < floor:
                    return pts, it, 3
                now = x if axis == 0 else (y if axis == 1 else z)
                x, y, z = _henon(x, y, z, axis, offset - now, a, b, c)
                found = True
                break
            x, y, z = xn, yn, zn
            g_old = g_new
            if x * x + y * y + z * z > r2:
                return pts, it, 1
        if not found:
            return pts, it, 2
        pts[it, 0] = x
        pts[it, 1] = y
        pts[it, 2] = z
        pts[it, axis] = offset
        if axis == 0:
            x = offset
        elif axis == 1:
            y = offset
        else:
            z = offset
    return pts, n, 0


@dataclass
class FastRosslerSection(PoincareMapHandle):
    """Compiled return map of the Rossler flow; same section conventions
    as :class:`RosslerSection` but with a fixed RK4 step and Henon's trick
    for landing exactly on the plane."""

    params: RosslerParams
    axis: int
    offset: float = 0.0
    direction: int = 1
    reverse: bool = False
    dt: float = 0.005
    max_time: float = 200.0
    escape_radius: float = 1e3
    transversality_floor: float = 1e-6

    def __post_init__(self):
        self._free = [k for k in range(3) if k != self.axis]

    @property
    def dim(self) -> int:
        return 2

    def embed(self, q) -> np.ndarray:
        x = np.empty(3)
        x[self.axis] = self.offset
        x[self._free] = np.asarray(q, dtype=float)
        return x

    def orbit(self, q, n: int) -> tuple[np.ndarray, str]:
        p = self.params
        h = -self.dt if self.reverse else self.dt
        pts, count, status = _orbit(self.embed(q), int(n), self.axis, float(self.offset), float(self.direction),
                                    h, p.a, p.b, p.c, int(self.max_time / self.dt), self.escape_radius,
                                    self.transversality_floor)
        msg = {0: "ok", 1: "escaped", 2: "no return", 3: "tangential crossing"}[int(status)]
        return pts[:count][:, self._free], msg

    def map(self, q, eps: float | None = None) -> np.ndarray:
        pts, msg = self.orbit(q, 1)
        if msg == "escaped" or msg == "no return":
            raise EscapeError(msg, float("nan"))
        if msg != "ok":
            raise SectionError(msg)
        return pts[0]


# -- invariant curves -------------------------------------------------------------------


def nearest_resonance(rho: float, max_q: int = 6) -> tuple[Fraction, float]:
    """Closest p/q with q <= max_q to ``rho`` (taken mod 1) and its distance."""
    x = rho - math.floor(rho)
    best, dist = Fraction(0), x
    for q in range(1, max_q + 1):
        for p in range(0, q + 1):
            d = abs(x - p / q)
            if d < dist:
                best, dist = Fraction(p, q), d
    return best, dist


@dataclass
class TorusReport:
    status: str
    reversed: bool
    iterates: int
    points: np.ndarray
    center: np.ndarray
    rotation_number: float | None = None
    closure_defect: float | None = None
    diameter: float | None = None
    curve_stability: str | None = None
    orbit_stability: str | None = None
    l1: float | None = None
    side_condition: float | None = None
    notes: list = field(default_factory=list)

    @property
    def confirmed(self) -> bool:
        return self.status == "curve"

    def to_dict(self, with_points: bool = False) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "points"}
        d["center"] = self.center.tolist()
        d["confirmed"] = self.confirmed
        if with_points:
            d["points"] = self.points.tolist()
        return d


def _iterate(h, seed, n):
    if hasattr(h, "orbit"):
        pts, msg = h.orbit(seed, n)
        return pts, msg
    q = np.asarray(seed, dtype=float)
    out = []
    try:
        for _ in range(n):
            q = h.map(q)
            out.append(q)
    except (EscapeError, SectionError) as exc:
        return np.array(out).reshape(-1, len(q)), f"escaped: {exc}"
    return np.array(out), "ok"


def _fourier_design(theta, modes):
    cols = [np.ones_like(theta)]
    for k in range(1, modes + 1):
        cols += [np.cos(k * theta), np.sin(k * theta)]
    return np.column_stack(cols)


def _assess(pts, c, rev, scale0, defect_tol, modes, resonance_gap) -> TorusReport:
    rel = pts - c
    dist = np.hypot(rel[:, 0], rel[:, 1])
    if dist.max() <= 1e-6 * scale0 or dist.max() < 1e-12:
        return TorusReport("no curve: converged to fixed point", rev, len(pts), pts, c)
    C = np.cov(rel.T)
    evals, evecs = np.linalg.eigh(C)
    if evals.min() <= 0:
        return TorusReport("inconclusive", rev, len(pts), pts, c, notes=["degenerate point cloud"])
    W = evecs @ np.diag(evals**-0.5) @ evecs.T
    w = rel @ W.T
    theta = np.arctan2(w[:, 1], w[:, 0])
    rho = np.hypot(w[:, 0], w[:, 1])
    quarter = len(pts) // 4
    head, tail = np.median(dist[:quarter]), np.median(dist[-quarter:])
    adv = np.diff(np.unwrap(theta))
    rot = float(np.mean(adv) / (2 * np.pi))
    # at least 10 points per fitted coefficient
    m = min(modes, max(1, len(pts) // 20))
    A = _fourier_design(theta, m)
    coef_all, *_ = np.linalg.lstsq(A, rho, rcond=None)
    half = len(pts) // 2
    coef_a, *_ = np.linalg.lstsq(A[:half], rho[:half], rcond=None)
    coef_b, *_ = np.linalg.lstsq(A[half:], rho[half:], rcond=None)
    grid = np.linspace(-np.pi, np.pi, 512, endpoint=False)
    G = _fourier_design(grid, m)
    residual = float(np.max(np.abs(A @ coef_all - rho)))
    drift = float(np.max(np.abs(G @ coef_a - G @ coef_b)))
    unit = float(np.sqrt(evals.max()))
    defect = max(residual, drift) * unit
    sub = pts[:: max(1, len(pts) // 1500)]
    diam = float(pdist(sub).max())
    rep = TorusReport("inconclusive", rev, len(pts), pts, c, rot, defect, diam)
    if np.min(G @ coef_all) <= 0 or np.any(np.sign(adv) != np.sign(np.mean(adv))):
        rep.notes.append("points are not star-shaped around the center")
    if defect <= defect_tol * diam:
        frac, gap = nearest_resonance(rot)
        if gap < resonance_gap:
            rep.status = "resonant"
            rep.notes.append(f"rotation number within {gap:.1e} of {frac}")
            return rep
        rep.status = "curve"
        rep.curve_stability = "unstable (repelling)" if rev else "asymptotically stable (attracting)"
        return rep
    if tail < 0.5 * head:
        rep.status = "no curve: converging to fixed point"
    elif tail > 2.0 * head:
        rep.status = "no curve: diverging"
    return rep


def detect_invariant_curve(
    h: PoincareMapHandle,
    seed,
    iterations: int = 2000,
    transient: int = 4000,
    center=None,
    min_iterates: int = 200,
    defect_tol: float = 1e-3,
    modes: int = 48,
    resonance_gap: float = 1e-3,
) -> TorusReport:
    """Iterate ``h`` and decide whether the orbit settles on a closed curve.

    Points are recorded in windows of ``iterations``.  Each window is
    whitened by its covariance, and the radius about ``center`` is fitted as
    a Fourier series in polar angle.  The closure defect is the larger of
    the fit residual and the drift between fits to the two halves of the
    window, in state units.  Windows are discarded until a verdict is
    reached or ``transient`` further iterates have been spent.
    """
    if iterations < min_iterates:
        raise ValueError(f"need at least {min_iterates} recorded iterates")
    rev = bool(getattr(h, "reverse", False))
    seed = np.asarray(seed, dtype=float)
    c = seed.copy() if center is None else np.asarray(center, dtype=float)
    scale0 = max(float(np.hypot(*(seed - c))), 1e-300)
    spent, q = 0, seed
    while True:
        pts, msg = _iterate(h, q, iterations)
        if msg != "ok" or len(pts) < iterations:
            return TorusReport("escaped", rev, spent + len(pts), pts, c, notes=[msg])
        rep = _assess(pts, c, rev, scale0, defect_tol, modes, resonance_gap)
        if rep.status in ("curve", "no curve: converged to fixed point") or spent >= transient:
            rep.notes.append(f"{spent} iterates discarded")
            return rep
        spent += iterations
        q = pts[-1]


# -- regime scan -----------------------------------------------------------------------


@dataclass
class RegimeRow:
    mu: float
    multiplier_modulus: float
    rotation_at_orbit: float
    forward: str
    reverse: str
    forward_report: TorusReport | None = None
    reverse_report: TorusReport | None = None

    @property
    def curve_found(self) -> bool:
        return self.forward == "curve" or self.reverse == "curve"

    def to_dict(self) -> dict:
        d = {"mu": self.mu, "multiplier_modulus": self.multiplier_modulus,
             "rotation_at_orbit": self.rotation_at_orbit, "forward": self.forward, "reverse": self.reverse}
        for name, r in (("forward_report", self.forward_report), ("reverse_report", self.reverse_report)):
            if r is not None:
                d[name] = r.to_dict()
        return d


@dataclass
class RegimeTable:
    rows: list
    boundary: tuple | None
    orbit_crossing: float | None
    existence_side: str | None
    curve_stability: set
    l1: float | None
    consistent_with_l1: bool | None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "boundary": None if self.boundary is None else list(self.boundary),
            "orbit_crossing": self.orbit_crossing,
            "existence_side": self.existence_side,
            "curve_stability": sorted(self.curve_stability),
            "l1": self.l1,
            "consistent_with_l1": self.consistent_with_l1,
            "notes": self.notes,
        }


def torus_regime_scan(
    section_factory: Callable[[float, bool], PoincareMapHandle],
    orbit_factory: Callable[[float], PoincareMapHandle],
    mu_values: Sequence[float],
    eps: float,
    orbit_seed,
    offset: float,
    l1: float | None = None,
    iterations: int = 2000,
    transient: int = 6000,
    resolution: float = 1e-3,
    l1_floor: float = 1e-9,
) -> RegimeTable:
    """Scan a parameter window for invariant curves around the periodic orbit.

    ``orbit_factory(mu)`` gives an accurate map used for Newton and the
    multipliers; ``section_factory(mu, reverse)`` gives the (fast) map used
    for long iterations.  At each parameter value a curve is sought forward
    and backward in time from ``fixed point + (offset, 0)``.  The existence
    boundary is refined by bisection on the multiplier modulus, which is
    where the curve amplitude vanishes.
    """
    rows: list[RegimeRow] = []
    seed = np.asarray(orbit_seed, dtype=float)
    fps = {}
    for mu in mu_values:
        orb = locate_periodic_orbit(orbit_factory(mu), seed, eps)
        seed = orb.fixed_point
        fps[mu] = seed
        lam = orb.multipliers[int(np.argmax(np.abs(orb.multipliers)))]
        start = seed + np.array([offset, 0.0])
        fwd = detect_invariant_curve(section_factory(mu, False), start, iterations, transient, center=seed)
        bwd = detect_invariant_curve(section_factory(mu, True), start, iterations, transient, center=seed)
        rows.append(RegimeRow(float(mu), float(abs(lam)), float(abs(np.angle(lam)) / (2 * np.pi)),
                              fwd.status, bwd.status, fwd, bwd))
    found = [r for r in rows if r.curve_found]
    stab = set()
    for r in found:
        for rep in (r.forward_report, r.reverse_report):
            if rep is not None and rep.confirmed:
                stab.add(rep.curve_stability)
    table = RegimeTable(rows, None, None, None, stab, l1, None)
    if not found:
        table.notes.append("no invariant curve found in the window")
        return table
    mods = np.array([r.multiplier_modulus for r in rows])
    sc = np.nonzero(np.sign(mods[:-1] - 1) * np.sign(mods[1:] - 1) < 0)[0]
    if len(sc):
        i = int(sc[0])

        def f(mu):
            orb = locate_periodic_orbit(orbit_factory(mu), fps[rows[i].mu], eps)
            return float(np.max(np.abs(orb.multipliers)) - 1.0)

        table.orbit_crossing = float(brentq(f, rows[i].mu, rows[i + 1].mu, xtol=resolution))
    found_mu = np.array([r.mu for r in found])
    if table.orbit_crossing is None:
        table.notes.append("the orbit multipliers do not cross the unit circle in the window")
    else:
        mu_c = table.orbit_crossing
        if np.all(found_mu < mu_c):
            table.existence_side = "below"
            others = [r.mu for r in rows if r.mu > mu_c]
            table.boundary = (float(found_mu.max()), float(min(others)) if others else mu_c)
        elif np.all(found_mu > mu_c):
            table.existence_side = "above"
            others = [r.mu for r in rows if r.mu < mu_c]
            table.boundary = (float(max(others)) if others else mu_c, float(found_mu.min()))
        else:
            table.existence_side = "both"
            table.notes.append("curves found on both sides of the multiplier crossing")
    if l1 is None or abs(l1) <= l1_floor:
        table.consistent_with_l1 = None
        table.notes.append("l1 is zero within the floor; the curve stability is not decided at this order")
    else:
        expected = "unstable (repelling)" if l1 > 0 else "asymptotically stable (attracting)"
        table.consistent_with_l1 = stab == {expected}
    return table
