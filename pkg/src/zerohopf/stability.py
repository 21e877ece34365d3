"""Period maps, periodic orbits, Floquet multipliers and their eps-expansions.

Two kinds of return map are supported:

* the stroboscopic map ``z -> x(T, z, eps)`` of a standard-form system;
* the first-return map of the full Rossler flow to a coordinate plane,
  restricted to the two in-plane coordinates.

The Jacobian ``DPi(z(eps)) = Id + eps A(eps)`` along the periodic initial
condition is expanded in eps by composing jets of the averaged functions
with the series ``z(eps) = z0 + eps z1 + eps**2 z2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .averaging import AveragedSet
from .jets import Jet, JetSpec, extract_tensor
from .systems import RosslerParams, StandardFormSystem, rossler_jacobian, rossler_rhs

__all__ = [
    "EscapeError",
    "DegenerateEpsilonError",
    "OrbitNotFoundError",
    "UnsupportedShapeError",
    "SectionError",
    "PoincareMapHandle",
    "StroboscopicMap",
    "RosslerSection",
    "PeriodicOrbit",
    "StabilityReport",
    "time_T_map",
    "locate_periodic_orbit",
    "a_matrices",
    "routh_hurwitz_2",
    "k_determined_ladder",
    "classify_ladder",
    "classify_jacobian",
    "scaling_slope",
]

EPS_FLOOR = 1e-6
SIGN_FLOOR = 1e-9


class EscapeError(RuntimeError):
    """The trajectory left the admissible region."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t = {time:.6g}")
        self.time = time


class DegenerateEpsilonError(ValueError):
    """eps is below the floor where every point is (nearly) fixed."""


class OrbitNotFoundError(RuntimeError):
    """Newton on the return map did not converge."""

    def __init__(self, message: str, condition: float = float("nan")):
        super().__init__(message)
        self.condition = condition


class UnsupportedShapeError(ValueError):
    """The leading matrix is not of the shape ``diag(0, mu)``."""


class SectionError(RuntimeError):
    """The flow is (nearly) tangent to the section at a crossing."""


class PoincareMapHandle:
    """Common interface: ``map``, ``map_with_jacobian`` and ``dim``."""

    dim: int

    def map(self, q, eps: float | None = None) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def map_with_jacobian(self, q, eps: float | None = None):  # pragma: no cover - interface
        raise NotImplementedError


# -- stroboscopic map of a standard-form system ---------------------------------


def _value_and_jacobian(s: StandardFormSystem, t: float, x, eps: float):
    spec = JetSpec.total(s.dim, 1)
    xs = [Jet.variable(spec, k, x[k]) for k in range(s.dim)]
    out = s.rhs(t, xs, eps)
    f = np.empty(s.dim)
    J = np.zeros((s.dim, s.dim))
    for i, comp in enumerate(out):
        if isinstance(comp, Jet):
            f[i] = float(comp.value)
            for k in range(s.dim):
                J[i, k] = float(comp.coeff([1 if v == k else 0 for v in range(s.dim)]))
        else:
            f[i] = float(comp)
    return f, J


@dataclass
class StroboscopicMap(PoincareMapHandle):
    """``z -> x(T, z, eps)`` for a standard-form system."""

    system: StandardFormSystem
    eps: float = 0.0
    rtol: float = 1e-12
    atol: float = 1e-12

    @property
    def dim(self) -> int:
        return self.system.dim

    def _box_event(self):
        lo = np.asarray(self.system.lower)
        hi = np.asarray(self.system.upper)
        n = self.system.dim

        def ev(t, y):
            x = y[:n]
            return float(min(np.min(x - lo), np.min(hi - x)))

        ev.terminal = True
        ev.direction = -1
        return ev

    def map(self, q, eps: float | None = None) -> np.ndarray:
        eps = self.eps if eps is None else eps
        q = self.system.check_domain(q)
        sol = solve_ivp(lambda t, x: self.system.field(t, x, eps), (0.0, self.system.period), q,
                        method="DOP853", rtol=self.rtol, atol=self.atol, events=self._box_event())
        if sol.status == 1:
            raise EscapeError("trajectory left the domain box", float(sol.t_events[0][0]))
        if not sol.success:
            raise EscapeError(sol.message, float(sol.t[-1]))
        return sol.y[:, -1]

    def map_with_jacobian(self, q, eps: float | None = None):
        eps = self.eps if eps is None else eps
        q = self.system.check_domain(q)
        n = self.system.dim

        def rhs(t, y):
            f, J = _value_and_jacobian(self.system, t, y[:n], eps)
            Phi = y[n:].reshape(n, n)
            return np.concatenate([f, (J @ Phi).ravel()])

        y0 = np.concatenate([q, np.eye(n).ravel()])
        sol = solve_ivp(rhs, (0.0, self.system.period), y0, method="DOP853",
                        rtol=self.rtol, atol=self.atol, events=self._box_event())
        if sol.status == 1:
            raise EscapeError("trajectory left the domain box", float(sol.t_events[0][0]))
        y = sol.y[:, -1]
        return y[:n], y[n:].reshape(n, n)


def time_T_map(h: StroboscopicMap, z, eps: float) -> np.ndarray:
    """``Pi(z) = x(T, z, eps)``."""
    return h.map(z, eps)


# -- first-return map of the full Rossler flow ------------------------------------


@dataclass
class RosslerSection(PoincareMapHandle):
    """Return map of the Rossler flow to the plane ``x[axis] = offset``.

    Crossings are counted when ``x[axis] - offset`` changes sign in the
    direction ``direction`` (+1 upward, -1 downward).  The map acts on the
    two remaining coordinates, in increasing index order.  ``reverse``
    integrates backwards in time, giving the inverse map.
    """

    params: RosslerParams
    axis: int
    offset: float = 0.0
    direction: int = 1
    reverse: bool = False
    rtol: float = 1e-12
    atol: float = 1e-12
    t_skip: float = 0.5
    t_max: float = 200.0
    escape_radius: float = 1e3
    transversality_floor: float = 1e-6

    def __post_init__(self):
        if self.axis not in (0, 1, 2) or self.direction not in (1, -1):
            raise ValueError("axis must be 0, 1 or 2 and direction +-1")
        self._free = [k for k in range(3) if k != self.axis]

    @property
    def dim(self) -> int:
        return 2

    def embed(self, q) -> np.ndarray:
        x = np.empty(3)
        x[self.axis] = self.offset
        x[self._free] = np.asarray(q, dtype=float)
        return x

    def project(self, x) -> np.ndarray:
        return np.asarray(x)[self._free]

    def _events(self):
        sgn = -1.0 if self.reverse else 1.0
        ax, c = self.axis, self.offset

        def cross(t, y):
            return y[ax] - c

        # in reversed time the crossing direction of the forward flow flips
        cross.direction = self.direction * sgn
        cross.terminal = True

        def escape(t, y):
            return self.escape_radius - np.linalg.norm(y[:3])

        escape.terminal = True
        escape.direction = -1
        return [cross, escape]

    def _integrate(self, y0, rhs):
        sgn = -1.0 if self.reverse else 1.0
        first = solve_ivp(rhs, (0.0, sgn * self.t_skip), y0, method="DOP853", rtol=self.rtol, atol=self.atol)
        y1 = first.y[:, -1]
        sol = solve_ivp(rhs, (sgn * self.t_skip, sgn * self.t_max), y1, method="DOP853",
                        rtol=self.rtol, atol=self.atol, events=self._events())
        if sol.status != 1:
            raise EscapeError("no return to the section", float(sol.t[-1]))
        if len(sol.t_events[1]):
            raise EscapeError("trajectory escaped", float(sol.t_events[1][0]))
        return float(sol.t_events[0][0]), sol.y_events[0][0]

    def map(self, q, eps: float | None = None) -> np.ndarray:
        p = self.params
        x0 = self.embed(q)
        _, y = self._integrate(x0, lambda t, x: rossler_rhs(p, x))
        return self.project(y[:3])

    def flight(self, q):
        """Return point (3-vector) and flight time."""
        p = self.params
        t, y = self._integrate(self.embed(q), lambda t, x: rossler_rhs(p, x))
        return y[:3], t

    def map_with_jacobian(self, q, eps: float | None = None):
        """Return point, 2x2 Jacobian of the section map, and diagnostics.

        Diagnostics: flight time, full 3x3 flow monodromy, and the
        determinant predicted by the integrated trace.
        """
        p = self.params

        def rhs(t, y):
            x = y[:3]
            J = rossler_jacobian(p, x)
            Phi = y[3:12].reshape(3, 3)
            return np.concatenate([rossler_rhs(p, x), (J @ Phi).ravel(), [np.trace(J)]])

        y0 = np.concatenate([self.embed(q), np.eye(3).ravel(), [0.0]])
        t, y = self._integrate(y0, rhs)
        x = y[:3]
        Phi = y[3:12].reshape(3, 3)
        f = rossler_rhs(p, x)
        if abs(f[self.axis]) < self.transversality_floor:
            raise SectionError(f"flow nearly tangent to the section (normal speed {f[self.axis]:.2e})")
        e = np.zeros(3)
        e[self.axis] = 1.0
        P = np.eye(3) - np.outer(f, e) / f[self.axis]
        D = (P @ Phi)[np.ix_(self._free, self._free)]
        diag = {"time": t, "monodromy": Phi, "liouville_det": float(np.exp(y[12])),
                "det": float(np.linalg.det(Phi))}
        return self.project(x), D, diag


# -- periodic orbits --------------------------------------------------------------


@dataclass
class PeriodicOrbit:
    fixed_point: np.ndarray
    jacobian: np.ndarray
    multipliers: np.ndarray
    residual: float
    iterations: int
    condition: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fixed_point": self.fixed_point.tolist(),
            "jacobian": self.jacobian.tolist(),
            "multipliers_real": np.real(self.multipliers).tolist(),
            "multipliers_imag": np.imag(self.multipliers).tolist(),
            "multiplier_moduli": np.abs(self.multipliers).tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "condition": self.condition,
        }


def locate_periodic_orbit(h: PoincareMapHandle, seed, eps: float, tol: float = 1e-10,
                          max_iter: int = 30) -> PeriodicOrbit:
    """Newton on ``Pi(q) - q`` with the variational Jacobian."""
    if abs(eps) < EPS_FLOOR:
        raise DegenerateEpsilonError(f"|eps| = {abs(eps):.2e} is below the floor {EPS_FLOOR:.0e}")
    q = np.asarray(seed, dtype=float).copy()
    cond = float("nan")
    for it in range(1, max_iter + 1):
        out = h.map_with_jacobian(q, eps)
        P, D = out[0], out[1]
        res = P - q
        M = D - np.eye(len(q))
        cond = float(np.linalg.cond(M))
        if not np.isfinite(cond) or cond > 1e14:
            raise OrbitNotFoundError(f"Newton matrix is near-singular (condition {cond:.2e})", cond)
        q = q - np.linalg.solve(M, res)
        if np.max(np.abs(res)) <= tol:
            break
    else:
        raise OrbitNotFoundError(f"Newton did not converge in {max_iter} iterations", cond)
    out = h.map_with_jacobian(q, eps)
    P, D = out[0], out[1]
    resid = float(np.max(np.abs(P - q)))
    if resid > tol:
        raise OrbitNotFoundError(f"final residual {resid:.2e} exceeds {tol:.0e}", cond)
    diag = out[2] if len(out) > 2 else {}
    return PeriodicOrbit(q, D, np.linalg.eigvals(D), resid, it, cond, diag)


# -- eps-expansion of the Jacobian along z(eps) -------------------------------------


def a_matrices(avg: AveragedSet, z0, z1=None, z2=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``A0, A1, A2`` with ``DPi(z(eps)) = Id + eps A0 + eps**2 A1 + eps**3 A2 + ...``."""
    n = avg.dim
    z0 = np.asarray(z0, dtype=float)
    z1 = np.zeros(n) if z1 is None else np.asarray(z1, dtype=float)
    z2 = np.zeros(n) if z2 is None else np.asarray(z2, dtype=float)
    gj = avg.jets(z0, 4)
    E = JetSpec.univariate(3)
    e = Jet.variable(E, 0)
    s = [e * float(z1[k]) + e * e * float(z2[k]) for k in range(n)]
    total = [[Jet.constant(E, 0.0) for _ in range(n)] for _ in range(n)]
    for k in (1, 2, 3):
        w = e**k
        for i in range(n):
            for j in range(n):
                total[i][j] = total[i][j] + gj[k][i].derivative(j).compose(s) * w
    out = []
    for p in (1, 2, 3):
        out.append(np.array([[float(total[i][j].coeff([p])) for j in range(n)] for i in range(n)]))
    return tuple(out)


def routh_hurwitz_2(p: float, q: float, tol: float = 1e-12) -> str:
    """Root location of ``lambda**2 + p lambda + q``."""
    if q < -tol:
        return "unstable"  # real roots of opposite sign
    if abs(p) <= tol or abs(q) <= tol:
        return "marginal"
    if p > 0 and q > 0:
        return "stable"
    return "unstable"


def _matmul(A, B):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), A[0][0] * 0.0) for j in range(n)] for i in range(n)]


def k_determined_ladder(A0, A1, A2, shape_tol: float = 1e-8) -> dict:
    """Diagonalise ``A(eps) = A0 + eps A1 + eps**2 A2`` to second order.

    A near-identity ``T(eps)`` whose off-diagonal entries cancel the
    coupling through ``eps**2`` is applied; the result holds the diagonal
    coefficients of ``T A T^-1`` through ``eps**2``, the leftover
    off-diagonal size, and the leading term of each eigenvalue branch.
    """
    A0, A1, A2 = (np.asarray(a, dtype=float) for a in (A0, A1, A2))
    if A0.shape != (2, 2):
        raise UnsupportedShapeError("only 2x2 families are supported")
    mu = A0[1, 1]
    if abs(mu) < SIGN_FLOOR:
        raise UnsupportedShapeError("A0[1,1] is below the floor")
    scale = max(1.0, abs(mu))
    if max(abs(A0[0, 0]), abs(A0[0, 1]), abs(A0[1, 0])) > shape_tol * scale:
        raise UnsupportedShapeError("A0 is not of the form diag(0, mu)")
    E = JetSpec.univariate(2)
    e = Jet.variable(E, 0)
    A = [[Jet.constant(E, 0.0) + e * A1[i, j] + e * e * A2[i, j] for j in range(2)] for i in range(2)]
    A[1][1] = A[1][1] + mu
    # general second-order entries; the A1[0, 0] terms vanish at a simple zero of f_2
    split = A1[1, 1] - A1[0, 0]
    t12 = e * (-A1[0, 1] / mu) + e * e * ((A1[0, 1] * split - mu * A2[0, 1]) / mu**2)
    t21 = e * (A1[1, 0] / mu) + e * e * ((-A1[1, 0] * split + mu * A2[1, 0]) / mu**2)
    one = Jet.constant(E, 1.0)
    T = [[one, t12], [t21, one]]
    det = one - t12 * t21
    inv_det = det.reciprocal()
    Tinv = [[inv_det, -t12 * inv_det], [-t21 * inv_det, inv_det]]
    C = _matmul(_matmul(T, A), Tinv)
    Lam = [np.array([[float(C[i][j].coeff([k])) for j in range(2)] for i in range(2)]) for k in range(3)]
    offdiag = max(abs(L[0, 1]) + abs(L[1, 0]) for L in Lam)
    slow = [L[0, 0] for L in Lam]
    fast = [L[1, 1] for L in Lam]

    def leading(coeffs):
        for r, c in enumerate(coeffs):
            if abs(c) >= SIGN_FLOOR * scale:
                return r, c
        return None, 0.0

    rs, cs = leading(slow)
    rf, cf = leading(fast)
    return {
        "Lambda": Lam,
        "offdiagonal_residual": offdiag,
        "slow": {"rate_A": rs, "coefficient": cs,
                 "multiplier_rate": None if rs is None else rs + 1, "series": slow},
        "fast": {"rate_A": rf, "coefficient": cf,
                 "multiplier_rate": None if rf is None else rf + 1, "series": fast},
    }


def classify_ladder(ladder: dict) -> str:
    """Stability verdict from the leading eigenvalue coefficients."""
    cs = ladder["slow"]["coefficient"]
    cf = ladder["fast"]["coefficient"]
    if ladder["slow"]["rate_A"] is None or ladder["fast"]["rate_A"] is None:
        return "undetermined"
    if abs(cs) < SIGN_FLOOR or abs(cf) < SIGN_FLOOR:
        return "undetermined"
    if cs < 0 and cf < 0:
        return "asymptotically stable"
    if cs * cf < 0:
        return "unstable (1,1) splitting"
    return "unstable (0,2) splitting"


def classify_jacobian(J) -> str:
    """Verdict for a hyperbolic leading matrix via Routh-Hurwitz on its
    characteristic polynomial."""
    J = np.asarray(J, dtype=float)
    if J.shape != (2, 2):
        ev = np.linalg.eigvals(J)
        if np.any(np.abs(ev.real) < SIGN_FLOOR):
            return "undetermined"
        return "asymptotically stable" if np.all(ev.real < 0) else "unstable"
    p, q = -np.trace(J), np.linalg.det(J)
    verdict = routh_hurwitz_2(p, q, tol=SIGN_FLOOR)
    return {"stable": "asymptotically stable", "unstable": "unstable", "marginal": "undetermined"}[verdict]


@dataclass
class StabilityReport:
    case: str
    constants: dict
    A: tuple
    ladder: dict | None
    multipliers: np.ndarray | None
    classification: str
    printed_classification: str | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                if np.iscomplexobj(v):
                    return {"real": v.real.tolist(), "imag": v.imag.tolist()}
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {str(k): conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v

        return {k: conv(v) for k, v in self.__dict__.items()}


def scaling_slope(eps_values: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log|values|`` against ``log eps``."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])
