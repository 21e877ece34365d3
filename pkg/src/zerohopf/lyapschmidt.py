"""Branch reduction for averaged functions whose first term vanishes on a manifold.

Split ``z = (a, b)`` with ``a`` in R^m and ``b`` in R^(n-m).  On the chart
``z_u = (u, B(u))`` the first averaged function vanishes and
``Delta_u = d_b pi_perp g_1(z_u)`` is invertible.  The period-map equation
``pi_perp G(u, b, eps) = 0``, with ``G = sum eps**(k-1) g_k``, then has the
solution ``b(u, eps) = B(u) + sum eps**i c_i(u) / i!``, and what is left of
the tangential equation is the bifurcation series

    pi G(u, b(u, eps), eps) = sum eps**i f_i(u).

Two routes compute ``c_i`` and ``f_i``:

* :func:`reduce_branch` solves the normal equation order by order in jet
  arithmetic over ``(eps, du)``, so every ``u``-derivative comes out of the
  same pass.
* :func:`explicit_corrections` contracts derivative tensors of ``g_k`` in
  the closed-form expressions term by term.  ``variant="printed"``
  reproduces the published coefficients verbatim, including the slips in
  the third and fourth corrections; ``variant="consistent"`` uses the
  coefficients that follow from the Taylor expansion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .averaging import AveragedSet
from .jets import Jet, JetSpec, extract_tensor

__all__ = [
    "BranchError",
    "BranchDegeneracyError",
    "NoZeroFoundError",
    "NondegeneracyError",
    "BranchChart",
    "Blocks",
    "Reduction",
    "BifurcationReport",
    "axis_chart",
    "verify_chart",
    "block_decompose",
    "reduce_branch",
    "correction_c",
    "bifurcation_f",
    "explicit_corrections",
    "find_simple_zero",
    "z_series",
]


class BranchError(RuntimeError):
    """The chart does not describe a zero manifold of ``g_1``."""


class BranchDegeneracyError(BranchError):
    """``Delta_u`` is singular (smallest singular value below the floor)."""


class NoZeroFoundError(RuntimeError):
    """No sign change of the bifurcation function, or Newton diverged."""


class NondegeneracyError(RuntimeError):
    """The located zero has a near-singular Jacobian."""


@dataclass(frozen=True)
class BranchChart:
    """Zero manifold ``{(u, B(u))}`` of the first averaged function.

    ``graph`` maps a length-``m`` sequence (floats or jets) to a length
    ``n - m`` sequence of the same kind; constants may be returned as
    plain floats.
    """

    m: int
    n: int
    graph: Callable[[Sequence], Sequence]
    lower: tuple
    upper: tuple
    singular_floor: float = 1e-8

    def __post_init__(self):
        if not 0 < self.m < self.n:
            raise ValueError("need 0 < m < n")
        if len(self.lower) != self.m or len(self.upper) != self.m:
            raise ValueError("u-box must have m entries")

    def point(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        b = [float(v) for v in self.graph(list(u))]
        return np.concatenate([u, b])

    def graph_jets(self, u, spec: JetSpec) -> list[Jet]:
        """``B(u + du)`` as jets in ``du`` (variables ``1..m`` of ``spec``)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        args = [Jet.variable(spec, 1 + k, u[k]) for k in range(self.m)]
        out = []
        for v in self.graph(args):
            out.append(v if isinstance(v, Jet) else Jet.constant(spec, float(v)))
        return out


def axis_chart(n: int = 2, m: int = 1, lower=(1e-3,), upper=(100.0,)) -> BranchChart:
    """Chart with ``B = 0``, e.g. ``{(r, 0) : r > 0}``."""
    return BranchChart(m, n, lambda u: [0.0] * (n - m), tuple(lower), tuple(upper))


@dataclass(frozen=True)
class Blocks:
    Lambda: np.ndarray
    Gamma: np.ndarray
    B: np.ndarray
    Delta: np.ndarray


def verify_chart(avg: AveragedSet, chart: BranchChart, points: int = 100, tol: float = 1e-9) -> float:
    """Largest ``|g_1(z_u)|`` over a grid in the u-box; raises above ``tol``."""
    axes = [np.linspace(lo, hi, points if chart.m == 1 else max(3, int(points ** (1 / chart.m))))
            for lo, hi in zip(chart.lower, chart.upper)]
    worst = 0.0
    for u in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, chart.m):
        worst = max(worst, float(np.max(np.abs(avg.g(chart.point(u), 1)))))
    if worst > tol:
        raise BranchError(f"g_1 does not vanish on the chart (sup {worst:.3e} > {tol:.1e})")
    return worst


def block_decompose(avg: AveragedSet, chart: BranchChart, u) -> Blocks:
    """Blocks of ``Dg_1(z_u)`` under the ``(a, b)`` split."""
    J = avg.jacobian(chart.point(u), 1)
    m = chart.m
    blocks = Blocks(J[:m, :m], J[:m, m:], J[m:, :m], J[m:, m:])
    smin = np.linalg.svd(blocks.Delta, compute_uv=False).min()
    if smin < chart.singular_floor:
        raise BranchDegeneracyError(f"Delta_u is singular (smallest singular value {smin:.3e})")
    return blocks


# -- order-by-order reduction in jets -------------------------------------------


def _jet_matrix_inverse(M: list[list[Jet]]) -> list[list[Jet]]:
    """Inverse of a small matrix of jets with invertible constant part."""
    k = len(M)
    spec = M[0][0].spec
    M0 = np.array([[float(M[i][j].value) for j in range(k)] for i in range(k)])
    X = [[Jet.constant(spec, v) for v in row] for row in np.linalg.inv(M0)]
    # Newton-Schulz: X <- X (2I - M X); exact after max-degree + 1 passes on nilpotents
    for _ in range(int(np.ceil(np.log2(spec.total_degree + 1))) + 1):
        MX = [[sum((M[i][l] * X[l][j] for l in range(k)), Jet.constant(spec, 0.0)) for j in range(k)]
              for i in range(k)]
        R = [[(2.0 if i == j else 0.0) - MX[i][j] for j in range(k)] for i in range(k)]
        X = [[sum((X[i][l] * R[l][j] for l in range(k)), Jet.constant(spec, 0.0)) for j in range(k)]
             for i in range(k)]
    return X


@dataclass
class Reduction:
    """Jets of ``c_i`` and ``f_i`` in the offset ``du`` around ``u``.

    ``f[i]`` and ``c[i]`` are exact through degree ``order - i``.
    """

    u: np.ndarray
    order: int
    m: int
    f: dict[int, list[Jet]]
    c: dict[int, list[Jet]]
    graph: list[Jet]

    def _tensor(self, comps: list[Jet], k: int, valid: int) -> np.ndarray:
        if k > valid:
            raise ValueError(f"derivative order {k} exceeds the reduction order")
        return np.array([extract_tensor(c, range(self.m), k) for c in comps])

    def f_value(self, i: int, k: int = 0) -> np.ndarray:
        """``D^k f_i(u)``, shape ``(m,) + (m,)*k``."""
        return self._tensor(self.f[i], k, self.order - i)

    def c_value(self, i: int, k: int = 0) -> np.ndarray:
        """``D^k c_i(u)``, shape ``(n-m,) + (m,)*k``."""
        return self._tensor(self.c[i], k, self.order - i)

    def graph_value(self, k: int = 0) -> np.ndarray:
        return self._tensor(self.graph, k, self.order)


def reduce_branch(avg: AveragedSet, chart: BranchChart, u, order: int = 4) -> Reduction:
    """Solve the normal equation to ``eps**order`` around ``z_u``.

    Needs averaged jets of total degree ``order + 1``, i.e. up to
    ``g_5`` for ``order = 4``.
    """
    if not 1 <= order <= 4:
        raise ValueError("order must be in 1..4")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    m, n = chart.m, chart.n
    z0 = chart.point(u)
    gj = avg.jets(z0, order + 1)
    kmax = min(order + 1, 5)

    E = JetSpec.total(1 + m, order)
    eps = Jet.variable(E, 0)
    du = [Jet.variable(E, 1 + k) for k in range(m)]
    Bu = chart.graph_jets(u, E)
    Bshift = [b - float(b.value) for b in Bu]
    zero = Jet.constant(E, 0.0)
    betas: list[list[Jet]] = []

    def offsets():
        sb = []
        for r in range(n - m):
            acc = Bshift[r]
            for i, beta in enumerate(betas, start=1):
                acc = acc + beta[r] * eps**i
            sb.append(acc)
        return du + sb

    def expand():
        s = offsets()
        G = [zero] * n
        for k in range(1, kmax + 1):
            w = eps ** (k - 1) if k > 1 else None
            for c in range(n):
                term = gj[k][c].compose(s)
                G[c] = G[c] + (term * w if w is not None else term)
        return G

    # Delta(u + du) from g_1 on the chart
    s0 = offsets()
    Delta = [[gj[1][m + r].derivative(m + q).compose(s0).coefficient_in(0, 0) for q in range(n - m)]
             for r in range(n - m)]
    D0 = np.array([[float(x.value) for x in row] for row in Delta])
    if np.linalg.svd(D0, compute_uv=False).min() < chart.singular_floor:
        raise BranchDegeneracyError("Delta_u is singular")
    Dinv = _jet_matrix_inverse(Delta)
    U = Dinv[0][0].spec

    for i in range(1, order + 1):
        G = expand()
        resid = [G[m + r].coefficient_in(0, i) for r in range(n - m)]
        beta = []
        for r in range(n - m):
            acc = Jet.constant(U, 0.0)
            for q in range(n - m):
                acc = acc - Dinv[r][q] * resid[q]
            beta.append(acc.convert(E, [1 + k for k in range(m)]))
        betas.append(beta)

    G = expand()
    f = {i: [G[c].coefficient_in(0, i) for c in range(m)] for i in range(1, order + 1)}
    c = {i: [b.coefficient_in(0, 0) * float(math.factorial(i)) for b in betas[i - 1]]
         for i in range(1, order + 1)}
    graph = [b.coefficient_in(0, 0) for b in Bu]
    return Reduction(u, order, m, f, c, graph)


def correction_c(avg: AveragedSet, chart: BranchChart, u, i: int) -> np.ndarray:
    """``c_i(u)``, the ``i``-th correction of the normal coordinate."""
    return reduce_branch(avg, chart, u, order=i).c_value(i)


def bifurcation_f(avg: AveragedSet, chart: BranchChart, u, i: int) -> np.ndarray:
    """``f_i(u)``, the ``i``-th bifurcation function."""
    return reduce_branch(avg, chart, u, order=i).f_value(i)


# -- closed-form contraction route ---------------------------------------------------


def _contract(T: np.ndarray, *vecs) -> np.ndarray:
    out = T
    for v in vecs:
        out = np.tensordot(out, v, axes=([1], [0])) if out.ndim > 1 else out
    return out


def explicit_corrections(avg: AveragedSet, chart: BranchChart, u, variant: str = "printed") -> dict:
    """``c_1..c_4`` and ``f_1..f_4`` from derivative tensors at ``z_u``.

    ``variant="printed"`` keeps the published coefficients, including
    ``2 d_b g_2 c_2`` in ``c_3`` and, in ``c_4``, ``4 d_b^3 g_1 c_1^3`` with no
    ``g_5`` term.  ``variant="consistent"`` uses ``3 d_b g_2 c_2``,
    ``4 d_b^3 g_2 c_1^3`` and adds ``24 pi_perp g_5``.
    """
    if variant not in ("printed", "consistent"):
        raise ValueError("variant must be 'printed' or 'consistent'")
    m, n = chart.m, chart.n
    z = chart.point(u)
    gj = avg.jets(z, 5)
    bvars = list(range(m, n))

    def D(k, order, part):
        comps = gj[k][:m] if part == "t" else gj[k][m:]
        return np.array([extract_tensor(c, bvars, order) for c in comps])

    def P(k, order):
        return D(k, order, "t")

    def Q(k, order):
        return D(k, order, "n")

    Delta = Q(1, 1)
    Gamma = P(1, 1)
    Dinv = np.linalg.inv(Delta)
    c1 = -Dinv @ Q(2, 0)
    f1 = Gamma @ c1 + P(2, 0)
    c2 = -Dinv @ (_contract(Q(1, 2), c1, c1) + 2 * Q(2, 1) @ c1 + 2 * Q(3, 0))
    f2 = (0.5 * Gamma @ c2 + 0.5 * _contract(P(1, 2), c1, c1) + P(2, 1) @ c1 + P(3, 0))
    k32 = 2.0 if variant == "printed" else 3.0
    c3 = -Dinv @ (
        _contract(Q(1, 3), c1, c1, c1)
        + 3 * _contract(Q(1, 2), c1, c2)
        + 3 * _contract(Q(2, 2), c1, c1)
        + k32 * Q(2, 1) @ c2
        + 6 * Q(3, 1) @ c1
        + 6 * Q(4, 0)
    )
    f3 = (
        Gamma @ c3 / 6
        + _contract(P(1, 3), c1, c1, c1) / 6
        + 0.5 * _contract(P(1, 2), c1, c2)
        + 0.5 * _contract(P(2, 2), c1, c1)
        + 0.5 * P(2, 1) @ c2
        + P(3, 1) @ c1
        + P(4, 0)
    )
    cubic = Q(1, 3) if variant == "printed" else Q(2, 3)
    c4 = -Dinv @ (
        _contract(Q(1, 4), c1, c1, c1, c1)
        + 3 * _contract(Q(1, 2), c2, c2)
        + 4 * _contract(Q(1, 2), c1, c3)
        + 6 * _contract(Q(1, 3), c1, c1, c2)
        + 4 * Q(2, 1) @ c3
        + 4 * _contract(cubic, c1, c1, c1)
        + 12 * Q(3, 1) @ c2
        + 12 * _contract(Q(2, 2), c1, c2)
        + 12 * _contract(Q(3, 2), c1, c1)
        + 24 * Q(4, 1) @ c1
        + (24 * Q(5, 0) if variant == "consistent" else 0.0)
    )
    f4 = (
        Gamma @ c4 / 24
        + _contract(P(1, 4), c1, c1, c1, c1) / 24
        + 0.25 * _contract(P(1, 3), c1, c1, c2)
        + _contract(P(1, 2), c2, c2) / 8
        + _contract(P(1, 2), c1, c3) / 6
        + _contract(P(2, 3), c1, c1, c1) / 6
        + 0.5 * _contract(P(2, 2), c1, c2)
        + P(2, 1) @ c3 / 6
        + 0.5 * _contract(P(3, 2), c1, c1)
        + 0.5 * P(3, 1) @ c2
        + P(4, 1) @ c1
        + P(5, 0)
    )
    return {"c": {1: c1, 2: c2, 3: c3, 4: c4}, "f": {1: f1, 2: f2, 3: f3, 4: f4}}


# -- zeros and the initial-condition series ----------------------------------------


@dataclass
class BifurcationReport:
    order: int
    u_star: np.ndarray
    f_value: np.ndarray
    jacobian: np.ndarray
    zeros: list = field(default_factory=list)
    lower_orders_sup: dict = field(default_factory=dict)
    corrections: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def conv(x):
            if isinstance(x, np.ndarray):
                return x.tolist()
            if isinstance(x, dict):
                return {str(k): conv(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [conv(v) for v in x]
            return x

        return conv(self.__dict__)


def find_simple_zero(
    avg: AveragedSet,
    chart: BranchChart,
    order: int,
    box: tuple | None = None,
    scan_points: int = 64,
    seed=None,
    vanish_tol: float = 1e-8,
    f_tol: float = 1e-10,
    det_floor: float = 1e-8,
    max_newton: int = 30,
) -> BifurcationReport:
    """Locate a simple zero of ``f_order`` on the chart.

    For ``m = 1`` the box is sign-scanned on ``scan_points`` points and
    every bracketed root is refined by Newton; the first is reported as
    ``u_star``.  For ``m > 1`` a ``seed`` is required.
    """
    if not 1 <= order <= 3:
        raise ValueError("order must be in 1..3 so that Df_order is available")
    lo, hi = (chart.lower, chart.upper) if box is None else box
    lower_sup = {i: 0.0 for i in range(1, order)}

    def f_and_jac(u):
        red = reduce_branch(avg, chart, u, order=order + 1)
        return red, red.f_value(order), red.f_value(order, 1)

    def newton(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        for _ in range(max_newton):
            red, fv, J = f_and_jac(u)
            step = np.linalg.solve(J, fv)
            u = u - step
            if np.any(u < np.asarray(lo)) or np.any(u > np.asarray(hi)):
                raise NoZeroFoundError("Newton left the search box")
            if np.max(np.abs(step)) <= 1e-13 * (1 + np.max(np.abs(u))):
                break
        red, fv, J = f_and_jac(u)
        if np.max(np.abs(fv)) > f_tol * max(1.0, float(np.max(np.abs(J)) * np.max(np.abs(u)))):
            raise NoZeroFoundError(f"Newton did not reach |f| <= {f_tol:.0e} (|f| = {np.max(np.abs(fv)):.3e})")
        return u, fv, J

    zeros = []
    if seed is not None:
        zeros.append(newton(seed))
    else:
        if chart.m != 1:
            raise ValueError("scanning is implemented for one-dimensional charts; pass a seed")
        grid = np.linspace(lo[0], hi[0], scan_points)
        vals = []
        for ug in grid:
            red = reduce_branch(avg, chart, [ug], order=order)
            for i in range(1, order):
                lower_sup[i] = max(lower_sup[i], float(np.max(np.abs(red.f_value(i)))))
            vals.append(float(red.f_value(order)[0]))
        for i, sup in lower_sup.items():
            if sup > vanish_tol:
                raise NoZeroFoundError(f"f_{i} does not vanish on the chart (sup {sup:.3e})")
        vals = np.array(vals)
        for k in range(len(grid) - 1):
            if vals[k] == 0 or vals[k] * vals[k + 1] < 0:
                zeros.append(newton([0.5 * (grid[k] + grid[k + 1])]))
        if not zeros:
            raise NoZeroFoundError(f"f_{order} has no sign change on [{lo[0]}, {hi[0]}]")
    u, fv, J = zeros[0]
    if abs(np.linalg.det(J)) < det_floor:
        raise NondegeneracyError(f"det Df_{order}(u*) = {np.linalg.det(J):.3e} is below {det_floor:.0e}")
    return BifurcationReport(order, u, fv, J, zeros=[z[0] for z in zeros], lower_orders_sup=lower_sup)


def z_series(avg: AveragedSet, chart: BranchChart, report: BifurcationReport, convention: str = "taylor"):
    """Coefficients ``z_0, z_1, z_2`` of the periodic initial condition.

    ``convention="taylor"`` gives true Taylor coefficients, where the
    normal correction enters ``z_2`` as ``c_2 / 2``.  ``convention="printed"``
    uses ``c_2`` as in the published series.
    """
    if report.order != 2:
        raise ValueError("the series is implemented for a second-order zero")
    if convention not in ("taylor", "printed"):
        raise ValueError("convention must be 'taylor' or 'printed'")
    red = reduce_branch(avg, chart, report.u_star, order=4)
    Df2 = red.f_value(2, 1)
    if abs(np.linalg.det(Df2)) < 1e-14:
        raise NondegeneracyError("Df_2(u*) is singular")
    f3, Df3, f4 = red.f_value(3), red.f_value(3, 1), red.f_value(4)
    D2f2 = red.f_value(2, 2)
    u1 = -np.linalg.solve(Df2, f3)
    u2 = -0.5 * np.linalg.solve(Df2, _contract(D2f2, u1, u1) + 2 * Df3 @ u1 + 2 * f4)
    DB, D2B = red.graph_value(1), red.graph_value(2)
    c1, Dc1, c2 = red.c_value(1), red.c_value(1, 1), red.c_value(2)
    B1 = DB @ u1 + c1
    c2_weight = 0.5 if convention == "taylor" else 1.0
    B2 = 0.5 * _contract(D2B, u1, u1) + DB @ u2 + Dc1 @ u1 + c2_weight * c2
    z0 = chart.point(report.u_star)
    z1 = np.concatenate([u1, B1])
    z2 = np.concatenate([u2, B2])
    report.corrections = {i: red.c_value(i) for i in range(1, 5)}
    report.series = {"z0": z0, "z1": z1, "z2": z2, "convention": convention,
                     "f3": f3, "f4": f4, "Df2": Df2, "D2f2": D2f2, "Df3": Df3}
    return z0, z1, z2
