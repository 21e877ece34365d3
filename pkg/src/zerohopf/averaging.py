"""Averaged functions of order 1 to 5 and their derivative tensors.

For a standard-form system ``x' = sum eps**i F_i(t, x)`` the averaged
function of order ``i`` is ``g_i(z) = y_i(T, z) / i!``, where the ``y_i``
solve the nested integral recursion

    y_1' = F_1
    y_2' = 2 F_2 + 2 DF_1 y_1
    y_3' = 6 F_3 + 6 DF_2 y_1 + 3 D^2F_1 y_1^2 + 3 DF_1 y_2
    ...

with every derivative taken at the constant point ``z`` (the unperturbed
flow of a standard-form system is trivial).  ``D^l F_j`` come from a jet
evaluation of the exact field.  Running the recursion on jet-valued ``z``
gives the state derivatives of every ``g_i`` at no extra modelling cost.

The independent check is :func:`poincare_expansion_oracle`, which integrates
the un-expanded system over one period for several eps and fits the
polynomial ``Pi(z) - z = sum eps**i g_i(z)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .jets import Jet, JetSpec, extract_tensor
from .systems import StandardFormSystem, eps_taylor_coeffs

__all__ = [
    "QuadratureError",
    "OracleError",
    "QuadratureSpec",
    "AveragedSet",
    "RECURSION_TERMS",
    "poincare_expansion_oracle",
    "chebyshev_ladder",
    "default_half_width",
]

MAX_ORDER = 5

# (coefficient, j, y-indices): the term  coef * D^l F_j (y_a, y_b, ...)  of the
# integrand of y_i, with l = len(y-indices).
RECURSION_TERMS: dict[int, list[tuple[int, int, tuple[int, ...]]]] = {
    1: [(1, 1, ())],
    2: [(2, 2, ()), (2, 1, (1,))],
    3: [(6, 3, ()), (6, 2, (1,)), (3, 1, (1, 1)), (3, 1, (2,))],
    4: [
        (24, 4, ()),
        (24, 3, (1,)),
        (12, 2, (1, 1)),
        (12, 2, (2,)),
        (12, 1, (1, 2)),
        (4, 1, (1, 1, 1)),
        (4, 1, (3,)),
    ],
    5: [
        (120, 5, ()),
        (120, 4, (1,)),
        (60, 3, (1, 1)),
        (60, 3, (2,)),
        (60, 2, (1, 2)),
        (20, 2, (1, 1, 1)),
        (20, 2, (3,)),
        (20, 1, (1, 3)),
        (15, 1, (2, 2)),
        (30, 1, (1, 1, 2)),
        (5, 1, (1, 1, 1, 1)),
        (5, 1, (4,)),
    ],
}


class QuadratureError(RuntimeError):
    """The nested quadrature did not reach its tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class OracleError(RuntimeError):
    """The eps-polynomial fit of the period map is ill-conditioned."""


@dataclass(frozen=True)
class QuadratureSpec:
    """How the nested integrals are computed.

    ``method="gauss"`` uses composite Gauss-Legendre panels with spectral
    integration matrices for the inner integrals; the error is estimated
    by repeating the run with twice as many panels.  ``method="rk"``
    integrates the coupled system ``(y_1, ..., y_5)`` with an adaptive
    Dormand-Prince 8(5,3) scheme.
    """

    method: str = "gauss"
    panels: int = 8
    nodes: int = 16
    tol: float = 1e-11
    rtol: float = 1e-11
    atol: float = 1e-13
    check_error: bool = True

    def __post_init__(self):
        if self.method not in ("gauss", "rk"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.tol <= 0 or self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.panels < 1 or self.nodes < 2:
            raise ValueError("need at least one panel and two nodes")


def _gauss_tables(p: int):
    x, w = np.polynomial.legendre.leggauss(p)
    V = np.polynomial.legendre.legvander(x, p - 1)
    # W[k, n] = int_{-1}^{x_k} P_n
    W = np.empty((p, p))
    for n in range(p):
        c = np.zeros(p)
        c[n] = 1.0
        W[:, n] = np.polynomial.legendre.legval(x, np.polynomial.legendre.legint(c, lbnd=-1))
    S = W @ np.linalg.inv(V)
    return x, w, S


class _Grid:
    """Composite Gauss-Legendre nodes on ``[0, t_end]`` with cumulative integration."""

    def __init__(self, t_end: float, panels: int, p: int):
        x, w, S = _gauss_tables(p)
        h = t_end / panels
        left = np.arange(panels) * h
        self.t = (left[:, None] + (x[None, :] + 1.0) * h / 2.0).ravel()
        self.panels, self.p, self.h = panels, p, h
        self.w, self.S = w * h / 2.0, S * h / 2.0

    def cumulative(self, values: np.ndarray):
        """Indefinite integrals at the nodes and the total, along the last axis."""
        lead = values.shape[:-1]
        v = values.reshape(lead + (self.panels, self.p))
        partial = np.einsum("km,...m->...k", self.S, v)
        totals = v @ self.w
        offsets = np.cumsum(totals, axis=-1) - totals
        inner = partial + offsets[..., None]
        return inner.reshape(lead + (-1,)), totals.sum(axis=-1)


class _Tensors:
    """Derivative jets ``d^alpha F_j`` in state offsets, with multilinear application."""

    def __init__(self, bundle, spec: JetSpec, n: int):
        self.spec, self.n = spec, n
        self._base = {}
        self._bundle = bundle
        self._cache: dict = {}

    def field(self, j: int) -> list[Jet]:
        if j not in self._base:
            self._base[j] = self._bundle.state_jets(j, self.spec)
        return self._base[j]

    def partial(self, j: int, counts: tuple[int, ...]) -> list[Jet]:
        key = (j, counts)
        if key not in self._cache:
            if sum(counts) == 0:
                self._cache[key] = self.field(j)
            else:
                v = next(k for k, c in enumerate(counts) if c)
                lower = list(counts)
                lower[v] -= 1
                self._cache[key] = [c.derivative(v) for c in self.partial(j, tuple(lower))]
        return self._cache[key]

    def apply(self, j: int, vecs: Sequence[Sequence[Jet]]) -> list[Jet]:
        """``D^l F_j (v_1, ..., v_l)`` for symmetric ``D^l F_j``."""
        n, l = self.n, len(vecs)
        if l == 0:
            return self.field(j)
        out = [None] * n
        if all(v is vecs[0] for v in vecs):
            v = vecs[0]
            for counts in _compositions(l, n):
                mult = math.factorial(l) // math.prod(math.factorial(c) for c in counts)
                w = None
                for var, c in enumerate(counts):
                    for _ in range(c):
                        w = v[var] if w is None else w * v[var]
                w = w * float(mult)
                comps = self.partial(j, counts)
                for c in range(n):
                    term = comps[c] * w
                    out[c] = term if out[c] is None else out[c] + term
            return out
        for idx in itertools.product(range(n), repeat=l):
            counts = tuple(idx.count(v) for v in range(n))
            w = vecs[0][idx[0]]
            for q in range(1, l):
                w = w * vecs[q][idx[q]]
            comps = self.partial(j, counts)
            for c in range(n):
                term = comps[c] * w
                out[c] = term if out[c] is None else out[c] + term
        return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _integrand(i: int, tens: _Tensors, ys: dict[int, list[Jet]]) -> list[Jet]:
    out = None
    for coef, j, yidx in RECURSION_TERMS[i]:
        term = tens.apply(j, [ys[a] for a in yidx])
        term = [c * float(coef) for c in term]
        out = term if out is None else [o + t for o, t in zip(out, term)]
    return out


class AveragedSet:
    """Averaged functions ``g_1 ... g_5`` of a standard-form system.

    Parameters
    ----------
    source : StandardFormSystem
    quadrature : QuadratureSpec, optional

    Notes
    -----
    One evaluation at ``z`` with ``total`` requested returns every ``g_i``
    with ``i <= min(total, 5)`` as a jet in the state offsets, exact up to
    degree ``total - i``.  Results are cached per ``(z, total)``.
    """

    def __init__(self, source: StandardFormSystem, quadrature: QuadratureSpec | None = None):
        self.source = source
        self.quadrature = quadrature or QuadratureSpec()
        self._cache: dict = {}
        self.last_error_estimate = 0.0

    @property
    def dim(self) -> int:
        return self.source.dim

    # -- core --------------------------------------------------------------

    def _state_spec(self, total: int) -> JetSpec:
        return JetSpec.total(self.dim, max(total - 1, 0))

    def _run_gauss(self, z, total: int, t_end: float, panels: int) -> dict[int, list[Jet]]:
        q = self.quadrature
        imax = min(total, MAX_ORDER)
        grid = _Grid(t_end, panels, q.nodes)
        bundle = eps_taylor_coeffs(
            self.source, grid.t, z, eps_order=imax, state_order=max(total - 1, 0),
            total_order=total, check_domain=False,
        )
        spec = self._state_spec(total)
        tens = _Tensors(bundle, spec, self.dim)
        ys, ends = {}, {}
        for i in range(1, imax + 1):
            f = _integrand(i, tens, ys)
            yi, endi = [], []
            for comp in f:
                inner, tot = grid.cumulative(comp.coeffs)
                yi.append(Jet(spec, inner))
                endi.append(Jet(spec, tot))
            ys[i], ends[i] = yi, endi
        return ends

    def _run_rk(self, z, total: int, t_end: float) -> dict[int, list[Jet]]:
        q = self.quadrature
        imax = min(total, MAX_ORDER)
        spec = self._state_spec(total)
        n, size = self.dim, spec.size
        block = n * size

        def unpack(Y):
            return {
                i: [Jet(spec, Y[(i - 1) * block + c * size:(i - 1) * block + (c + 1) * size]) for c in range(n)]
                for i in range(1, imax + 1)
            }

        def rhs(t, Y):
            bundle = eps_taylor_coeffs(
                self.source, t, z, eps_order=imax, state_order=max(total - 1, 0),
                total_order=total, check_domain=False,
            )
            tens = _Tensors(bundle, spec, n)
            ys = unpack(Y)
            out = []
            for i in range(1, imax + 1):
                out.extend(c.coeffs for c in _integrand(i, tens, ys))
            return np.concatenate(out)

        sol = solve_ivp(rhs, (0.0, t_end), np.zeros(imax * block), method="DOP853",
                        rtol=q.rtol, atol=q.atol)
        if not sol.success:
            raise QuadratureError(f"adaptive integration failed: {sol.message}", np.inf)
        return unpack(sol.y[:, -1])

    def _run(self, z, total: int, t_end: float | None = None) -> dict[int, list[Jet]]:
        z = self.source.check_domain(z)
        if total < 1:
            raise ValueError("total order must be at least 1")
        t_end = self.source.period if t_end is None else float(t_end)
        q = self.quadrature
        if q.method == "rk":
            return self._run_rk(z, total, t_end)
        panels = q.panels
        ends = self._run_gauss(z, total, t_end, panels)
        if not q.check_error:
            return ends
        # panel doubling, capped at 16x the base count; an estimate that stops
        # shrinking under doubling is a rounding plateau, accepted within 1e3 * tol
        prev = math.inf
        for _ in range(4):
            fine = self._run_gauss(z, total, t_end, 2 * panels)
            err = 0.0
            for i in ends:
                for a, b in zip(ends[i], fine[i]):
                    # scale per jet: derivative coefficients differ by orders of magnitude
                    scale = 1.0 + float(np.max(np.abs(b.coeffs)))
                    err = max(err, float(np.max(np.abs(a.coeffs - b.coeffs))) / scale)
            self.last_error_estimate = err
            if err <= q.tol or (err > 0.25 * prev and err <= 1e3 * q.tol):
                return fine
            ends, panels, prev = fine, 2 * panels, err
        raise QuadratureError("nested quadrature did not converge", err)

    def jets(self, z, total: int) -> dict[int, list[Jet]]:
        """``{i: g_i(z + s)}`` as jets in the offsets ``s``, exact to degree ``total - i``."""
        key = tuple(np.asarray(z, dtype=float).tolist())
        for (k, tot), val in self._cache.items():
            if k == key and tot >= total:
                return {i: [c.convert(self._state_spec(total)) for c in v]
                        for i, v in val.items() if i <= total}
        ends = self._run(z, total)
        out = {i: [c * (1.0 / math.factorial(i)) for c in v] for i, v in ends.items()}
        if len(self._cache) > 256:
            self._cache.clear()
        self._cache[(key, total)] = out
        return out

    # -- public evaluators -------------------------------------------------

    def y(self, t: float, z, i: int) -> np.ndarray:
        """``y_i(t, z)`` for ``0 <= t <= T``."""
        if not 1 <= i <= MAX_ORDER:
            raise ValueError("order must be in 1..5")
        if not 0.0 <= t <= self.source.period + 1e-14:
            raise ValueError("t must lie in [0, T]")
        if t == 0.0:
            return np.zeros(self.dim)
        ends = self._run(z, i, t_end=t)
        return np.array([c.value for c in ends[i]])

    def g(self, z, i: int) -> np.ndarray:
        """``g_i(z) = y_i(T, z) / i!``."""
        if not 1 <= i <= MAX_ORDER:
            raise ValueError("order must be in 1..5")
        return np.array([c.value for c in self.jets(z, i)[i]])

    def g_jets(self, z, i: int, k: int) -> list[Jet]:
        """``g_i(z + s)`` as jets, exact through degree ``k`` in ``s``."""
        if not 1 <= i <= MAX_ORDER:
            raise ValueError("order must be in 1..5")
        return self.jets(z, i + k)[i]

    def g_derivatives(self, z, i: int, k: int) -> np.ndarray:
        """``D^k g_i(z)``, shape ``(n,) + (n,)*k``."""
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        comps = self.g_jets(z, i, k)
        return np.array([extract_tensor(c, range(self.dim), k) for c in comps])

    def jacobian(self, z, i: int = 1) -> np.ndarray:
        return self.g_derivatives(z, i, 1)


# -- the independent oracle ----------------------------------------------------


def chebyshev_ladder(h: float = 0.03, count: int = 15) -> np.ndarray:
    """Chebyshev points of the first kind on ``[-h, h]``."""
    k = np.arange(count)
    return h * np.cos((2 * k + 1) * np.pi / (2 * count))


def default_half_width(z, base: float = 0.03, scale: float = 0.5) -> float:
    """Ladder half-width ``min(base, scale / max|z|)``.

    The eps-series of the period map converges on a disc that shrinks
    roughly like ``1 / |z|`` for the Rossler charts; too wide a ladder
    leaves truncation error in the high-order fits and too narrow a one
    amplifies integration noise.
    """
    return min(base, scale / max(1.0, float(np.max(np.abs(z)))))


def _period_map(s: StandardFormSystem, z, eps: float, rtol: float, atol: float) -> np.ndarray:
    def f(t, x):
        return s.field(t, x, eps)

    sol = solve_ivp(f, (0.0, s.period), np.asarray(z, dtype=float), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise OracleError(f"period-map integration failed at eps={eps}: {sol.message}")
    return sol.y[:, -1]


def poincare_expansion_oracle(
    s: StandardFormSystem,
    z,
    eps_list: Sequence[float] | None = None,
    degree: int | None = None,
    rtol: float = 1e-13,
    atol: float = 1e-15,
    max_condition: float = 1e8,
) -> np.ndarray:
    """Estimate ``g_1 ... g_5`` at ``z`` from the un-expanded period map.

    Integrates the full system over one period for each eps in
    ``eps_list`` and least-squares fits ``Pi(z) - z`` by a polynomial in eps
    without constant term.  Returns an array of shape ``(5, n)``.
    """
    z = s.check_domain(z)
    if eps_list is None:
        eps_list = chebyshev_ladder(default_half_width(z))
    eps_list = np.asarray(eps_list, dtype=float)
    if len(np.unique(eps_list)) < 7:
        raise OracleError("need at least 7 distinct eps values")
    if degree is None:
        degree = min(len(eps_list) - 3, 12)
    if degree < MAX_ORDER or degree >= len(eps_list) + 1:
        raise OracleError("fit degree must be at least 5 and leave the system overdetermined or square")
    disp = []
    for e in eps_list:
        disp.append(np.zeros(s.dim) if e == 0 else _period_map(s, z, e, rtol, atol) - z)
    disp = np.array(disp)
    h = np.max(np.abs(eps_list))
    x = eps_list / h
    V = np.vander(x, degree + 1, increasing=True)[:, 1:]
    if np.linalg.cond(V) > max_condition:
        raise OracleError(f"eps ladder is ill-conditioned (cond {np.linalg.cond(V):.2e})")
    coef, *_ = np.linalg.lstsq(V, disp, rcond=None)
    scale = h ** np.arange(1, degree + 1)
    coef = coef / scale[:, None]
    return coef[:MAX_ORDER]
