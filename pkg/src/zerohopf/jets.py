"""Truncated multivariate Taylor polynomials ("jets").

A :class:`Jet` stores the Taylor coefficients of a germ in a fixed set of
variables, truncated by a per-variable degree cap and a total-degree cap.
Coefficients follow the Taylor convention: the coefficient of the
multi-index ``m`` is ``d^|m| f / dx^m / m!``.

Coefficient arrays carry optional trailing *batch* axes, so a single jet
can represent the same germ structure at many points at once (for instance
at every quadrature node of a period). All arithmetic broadcasts over those
axes.

    >>> spec = JetSpec.univariate(3)
    >>> e = Jet.variable(spec, 0)
    >>> (1 / (1 - e)).coeffs
    array([1., 1., 1., 1.])
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "IncompatibleSpecError",
    "JetDomainError",
    "JetSpec",
    "Jet",
    "jet_add",
    "jet_mul",
    "jet_div",
    "jet_elem",
    "extract_tensor",
]


class IncompatibleSpecError(ValueError):
    """Raised when jets with different :class:`JetSpec` are combined."""


class JetDomainError(ValueError):
    """Raised when an operation is undefined at the jet's constant term."""


@dataclass(frozen=True)
class JetSpec:
    """Shape of a jet: number of variables and degree caps.

    Parameters
    ----------
    num_vars : int
        Number of independent variables.
    max_degree : tuple of int
        Largest retained power of each variable.
    total_degree : int
        Largest retained total degree.
    """

    num_vars: int
    max_degree: tuple[int, ...]
    total_degree: int

    def __post_init__(self):
        object.__setattr__(self, "max_degree", tuple(int(d) for d in self.max_degree))
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        if len(self.max_degree) != self.num_vars:
            raise ValueError("max_degree needs one entry per variable")
        if any(d < 0 for d in self.max_degree) or self.total_degree < 0:
            raise ValueError("degree caps must be non-negative")
        if self.total_degree < max(self.max_degree):
            raise ValueError("total_degree must dominate every per-variable cap")

    @classmethod
    def univariate(cls, degree: int) -> "JetSpec":
        return cls(1, (degree,), degree)

    @classmethod
    def total(cls, num_vars: int, degree: int) -> "JetSpec":
        """Jets in ``num_vars`` variables truncated at total degree ``degree``."""
        return cls(num_vars, (degree,) * num_vars, degree)

    # -- index tables -----------------------------------------------------

    @cached_property
    def indices(self) -> np.ndarray:
        ranges = [range(d + 1) for d in self.max_degree]
        out = [m for m in itertools.product(*ranges) if sum(m) <= self.total_degree]
        out.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
        return np.array(out, dtype=int).reshape(len(out), self.num_vars)

    @cached_property
    def index_of(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in m): k for k, m in enumerate(self.indices)}

    @property
    def size(self) -> int:
        return len(self.indices)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.indices.sum(axis=1)

    def contains(self, m: Sequence[int]) -> bool:
        return tuple(m) in self.index_of

    @cached_property
    def _mul_table(self):
        idx = self.index_of
        pairs = []
        for i, mi in enumerate(self.indices):
            for j, mj in enumerate(self.indices):
                k = idx.get(tuple(int(x) for x in mi + mj))
                if k is not None:
                    pairs.append((k, i, j))
        pairs.sort()
        arr = np.array(pairs, dtype=int)
        K, I, J = arr[:, 0], arr[:, 1], arr[:, 2]
        starts = np.flatnonzero(np.r_[True, K[1:] != K[:-1]])
        return I, J, starts

    def _derivative_table(self, var: int):
        src, dst, fac = [], [], []
        for k, m in enumerate(self.indices):
            up = list(m)
            up[var] += 1
            j = self.index_of.get(tuple(up))
            if j is not None:
                src.append(j)
                dst.append(k)
                fac.append(up[var])
        return np.array(src, int), np.array(dst, int), np.array(fac, float)

    @cached_property
    def _derivative_tables(self):
        return [self._derivative_table(v) for v in range(self.num_vars)]


def _as_batch(value) -> np.ndarray:
    return np.asarray(value, dtype=np.result_type(value, float))


class Jet:
    """Truncated Taylor polynomial with optional batch axes.

    Jets are treated as immutable values; every operation returns a new jet.

    Parameters
    ----------
    spec : JetSpec
        Variables and degree caps.
    coeffs : array_like, shape (spec.size, *batch)
        Taylor coefficients in the order of ``spec.indices``.
    """

    __slots__ = ("spec", "coeffs")
    __array_priority__ = 1000

    def __init__(self, spec: JetSpec, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.dtype.kind not in "fc":
            coeffs = coeffs.astype(float)
        if coeffs.shape[:1] != (spec.size,):
            raise ValueError(
                f"coefficient array has leading size {coeffs.shape[:1]}, spec needs {spec.size}"
            )
        self.spec = spec
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, spec: JetSpec, value=0.0) -> "Jet":
        value = _as_batch(value)
        c = np.zeros((spec.size,) + value.shape, dtype=value.dtype)
        c[0] = value
        return cls(spec, c)

    @classmethod
    def variable(cls, spec: JetSpec, var: int, value=0.0) -> "Jet":
        """The jet of ``x_var`` expanded about ``value``."""
        jet = cls.constant(spec, value)
        unit = [0] * spec.num_vars
        unit[var] = 1
        k = spec.index_of.get(tuple(unit))
        if k is not None:
            jet.coeffs[k] = 1.0
        return jet

    @classmethod
    def from_terms(cls, spec: JetSpec, terms: dict) -> "Jet":
        """Build a jet from ``{multi_index: coefficient}``; terms beyond the caps are dropped."""
        c = np.zeros(spec.size)
        for m, v in terms.items():
            k = spec.index_of.get(tuple(m))
            if k is not None:
                c[k] += v
        return cls(spec, c)

    # -- inspection -------------------------------------------------------

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def coeff(self, m: Sequence[int]):
        """Taylor coefficient of the multi-index ``m`` (zero if truncated away)."""
        k = self.spec.index_of.get(tuple(m))
        if k is None:
            return np.zeros(self.batch_shape)
        return self.coeffs[k]

    def __repr__(self):
        return f"Jet(spec={self.spec}, coeffs={self.coeffs!r})"

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Jet"):
        if other.spec != self.spec:
            raise IncompatibleSpecError(f"{self.spec} vs {other.spec}")

    def _aligned(self, other: "Jet"):
        a, b = self.coeffs, other.coeffs
        if a.ndim < b.ndim:
            a = a.reshape(a.shape + (1,) * (b.ndim - a.ndim))
        elif b.ndim < a.ndim:
            b = b.reshape(b.shape + (1,) * (a.ndim - b.ndim))
        return a, b

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            a, b = self._aligned(other)
            return Jet(self.spec, a + b)
        c = self.coeffs.copy() if np.ndim(other) == 0 else self.coeffs + np.zeros_like(other)
        c = c.astype(np.result_type(c, other), copy=False)
        c[0] = c[0] + other
        return Jet(self.spec, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.spec, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            I, J, starts = self.spec._mul_table
            a, b = self._aligned(other)
            prod = a[I] * b[J]
            return Jet(self.spec, np.add.reduceat(prod, starts, axis=0))
        return Jet(self.spec, self.coeffs * _as_batch(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.spec, self.coeffs / _as_batch(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Jet.constant(self.spec, np.ones(self.batch_shape))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- elementary functions --------------------------------------------

    def _compose(self, taylor: Sequence[np.ndarray]) -> "Jet":
        """Return ``sum_k taylor[k] * (self - self.value)**k`` (Horner)."""
        h = Jet(self.spec, self.coeffs.copy())
        h.coeffs[0] = 0.0
        out = Jet.constant(self.spec, taylor[-1])
        for t in reversed(taylor[:-1]):
            out = out * h + t
        return out

    def reciprocal(self) -> "Jet":
        a0 = self.value
        if np.any(a0 == 0):
            raise JetDomainError("reciprocal of a jet with zero constant term")
        D = self.spec.total_degree
        return self._compose([(-1) ** k / a0 ** (k + 1) for k in range(D + 1)])

    def sqrt(self) -> "Jet":
        a0 = self.value
        if np.iscomplexobj(a0):
            raise JetDomainError("sqrt of a complex jet is not supported")
        if np.any(a0 <= 0):
            raise JetDomainError("sqrt needs a strictly positive constant term")
        D = self.spec.total_degree
        return self._compose(
            [_binom_half(k) * a0 ** (0.5 - k) for k in range(D + 1)]
        )

    def sin(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (s, c, -s, -c)
        D = self.spec.total_degree
        return self._compose([cyc[k % 4] / math.factorial(k) for k in range(D + 1)])

    def cos(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (c, -s, -c, s)
        D = self.spec.total_degree
        return self._compose([cyc[k % 4] / math.factorial(k) for k in range(D + 1)])

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        D = self.spec.total_degree
        return self._compose([e / math.factorial(k) for k in range(D + 1)])

    # -- calculus on jets --------------------------------------------------

    def derivative(self, var: int) -> "Jet":
        """Partial derivative in ``var``; the top-degree coefficients become zero."""
        src, dst, fac = self.spec._derivative_tables[var]
        c = np.zeros_like(self.coeffs)
        fac = fac.reshape((-1,) + (1,) * len(self.batch_shape))
        c[dst] = self.coeffs[src] * fac
        return Jet(self.spec, c)

    def partial(self, counts: Sequence[int]) -> "Jet":
        """Mixed partial derivative, ``counts[v]`` times in variable ``v``."""
        out = self
        for v, n in enumerate(counts):
            for _ in range(n):
                out = out.derivative(v)
        return out

    def compose(self, args: Sequence["Jet"]) -> "Jet":
        """Substitute jets (with zero constant term) for the variables.

        ``self`` is read as a polynomial in its variables and evaluated at
        ``args``; the result lives in the spec of ``args``.
        """
        if len(args) != self.spec.num_vars:
            raise ValueError("need one argument per variable")
        target = args[0].spec
        for a in args:
            if a.spec != target:
                raise IncompatibleSpecError("substituted jets must share a spec")
        powers = []
        for v, a in enumerate(args):
            p = [Jet.constant(target, np.ones(a.batch_shape))]
            for _ in range(self.spec.max_degree[v]):
                p.append(p[-1] * a)
            powers.append(p)
        batch = np.broadcast_shapes(self.batch_shape, *[a.batch_shape for a in args])
        out = Jet.constant(target, np.zeros(batch, dtype=self.coeffs.dtype))
        for k, m in enumerate(self.spec.indices):
            ck = self.coeffs[k]
            if not np.any(ck):
                continue
            term = powers[0][m[0]]
            for v in range(1, self.spec.num_vars):
                if m[v]:
                    term = term * powers[v][m[v]]
            out = out + term * ck
        return out

    def convert(self, spec: JetSpec, var_map: Sequence[int | None] | None = None) -> "Jet":
        """Re-express in ``spec``.

        ``var_map[v]`` gives the target variable of source variable ``v``
        (``None`` drops every term that involves ``v``).  Terms beyond the
        target caps are discarded.
        """
        if var_map is None:
            var_map = list(range(self.spec.num_vars))
        src, dst = [], []
        for k, m in enumerate(self.spec.indices):
            tgt = [0] * spec.num_vars
            ok = True
            for v, p in enumerate(m):
                if p == 0:
                    continue
                if var_map[v] is None:
                    ok = False
                    break
                tgt[var_map[v]] += p
            if ok:
                j = spec.index_of.get(tuple(tgt))
                if j is not None:
                    src.append(k)
                    dst.append(j)
        c = np.zeros((spec.size,) + self.batch_shape, dtype=self.coeffs.dtype)
        c[dst] = self.coeffs[src]
        return Jet(spec, c)

    def coefficient_in(self, var: int, power: int, spec: JetSpec | None = None) -> "Jet":
        """Coefficient of ``x_var**power`` as a jet in the remaining variables."""
        rest = [v for v in range(self.spec.num_vars) if v != var]
        if spec is None:
            spec = JetSpec(
                len(rest),
                tuple(self.spec.max_degree[v] for v in rest),
                self.spec.total_degree,
            )
        src, dst = [], []
        for k, m in enumerate(self.spec.indices):
            if m[var] != power:
                continue
            j = spec.index_of.get(tuple(int(m[v]) for v in rest))
            if j is not None:
                src.append(k)
                dst.append(j)
        c = np.zeros((spec.size,) + self.batch_shape, dtype=self.coeffs.dtype)
        c[dst] = self.coeffs[src]
        return Jet(spec, c)

    def eval(self, point: Sequence[float]):
        """Evaluate the truncated polynomial at ``point`` (offsets from the expansion point)."""
        point = np.asarray(point, dtype=float)
        mons = np.prod(point[None, :] ** self.spec.indices, axis=1)
        return np.tensordot(mons, self.coeffs, axes=(0, 0))


def _binom_half(k: int) -> float:
    """Generalised binomial coefficient C(1/2, k)."""
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


# -- functional interface ----------------------------------------------------


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_div(a: Jet, b: Jet) -> Jet:
    return a / b


_ELEMENTARY: dict[str, Callable[[Jet], Jet]] = {
    "sin": Jet.sin,
    "cos": Jet.cos,
    "sqrt": Jet.sqrt,
    "reciprocal": Jet.reciprocal,
    "exp": Jet.exp,
}


def jet_elem(f: str, a: Jet) -> Jet:
    """Apply the elementary function named ``f`` to a jet."""
    try:
        return _ELEMENTARY[f](a)
    except KeyError:
        raise ValueError(f"unknown elementary function {f!r}") from None


def extract_tensor(j: Jet, var_subset: Iterable[int], order: int) -> np.ndarray:
    """Symmetric derivative tensor of order ``order`` at the expansion point.

    Entry ``[i1, ..., il]`` is the mixed partial derivative with respect to
    ``var_subset[i1], ..., var_subset[il]`` (derivative convention, i.e. the
    Taylor coefficient times ``m!``).  Batch axes of the jet trail the
    tensor axes.
    """
    var_subset = list(var_subset)
    for v in var_subset:
        if order > j.spec.max_degree[v]:
            raise ValueError(f"order {order} exceeds the cap of variable {v}")
    if order > j.spec.total_degree:
        raise ValueError(f"order {order} exceeds the total-degree cap")
    k = len(var_subset)
    out = np.zeros((k,) * order + j.batch_shape, dtype=j.coeffs.dtype)
    for tup in itertools.product(range(k), repeat=order):
        m = [0] * j.spec.num_vars
        for t in tup:
            m[var_subset[t]] += 1
        fact = math.prod(math.factorial(x) for x in m)
        out[tup] = j.coeff(m) * fact
    return out
