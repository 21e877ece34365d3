"""Rössler vector field, its zero-Hopf families and their standard forms.

Both families are brought to a 2*pi-periodic system in (r, z) with the
polar angle theta as independent variable:

    dr/dtheta = sum_i eps**i F_i^1(theta, r, z) + ...
    dz/dtheta = sum_i eps**i F_i^2(theta, r, z) + ...

The right-hand side is written once with ordinary arithmetic, so the same
code runs on floats, complex numbers and :class:`~zerohopf.jets.Jet`
instances.  The eps-expansion is never hand-written: it is read off a jet
evaluation of the exact transformed field.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jets import Jet, JetSpec, extract_tensor

__all__ = [
    "DomainError",
    "ReparameterizationError",
    "RosslerParams",
    "CaseAFamily",
    "CaseBFamily",
    "StandardFormSystem",
    "TaylorBundle",
    "rossler_rhs",
    "rossler_jacobian",
    "case_a_standard_form",
    "case_b_standard_form",
    "eps_taylor_coeffs",
    "scalar_test_system",
]

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """A state or parameter lies outside the region where a model is valid."""


class ReparameterizationError(ValueError):
    """The angular speed cannot serve as a new time (vanishing leading term)."""


# -- the Rössler field ---------------------------------------------------------


@dataclass(frozen=True)
class RosslerParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not all(np.isfinite([self.a, self.b, self.c])):
            raise ValueError("Rössler parameters must be finite")


def rossler_rhs(p: RosslerParams, state):
    """Rössler vector field ``(-y - z, x + a y, b x - c z + x z)``."""
    x, y, z = state
    return np.array([-y - z, x + p.a * y, p.b * x - p.c * z + x * z])


def rossler_jacobian(p: RosslerParams, state) -> np.ndarray:
    x, y, z = state
    return np.array(
        [[0.0, -1.0, -1.0], [1.0, p.a, 0.0], [p.b + z, 0.0, x - p.c]]
    )


def _scaled_rossler(u, a, b, c, eps):
    """``f(eps * u) / eps`` for the Rössler field, exact for any eps."""
    x, y, z = u
    return (-y - z, x + a * y, b * x - c * z + eps * x * z)


def _matvec(M: np.ndarray, v):
    return tuple(
        sum(M[i, j] * v[j] for j in range(len(v)) if M[i, j] != 0.0)
        for i in range(M.shape[0])
    )


# -- parameter families --------------------------------------------------------


@dataclass(frozen=True)
class CaseAFamily:
    """``(a, b, c) = (abar + eps*alpha, 1 + eps*beta, abar + eps*gamma)``.

    The family is taken exactly linear in eps.
    """

    abar: float
    alpha: float
    beta: float
    gamma: float
    eps: float = 0.0

    def __post_init__(self):
        if self.abar == 0 or self.abar**2 >= 2:
            raise DomainError("Case A needs abar != 0 and abar**2 < 2")
        if self.eps < 0:
            raise DomainError("eps must be non-negative")

    @property
    def rotation_rate(self) -> float:
        return math.sqrt(2.0 - self.abar**2)

    def params(self, eps=None):
        e = self.eps if eps is None else eps
        return (
            self.abar + e * self.alpha,
            1.0 + e * self.beta,
            self.abar + e * self.gamma,
        )

    def rossler(self, eps=None) -> RosslerParams:
        return RosslerParams(*(float(v) for v in self.params(eps)))

    def linear_change(self) -> np.ndarray:
        """Columns map (Xbar, Ybar, Zbar) to (x, y, z)."""
        a, s = self.abar, self.rotation_rate
        return np.array(
            [[1.0, -a / s, 1.0], [0.0, 1.0 / s, -1.0 / a], [a, -(a * a - 1.0) / s, 1.0 / a]]
        )

    def with_(self, **kw) -> "CaseAFamily":
        d = dict(abar=self.abar, alpha=self.alpha, beta=self.beta, gamma=self.gamma, eps=self.eps)
        d.update(kw)
        return CaseAFamily(**d)


@dataclass(frozen=True)
class CaseBFamily:
    """``(a, b, c) = (alpha(eps), omega**2 - 1 + beta(eps), gamma(eps))``.

    Each of alpha, beta, gamma is the polynomial ``sum_{i=1}^5 eps**i c_i``.
    """

    omega: float
    alpha_coeffs: tuple[float, ...]
    beta_coeffs: tuple[float, ...]
    gamma_coeffs: tuple[float, ...]
    eps: float = 0.0
    guard: float = 1e-6

    def __post_init__(self):
        for name in ("alpha_coeffs", "beta_coeffs", "gamma_coeffs"):
            v = tuple(float(x) for x in getattr(self, name))
            if len(v) != 5:
                raise ValueError(f"{name} needs exactly 5 entries")
            object.__setattr__(self, name, v)
        if self.omega <= 0:
            raise DomainError("omega must be positive")
        if abs(self.omega - 1) < self.guard or abs(self.omega - math.sqrt(2)) < self.guard:
            raise DomainError("omega too close to the resonances 1 or sqrt(2)")
        if self.eps < 0:
            raise DomainError("eps must be non-negative")

    @classmethod
    def constrained(cls, omega, alpha_rest, beta_coeffs, gamma_coeffs, eps=0.0) -> "CaseBFamily":
        """Fill alpha_1, alpha_2 from the branching constraints.

        ``alpha_1 = gamma_1 (omega**2 - 1)`` and
        ``alpha_2 = beta_1 gamma_1 + gamma_2 (omega**2 - 1)``;
        ``alpha_rest`` holds alpha_3..alpha_5.
        """
        g, b = list(gamma_coeffs), list(beta_coeffs)
        w2 = omega * omega
        a1 = g[0] * (w2 - 1)
        a2 = b[0] * g[0] + g[1] * (w2 - 1)
        return cls(omega, (a1, a2, *alpha_rest), tuple(b), tuple(g), eps)

    @property
    def rotation_rate(self) -> float:
        return self.omega

    def params(self, eps=None):
        e = self.eps if eps is None else eps
        powers = [e ** (i + 1) for i in range(5)]
        a = sum(p * c for p, c in zip(powers, self.alpha_coeffs))
        b = self.omega**2 - 1.0 + sum(p * c for p, c in zip(powers, self.beta_coeffs))
        c = sum(p * c for p, c in zip(powers, self.gamma_coeffs))
        return a, b, c

    def rossler(self, eps=None) -> RosslerParams:
        return RosslerParams(*(float(v) for v in self.params(eps)))

    def linear_change(self) -> np.ndarray:
        w = self.omega
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0 / w, 1.0], [0.0, w - 1.0 / w, -1.0]])

    def with_(self, **kw) -> "CaseBFamily":
        d = dict(
            omega=self.omega,
            alpha_coeffs=self.alpha_coeffs,
            beta_coeffs=self.beta_coeffs,
            gamma_coeffs=self.gamma_coeffs,
            eps=self.eps,
            guard=self.guard,
        )
        d.update(kw)
        return CaseBFamily(**d)


# -- standard-form systems -----------------------------------------------------


@dataclass(frozen=True)
class StandardFormSystem:
    """A T-periodic system ``x' = sum eps**i F_i(t, x)`` given by its exact field.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, x, eps) -> tuple`` of length ``dim``.  ``x`` is a sequence of
        floats or jets, ``eps`` a float or a jet; ``t`` may be an array.
    dim : int
        State dimension.
    period : float
        Period in ``t``.
    lower, upper : tuple of float
        Domain box Omega.
    family : object, optional
        Parameter family the system was built from.
    to_rossler : callable, optional
        ``to_rossler(t, x, eps)`` maps a standard-form state back to Rössler
        coordinates (needed to seed orbits of the full flow).
    """

    rhs: Callable
    dim: int
    period: float = TWO_PI
    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()
    name: str = "standard-form"
    family: object = None
    to_rossler: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.lower:
            object.__setattr__(self, "lower", (-np.inf,) * self.dim)
        if not self.upper:
            object.__setattr__(self, "upper", (np.inf,) * self.dim)

    def check_domain(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise DomainError(f"state must have shape ({self.dim},)")
        if np.any(z < np.asarray(self.lower)) or np.any(z > np.asarray(self.upper)):
            raise DomainError(f"state {z} outside the domain box {self.lower}..{self.upper}")
        return z

    def field(self, t, x, eps) -> np.ndarray:
        """Numeric right-hand side (float or complex)."""
        return np.array(self.rhs(t, x, eps))


def _cylinder_rhs(family, scale_z: bool):
    """Exact (r, z)-field in theta-time for a Rössler family.

    ``scale_z`` selects the Case A chart ``Z = r z`` instead of ``Z = z``.
    """
    M = family.linear_change()
    Minv = np.linalg.inv(M)
    Minv[np.abs(Minv) < 1e-15] = 0.0
    M = M.copy()
    M[np.abs(M) < 1e-15] = 0.0

    def rhs(theta, x, eps):
        r, zc = x
        ct, st = np.cos(theta), np.sin(theta)
        X, Y = r * ct, r * st
        Z = r * zc if scale_z else zc
        a, b, c = family.params(eps)
        u = _matvec(M, (X, Y, Z))
        du = _scaled_rossler(u, a, b, c, eps)
        dX, dY, dZ = _matvec(Minv, du)
        r_dot = ct * dX + st * dY
        theta_dot = (ct * dY - st * dX) / r
        z_dot = (dZ - zc * r_dot) / r if scale_z else dZ
        return r_dot / theta_dot, z_dot / theta_dot

    def to_rossler(theta, x, eps):
        r, zc = x
        X, Y = r * np.cos(theta), r * np.sin(theta)
        Z = r * zc if scale_z else zc
        return eps * (M @ np.array([X, Y, Z]))

    return rhs, to_rossler


def case_a_standard_form(f: CaseAFamily, lower=(1e-3, -100.0), upper=(100.0, 100.0)) -> StandardFormSystem:
    """Case A in the chart ``(X, Y, Z) = (r cos theta, r sin theta, r z)``."""
    if lower[0] <= 0:
        raise DomainError("the cylindrical chart needs r > 0 on the whole domain box")
    rhs, to_r = _cylinder_rhs(f, scale_z=True)
    return StandardFormSystem(rhs, 2, TWO_PI, tuple(lower), tuple(upper), "case-A", f, to_r)


def case_b_standard_form(f: CaseBFamily, lower=(1e-3, -100.0), upper=(100.0, 100.0)) -> StandardFormSystem:
    """Case B in the chart ``(X, Y, Z) = (r cos theta, r sin theta, z)``."""
    if lower[0] <= 0:
        raise DomainError("the cylindrical chart needs r > 0 on the whole domain box")
    if f.omega < 1e-8:
        raise ReparameterizationError("angular speed has a vanishing leading term")
    rhs, to_r = _cylinder_rhs(f, scale_z=False)
    return StandardFormSystem(rhs, 2, TWO_PI, tuple(lower), tuple(upper), "case-B", f, to_r)


def scalar_test_system(rate: float = 1.0, power: int = 1, eps_power: int = 1) -> StandardFormSystem:
    """``x' = rate * eps**eps_power * x**power`` with period 2*pi."""

    def rhs(t, x, eps):
        return (rate * eps**eps_power * x[0] ** power,)

    return StandardFormSystem(rhs, 1, TWO_PI, name=f"scalar(eps^{eps_power} x^{power})")


# -- eps-Taylor coefficients ---------------------------------------------------


class TaylorBundle:
    """Eps-coefficients ``F_i`` of a standard-form field and their state derivatives.

    Produced by :func:`eps_taylor_coeffs` from a single jet evaluation in
    the variables (eps, x_1, ..., x_n).
    """

    def __init__(self, jets: Sequence[Jet], eps_order: int, state_order: int, dim: int):
        self.jets = list(jets)
        self.eps_order = eps_order
        self.state_order = state_order
        self.dim = dim

    def _eps_slice(self, i: int) -> list[Jet]:
        if i > self.eps_order:
            raise ValueError(f"eps order {i} was not expanded")
        return [j.coefficient_in(0, i) for j in self.jets]

    def F(self, i: int) -> np.ndarray:
        """``F_i(t, z)``, shape ``(n, *batch)``."""
        return np.array([j.value for j in self._eps_slice(i)])

    def tensor(self, i: int, l: int) -> np.ndarray:
        """``d^l F_i / dx^l (t, z)``, shape ``(n,) + (n,)*l + batch``."""
        if l > self.state_order:
            raise ValueError(f"state order {l} was not expanded")
        comps = self._eps_slice(i)
        vars_ = list(range(self.dim))
        return np.array([extract_tensor(c, vars_, l) for c in comps])

    def state_jets(self, i: int, spec: JetSpec) -> list[Jet]:
        """``F_i(t, z + s)`` as jets in the offsets ``s`` (converted to ``spec``)."""
        out = []
        for j in self.jets:
            c = j.coefficient_in(0, i)
            out.append(c.convert(spec) if c.spec != spec else c)
        return out


def eps_taylor_coeffs(
    s: StandardFormSystem,
    t,
    z,
    eps_order: int = 5,
    state_order: int = 4,
    total_order: int | None = None,
    check_domain: bool = True,
) -> TaylorBundle:
    """Expand the field of ``s`` at ``(t, z)`` jointly in eps and the state.

    ``total_order`` caps the joint degree (default ``eps_order + state_order``).
    ``t`` may be an array; the bundle then carries the same batch shape.
    """
    if check_domain:
        z = s.check_domain(z)
    else:
        z = np.asarray(z, dtype=float)
    if total_order is None:
        total_order = eps_order + state_order
    n = s.dim
    spec = JetSpec(
        n + 1,
        (eps_order,) + (min(state_order, total_order),) * n,
        max(total_order, eps_order),
    )
    t = np.asarray(t, dtype=float)
    eps = Jet.variable(spec, 0)
    x = [Jet.variable(spec, k + 1, np.full(t.shape, z[k])) for k in range(n)]
    out = s.rhs(t, x, eps)
    jets = []
    for comp in out:
        if not isinstance(comp, Jet):
            comp = Jet.constant(spec, np.broadcast_to(comp, t.shape) * 1.0)
        elif comp.batch_shape != t.shape:
            comp = comp + np.zeros(t.shape)
        jets.append(comp)
    return TaylorBundle(jets, eps_order, state_order, n)
