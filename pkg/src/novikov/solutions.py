"""Closed-form and reduction-defined solutions with exact jets.

Catalog kinds (parameters in parentheses):

    Constant(a)                 u = a
    ExpX(a)                     u = a e^x
    ExpHalfNeg(a)               u = a e^{-x/2}
    ExpOverPower(a, alpha)      u = a e^x / t^{alpha+1}      (alpha = 0: e^x/t)
    TravellingExp(a, c)         u = a e^{x - ct}
    SqrtDecay(a, b, sign)       u = sign sqrt(a e^{-x} + b)
    SqrtGrow(a, b, sign)        u = sign sqrt(a e^{2x} + b)
    TimesExpX(f)                u = f(t) e^x
    TravellingImplicit(c, C1, theta0)
                                u = theta(x - ct), theta' = (2 theta^2 + c theta - C1)/(2 theta + c),
                                theta(0) = theta0

Every kind round-trips through ``to_dict``/``from_dict``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .jets import Jet3, eq_residual


class DomainError(ValueError):
    pass


_REGISTRY: dict[str, type] = {}


def _register(cls):
    _REGISTRY[cls.kind] = cls
    return cls


@dataclass(frozen=True)
class Solution:
    kind: ClassVar[str] = ""
    # sampling window (t0, t1), (x0, x1) inside the domain of validity
    window: ClassVar[tuple[tuple[float, float], tuple[float, float]]] = ((0.0, 1.0), (-2.0, 2.0))

    def jet(self, t, x) -> Jet3:
        raise NotImplementedError

    def __call__(self, t, x) -> Jet3:
        return self.jet(t, x)

    def u(self, t, x):
        return self.jet(t, x).u

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        d.update({k: v for k, v in self.__dict__.items()})
        return d

    def sample_window(self):
        return self.window


def _bcast(t, x):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.broadcast_arrays(t, x)


def _x_only(t, x, u, ux, uxx, uxxx):
    z = np.zeros_like(u)
    return Jet3(t, x, u, ux, uxx, uxxx, z, z, z)


@_register
@dataclass(frozen=True)
class Constant(Solution):
    kind: ClassVar[str] = "Constant"
    a: float = 1.0

    def jet(self, t, x):
        t, x = _bcast(t, x)
        u = np.full(x.shape, float(self.a))
        z = np.zeros_like(u)
        return _x_only(t, x, u, z, z, z)


@_register
@dataclass(frozen=True)
class ExpX(Solution):
    kind: ClassVar[str] = "ExpX"
    a: float = 1.0

    def jet(self, t, x):
        t, x = _bcast(t, x)
        u = self.a * np.exp(x)
        return _x_only(t, x, u, u, u, u)


@_register
@dataclass(frozen=True)
class ExpHalfNeg(Solution):
    kind: ClassVar[str] = "ExpHalfNeg"
    window: ClassVar = ((0.0, 1.0), (-3.0, 3.0))
    a: float = 1.0

    def jet(self, t, x):
        t, x = _bcast(t, x)
        u = self.a * np.exp(-x / 2)
        return _x_only(t, x, u, -u / 2, u / 4, -u / 8)


@_register
@dataclass(frozen=True)
class ExpOverPower(Solution):
    kind: ClassVar[str] = "ExpOverPower"
    window: ClassVar = ((0.5, 2.0), (-1.0, 1.0))
    a: float = 1.0
    alpha: float = 0.0

    def jet(self, t, x):
        t, x = _bcast(t, x)
        p = self.alpha + 1.0
        if np.any(t == 0) or (p != int(p) and np.any(t < 0)):
            raise DomainError("ExpOverPower needs t != 0 (t > 0 for non-integer powers)")
        u = self.a * np.exp(x) * t ** (-p)
        ut = -p * u / t
        return Jet3(t, x, u, u, u, u, ut, ut, ut)


@_register
@dataclass(frozen=True)
class TravellingExp(Solution):
    kind: ClassVar[str] = "TravellingExp"
    a: float = 1.0
    c: float = 1.0

    def jet(self, t, x):
        t, x = _bcast(t, x)
        u = self.a * np.exp(x - self.c * t)
        ut = -self.c * u
        return Jet3(t, x, u, u, u, u, ut, ut, ut)


def _sqrt_jet(t, x, sign, P, P1, P2, P3):
    if np.any(P <= 0):
        raise DomainError("negative radicand")
    u = sign * np.sqrt(P)
    # differentiate u^2 = P three times
    u1 = P1 / (2 * u)
    u2 = (P2 / 2 - u1**2) / u
    u3 = (P3 / 2 - 3 * u1 * u2) / u
    return _x_only(t, x, u, u1, u2, u3)


def _check_sign(sign):
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


@_register
@dataclass(frozen=True)
class SqrtDecay(Solution):
    kind: ClassVar[str] = "SqrtDecay"
    window: ClassVar = ((0.0, 1.0), (-2.0, 4.0))
    a: float = 2.0
    b: float = 1.0
    sign: int = 1

    def __post_init__(self):
        _check_sign(self.sign)

    def jet(self, t, x):
        t, x = _bcast(t, x)
        e = self.a * np.exp(-x)
        return _sqrt_jet(t, x, self.sign, e + self.b, -e, e, -e)


@_register
@dataclass(frozen=True)
class SqrtGrow(Solution):
    kind: ClassVar[str] = "SqrtGrow"
    a: float = 1.0
    b: float = 2.0
    sign: int = 1

    def __post_init__(self):
        _check_sign(self.sign)

    def jet(self, t, x):
        t, x = _bcast(t, x)
        e = self.a * np.exp(2 * x)
        return _sqrt_jet(t, x, self.sign, e + self.b, 2 * e, 4 * e, 8 * e)


# ---------------------------------------------------------------------------
# f(t) e^x


_TIME_FAMILIES = {
    # name: (f, f', required params)
    "const": (lambda t, c0: c0 + 0 * t, lambda t, c0: 0 * t, ("c0",)),
    "exp": (lambda t, a, k: a * np.exp(k * t), lambda t, a, k: a * k * np.exp(k * t), ("a", "k")),
    "power": (lambda t, c1, alpha: c1 * t ** (-(alpha + 1)),
              lambda t, c1, alpha: -(alpha + 1) * c1 * t ** (-(alpha + 2)), ("c1", "alpha")),
    "sin": (lambda t, A, B, w: A * np.sin(w * t) + B,
            lambda t, A, B, w: A * w * np.cos(w * t), ("A", "B", "w")),
}


@dataclass(frozen=True)
class TimeFunction:
    """A smooth f(t) together with f'(t).

    Either a named family (serializable) or a raw callable pair.  The pair is
    checked against a central difference at construction.
    """

    family: str = "const"
    params: dict = field(default_factory=lambda: {"c0": 1.0})
    f_fn: Callable | None = None
    fprime_fn: Callable | None = None
    check_points: tuple = (0.7, 1.1, 1.9)

    def __post_init__(self):
        if self.f_fn is None:
            if self.family not in _TIME_FAMILIES:
                raise ValueError(f"unknown time family {self.family!r}")
            need = _TIME_FAMILIES[self.family][2]
            if set(self.params) != set(need):
                raise ValueError(f"family {self.family!r} needs parameters {need}")
        h = 1e-5
        for t in self.check_points:
            fd = (self.f(t + h) - self.f(t - h)) / (2 * h)
            if not abs(fd - self.fprime(t)) <= 1e-6 * max(1.0, abs(fd)):
                raise ValueError(f"f' inconsistent with f at t={t}: {self.fprime(t)} vs {fd}")

    def f(self, t):
        if self.f_fn is not None:
            return self.f_fn(t)
        return _TIME_FAMILIES[self.family][0](np.asarray(t, dtype=float), **self.params)

    def fprime(self, t):
        if self.fprime_fn is not None:
            return self.fprime_fn(t)
        return _TIME_FAMILIES[self.family][1](np.asarray(t, dtype=float), **self.params)

    def to_dict(self) -> dict:
        if self.f_fn is not None:
            raise TypeError("callable time functions are not serializable")
        return {"family": self.family, "params": dict(self.params)}


@_register
@dataclass(frozen=True)
class TimesExpX(Solution):
    kind: ClassVar[str] = "TimesExpX"
    window: ClassVar = ((0.5, 2.0), (-2.0, 2.0))
    f: TimeFunction = field(default_factory=lambda: TimeFunction("sin", {"A": 1.0, "B": 2.0, "w": 1.0}))

    def jet(self, t, x):
        t, x = _bcast(t, x)
        ex = np.exp(x)
        u = self.f.f(t) * ex
        ut = self.f.fprime(t) * ex
        return Jet3(t, x, u, u, u, u, ut, ut, ut)

    def to_dict(self):
        return {"kind": self.kind, "f": self.f.to_dict()}


# ---------------------------------------------------------------------------
# travelling waves with C2 = 0


def _travel_R(theta, c, C1):
    """theta' = R(theta) and its first two theta-derivatives."""
    P = 2 * theta**2 + c * theta - C1
    D = 2 * theta + c
    P1 = 4 * theta + c
    R = P / D
    R1 = P1 / D - 2 * P / D**2
    R2 = 4 / D - 4 * P1 / D**2 + 8 * P / D**3
    return R, R1, R2


def artanh_real(v):
    """Real part of artanh: 1/2 ln|(1+v)/(1-v)|; differs from artanh by i*pi/2 for |v| > 1."""
    v = np.asarray(v, dtype=float)
    return 0.5 * np.log(np.abs((1 + v) / (1 - v)))


def implicit_relation(c: float, C1: float, theta, z):
    """z - ln(2 theta^2 + c theta - C1)/2 + (c/Delta) artanh((c + 4 theta)/Delta), Delta^2 = c^2 + 8 C1.

    For C2 = 0 travelling waves this is constant along the solution.
    """
    disc = c * c + 8 * C1
    if disc <= 0:
        raise DomainError("need c^2 + 8 C1 > 0")
    delta = math.sqrt(disc)
    P = 2 * np.asarray(theta) ** 2 + c * np.asarray(theta) - C1
    if np.any(P <= 0):
        raise DomainError("need 2 theta^2 + c theta - C1 > 0 on the branch")
    return z - 0.5 * np.log(P) + (c / delta) * artanh_real((c + 4 * np.asarray(theta)) / delta)


@_register
@dataclass(frozen=True)
class TravellingImplicit(Solution):
    kind: ClassVar[str] = "TravellingImplicit"
    c: float = 1.0
    C1: float = 1.0
    theta0: float = 2.0

    def __post_init__(self):
        disc = self.c**2 + 8 * self.C1
        if disc <= 0:
            raise DomainError("need c^2 + 8 C1 > 0")
        if 2 * self.theta0 + self.c <= 0:
            raise DomainError("branch requires 2 theta0 + c > 0")
        lower = self._lower_root()
        if self.theta0 <= lower:
            raise DomainError("theta0 must lie above the upper root of 2t^2 + ct - C1")

    def _lower_root(self) -> float:
        return (-self.c + math.sqrt(self.c**2 + 8 * self.C1)) / 4

    @property
    def constant(self) -> float:
        """C with implicit_relation(theta(z), z) + C = 0."""
        return -float(implicit_relation(self.c, self.C1, self.theta0, 0.0))

    def theta(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty_like(z)
        lo = self._lower_root()
        C = self.constant
        for k, zk in enumerate(z.ravel()):
            def phi(th):
                return implicit_relation(self.c, self.C1, th, zk) + C
            a = lo + 1e-14 * max(1.0, abs(lo)) + 1e-300
            b = max(self.theta0, lo + 1.0)
            while phi(b) > 0:
                b *= 2.0
            # phi decreases in theta on the branch
            if phi(a) < 0:
                raise DomainError(f"z={zk} too far into the left tail of the branch")
            out.ravel()[k] = brentq(phi, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return out

    def jet(self, t, x):
        t, x = _bcast(t, x)
        z = x - self.c * t
        th = self.theta(z.ravel()).reshape(z.shape)
        R, R1, R2 = _travel_R(th, self.c, self.C1)
        th1 = R
        th2 = R1 * R
        th3 = R2 * R**2 + R1**2 * R
        c = self.c
        return Jet3(t, x, th, th1, th2, th3, -c * th1, -c * th2, -c * th3)


def from_dict(d: dict) -> Solution:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _REGISTRY:
        raise ValueError(f"unknown solution kind {kind!r}")
    cls = _REGISTRY[kind]
    if cls is TimesExpX:
        fd = d.pop("f", {"family": "const", "params": {"c0": 1.0}})
        if d:
            raise ValueError(f"unexpected keys {sorted(d)}")
        return TimesExpX(TimeFunction(fd["family"], dict(fd["params"])))
    allowed = set(cls.__dataclass_fields__)
    extra = set(d) - allowed
    if extra:
        raise ValueError(f"unexpected keys {sorted(extra)} for {kind}")
    return cls(**d)


def catalog_to_json(specs) -> str:
    return json.dumps([s.to_dict() for s in specs], indent=2)


def catalog_from_json(text: str) -> list[Solution]:
    return [from_dict(d) for d in json.loads(text)]


def default_catalog() -> list[Solution]:
    """One or more members of every family, both signs of the square-root kinds."""
    return [
        Constant(3.0),
        ExpX(1.5),
        ExpHalfNeg(5.0),
        ExpOverPower(1.0, 1.0),
        ExpOverPower(1.0, 0.0),
        TravellingExp(1.0, 2.0),
        SqrtDecay(2.0, 1.0, 1),
        SqrtDecay(2.0, 1.0, -1),
        SqrtGrow(1.0, 2.0, 1),
        SqrtGrow(1.0, 2.0, -1),
        TimesExpX(),
        TimesExpX(TimeFunction("power", {"c1": 1.0, "alpha": 1.0})),
        TravellingImplicit(1.0, 1.0, 2.0),
    ]


# ---------------------------------------------------------------------------
# residual verification


@dataclass
class ResidualReport:
    label: str
    max_abs_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_residual <= self.tol)

    def as_dict(self) -> dict:
        return {"solution": self.label, "max_abs_residual": self.max_abs_residual,
                "tol": self.tol, "pass": self.passed}


def sample_grid(spec: Solution, n_x: int = 201, n_t: int = 5):
    (t0, t1), (x0, x1) = spec.sample_window()
    t = np.linspace(t0, t1, n_t)
    x = np.linspace(x0, x1, n_x)
    return np.meshgrid(t, x, indexing="ij")


def verify_residual(spec: Solution, grid=None, tol: float = 1e-10) -> ResidualReport:
    T, X = sample_grid(spec) if grid is None else grid
    r = eq_residual(spec.jet(T, X))
    try:
        label = json.dumps(spec.to_dict(), sort_keys=True)
    except TypeError:
        label = repr(spec)
    return ResidualReport(label, float(np.max(np.abs(r))), tol)


def invariance_defect(spec: Solution, gen, grid=None) -> float:
    """max |eta - tau u_t - xi u_x| on the sample grid."""
    T, X = sample_grid(spec) if grid is None else grid
    j = spec.jet(T, X)
    d = gen.eta(j.u) - gen.tau(T) * j.ut - gen.xi() * j.ux
    return float(np.max(np.abs(d)))


# ---------------------------------------------------------------------------
# reductions


def scaling_reduction_residual(alpha: float, theta, z) -> float:
    """Left side of the third-order ODE for u = e^{-x/alpha} theta(t e^{-x/alpha}).

    ``theta`` is the tuple (theta, theta', theta'', theta''').
    """
    th, t1, t2, t3 = theta
    a = alpha
    return ((a**3 - 4 * a) * t1 - 5 * a * z * t2 - a * z**2 * t3
            + (4 * a**2 - 4 * a - 8) * th**2 + (-2 * a - 18) * z**2 * t1**2
            + (4 * a**2 - 10 * a - 38) * z * th * t1 + (-2 * a - 18) * z**2 * th * t2
            - 6 * z**3 * t1 * t2 - 2 * z**3 * th * t3)


def _scaling_third(alpha, z, th, t1, t2):
    lead = -alpha * z**2 - 2 * z**3 * th
    if abs(lead) < 1e-14:
        raise DomainError("scaling reduction is singular here")
    rest = scaling_reduction_residual(alpha, (th, t1, t2, 0.0), z)
    return -rest / lead


def rk4_integrate(f, y0, z0: float, z1: float, dz: float, stop=None):
    """Fixed-step RK4 for y' = f(z, y); returns (z, Y, stopped_at or None)."""
    n = max(1, int(round(abs(z1 - z0) / dz)))
    h = (z1 - z0) / n
    zs = [z0]
    ys = [np.asarray(y0, dtype=float)]
    y = ys[0]
    z = z0
    for _ in range(n):
        k1 = f(z, y)
        k2 = f(z + h / 2, y + h / 2 * k1)
        k3 = f(z + h / 2, y + h / 2 * k2)
        k4 = f(z + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        z = z + h
        zs.append(z)
        ys.append(y)
        if stop is not None and stop(z, y):
            return np.array(zs), np.array(ys), z
    return np.array(zs), np.array(ys), None


@dataclass
class Trajectory:
    z: np.ndarray
    y: np.ndarray                  # columns: theta, theta', ...
    singular_at: float | None = None

    @property
    def theta(self):
        return self.y[:, 0]

    @property
    def dtheta(self):
        return self.y[:, 1]


def scaling_reduction_integrate(alpha: float, init, z_span, dz: float = 1e-4) -> Trajectory:
    """RK4 for the scaling reduction; init = (theta, theta', theta'') at z_span[0]."""
    def f(z, y):
        return np.array([y[1], y[2], _scaling_third(alpha, z, *y)])
    z, y, _ = rk4_integrate(f, init, z_span[0], z_span[1], dz)
    return Trajectory(z, y)


def scaling_reconstruct(alpha: float, traj: Trajectory):
    """u(t, x) = e^{-x/alpha} theta(t e^{-x/alpha}) from a sampled trajectory."""
    if alpha == 0:
        raise ValueError("alpha = 0 uses the separate u = theta(x)/t reduction")
    z, th, th1 = traj.z, traj.theta, traj.dtheta
    if z[0] > z[-1]:
        z, th, th1 = z[::-1], th[::-1], th1[::-1]
    spline = CubicHermiteSpline(z, th, th1, extrapolate=False)

    def u(t, x):
        s = np.exp(-np.asarray(x) / alpha)
        vals = s * spline(np.asarray(t) * s)
        if np.any(np.isnan(vals)):
            raise DomainError("query outside the integrated z-range")
        return vals
    return u


def travelling_first_integral(c: float, C1: float, z, theta, dtheta):
    """e^z(-c theta + c theta' - 2 theta^2 + 2 theta theta' + C1); equals -C2 on solutions."""
    return np.exp(z) * (-c * theta + c * dtheta - 2 * theta**2 + 2 * theta * dtheta + C1)


def travelling_ode_integrate(c: float, C1: float, theta0: float, dtheta0: float,
                             z_span=(0.0, 1.0), dz: float = 1e-4,
                             singular_tol: float = 1e-6) -> Trajectory:
    """RK4 for the integrated travelling-wave ODE

        (c + 2 theta) theta'' = c theta + 2 theta^2 - 2 theta'^2 + 2 theta theta' - C1.

    Stops (recording ``singular_at``) when |c + 2 theta| < singular_tol or
    c + 2 theta changes sign within a step.
    """
    if abs(c + 2 * theta0) < singular_tol:
        raise DomainError("c + 2 theta vanishes at the starting point")
    side = math.copysign(1.0, c + 2 * theta0)

    def f(z, y):
        th, t1 = y
        return np.array([t1, (c * th + 2 * th**2 - 2 * t1**2 + 2 * th * t1 - C1) / (c + 2 * th)])

    def stop(z, y):
        d = c + 2 * y[0]
        return abs(d) < singular_tol or d * side < 0 or not np.all(np.isfinite(y))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        z, y, at = rk4_integrate(f, (theta0, dtheta0), z_span[0], z_span[1], dz, stop)
    return Trajectory(z, y, at)


@dataclass
class ImplicitTheta:
    z: float
    theta: float
    implicit_residual: float


def implicit_travelling_theta(c: float, C1: float, z: float, theta0: float,
                              dz: float = 1e-4) -> ImplicitTheta:
    """theta(z) for the C2 = 0 branch through theta(0) = theta0.

    Integrates theta' = (2 theta^2 + c theta - C1)/(2 theta + c) by RK4, then
    substitutes the result into the implicit relation (constant fixed at the
    anchor) and reports the mismatch.
    """
    if abs(2 * theta0 + c) < 1e-12:
        raise DomainError("singular denominator at the anchor")
    C = -float(implicit_relation(c, C1, theta0, 0.0))

    def f(_, y):
        return np.array([_travel_R(y[0], c, C1)[0]])
    if z == 0:
        th = theta0
    else:
        _, y, _ = rk4_integrate(f, (theta0,), 0.0, z, dz)
        th = float(y[-1, 0])
    res = float(implicit_relation(c, C1, th, z)) + C
    return ImplicitTheta(z, th, abs(res))
