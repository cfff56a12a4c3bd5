"""Three-dimensional point-symmetry algebra spanned by

    X1 = d/dx,   X2 = d/dt,   X3 = t d/dt - u d/du

with the single nonzero bracket [X2, X3] = X2.  Vectors are stored in this
ordered basis; a vector (a1, a2, a3) acts with tau = a2 + a3 t, xi = a1,
eta = -a3 u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .jets import Jet3


class UnsupportedGenerator(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraVec:
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(a) for a in self.coords):
            raise ValueError("non-finite algebra coordinates")

    @property
    def coords(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def __add__(self, other):
        return AlgebraVec(*(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return AlgebraVec(*(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, s: float):
        return AlgebraVec(*(s * a for a in self.coords))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def norm(self) -> float:
        return math.sqrt(sum(a * a for a in self.coords))

    def is_zero(self) -> bool:
        return self.norm() == 0.0

    # characteristic functions of the generator
    def tau(self, t):
        return self.a2 + self.a3 * np.asarray(t)

    def xi(self, t=None):
        return self.a1

    def eta(self, u):
        return -self.a3 * np.asarray(u)


X1 = AlgebraVec(1.0, 0.0, 0.0)
X2 = AlgebraVec(0.0, 1.0, 0.0)
X3 = AlgebraVec(0.0, 0.0, 1.0)
BASIS = (X1, X2, X3)
NAMES = ("X1", "X2", "X3")


def commutator(A: AlgebraVec, B: AlgebraVec) -> AlgebraVec:
    # [X2, X3] = X2 is the only nonzero structure relation
    return AlgebraVec(0.0, A.a2 * B.a3 - A.a3 * B.a2, 0.0)


def adjoint(i: int, eps: float, Y: AlgebraVec) -> AlgebraVec:
    """Ad(exp(eps X_i)) Y for a basis index i in {1, 2, 3}."""
    if i == 1:
        return Y
    if i == 2:
        return AlgebraVec(Y.a1, Y.a2 - eps * Y.a3, Y.a3)
    if i == 3:
        return AlgebraVec(Y.a1, math.exp(eps) * Y.a2, Y.a3)
    raise ValueError(f"basis index must be 1, 2 or 3, got {i!r}")


def adjoint_series(X: AlgebraVec, eps: float, Y: AlgebraVec, terms: int = 30) -> AlgebraVec:
    """sum_n (-eps)^n / n! ad_X^n Y, truncated."""
    total = Y
    term = Y
    for n in range(1, terms + 1):
        term = commutator(X, term) * (-eps / n)
        total = total + term
        if term.is_zero():
            break
    return total


def commutator_table() -> list[list[AlgebraVec]]:
    return [[commutator(A, B) for B in BASIS] for A in BASIS]


def adjoint_table() -> list[list[str]]:
    """Ad(exp(eps X_i)) X_j as text, read off ``adjoint`` at eps = 0 and 1.

    Each coordinate is either constant, linear in eps or proportional to
    e^eps; that is all this algebra produces.
    """
    return [[_render(i, j) for j in (1, 2, 3)] for i in (1, 2, 3)]


def _render(i: int, j: int) -> str:
    Y = BASIS[j - 1]
    e0, e1 = adjoint(i, 0.0, Y), adjoint(i, 1.0, Y)
    order = [j - 1] + [k for k in range(3) if k != j - 1]
    parts = []
    for k in order:
        c0, c1 = e0.coords[k], e1.coords[k]
        name = NAMES[k]
        if c0 == 0 and c1 == 0:
            continue
        if c0 == c1:
            parts.append(name if c0 == 1 else f"{c0:g}{name}")
        elif abs(c1 - math.e * c0) < 1e-12 and c0 != 0:
            parts.append(f"e^eps {name}" if c0 == 1 else f"{c0:g}e^eps {name}")
        else:
            slope = c1 - c0
            coeff = {1.0: "eps", -1.0: "-eps"}.get(slope, f"{slope:g}eps")
            parts.append(f"{coeff} {name}")
    text = " + ".join(parts).replace("+ -", "- ")
    return text or "0"


def format_tables() -> str:
    lines = ["[Xi,Xj]    " + "".join(f"{n:>8}" for n in NAMES)]
    for name, row in zip(NAMES, commutator_table()):
        lines.append(f"{name:<11}" + "".join(f"{_vec_text(v):>8}" for v in row))
    lines.append("")
    lines.append("Ad(exp(eps Xi)) Xj " + "".join(f"{n:>16}" for n in NAMES))
    for name, row in zip(NAMES, adjoint_table()):
        lines.append(f"{name:<19}" + "".join(f"{e:>16}" for e in row))
    return "\n".join(lines)


def _vec_text(v: AlgebraVec) -> str:
    parts = [f"{c:g}{n}" if c not in (1, -1) else ("" if c == 1 else "-") + n
             for c, n in zip(v.coords, NAMES) if c != 0]
    return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# optimal system


@dataclass(frozen=True)
class Representative:
    vec: AlgebraVec
    label: str
    steps: tuple[tuple[int, float], ...]
    scale: float

    def replay(self, Y: AlgebraVec) -> AlgebraVec:
        """Apply the recorded adjoint maps and scaling to ``Y``."""
        for i, eps in self.steps:
            Y = adjoint(i, eps, Y)
        return Y * self.scale


def optimal_representative(Y: AlgebraVec) -> Representative:
    if Y.is_zero():
        raise ValueError("zero vector has no one-dimensional subalgebra")
    a1, a2, a3 = Y.coords
    if a3 != 0:
        # Ad(exp(eps X2)) with eps = a2/a3 kills the X2 component
        return Representative(AlgebraVec(a1 / a3, 0.0, 1.0), "alpha*X1+X3",
                              ((2, a2 / a3),), 1.0 / a3)
    if a2 != 0:
        return Representative(AlgebraVec(a1 / a2, 1.0, 0.0), "c*X1+X2", (), 1.0 / a2)
    return Representative(AlgebraVec(1.0, 0.0, 0.0), "X1", (), 1.0 / a1)


# ---------------------------------------------------------------------------
# flows

Evaluator = Callable[..., Jet3]


@dataclass(frozen=True)
class GroupAction:
    generator: AlgebraVec
    epsilon: float

    def __post_init__(self):
        self.family  # validates

    @property
    def family(self) -> str:
        a1, a2, a3 = self.generator.coords
        if a3 == 1 and a2 == 0:
            return "alpha*X1+X3"
        if a3 == 0 and a2 == 1:
            return "c*X1+X2"
        if a3 == 0 and a2 == 0 and a1 != 0:
            return "X1"
        raise UnsupportedGenerator(
            f"{self.generator} is not of the form a*X1, alpha*X1+X3 or c*X1+X2; "
            "reduce it with optimal_representative first")


def flow_transform(act: GroupAction, sol: Evaluator) -> Evaluator:
    """Push a solution forward along the flow of ``act``.

    The result is again an evaluator ``(t, x) -> Jet3``.
    """
    fam = act.family
    eps = act.epsilon
    a1 = act.generator.a1

    if fam == "X1":
        def moved(t, x):
            j = sol(t, np.asarray(x) - a1 * eps)
            return _relabel(j, t, x)
    elif fam == "c*X1+X2":
        def moved(t, x):
            j = sol(np.asarray(t) - eps, np.asarray(x) - a1 * eps)
            return _relabel(j, t, x)
    else:
        lam = math.exp(-eps)

        def moved(t, x):
            j = sol(lam * np.asarray(t), np.asarray(x) - a1 * eps)
            # u~(t, x) = lam u(lam t, x - alpha eps): x-derivatives pick up lam,
            # each t-derivative one more factor of lam
            return Jet3(t, x, lam * j.u, lam * j.ux, lam * j.uxx, lam * j.uxxx,
                        lam**2 * j.ut, lam**2 * j.utx, lam**2 * j.utxx)
    return moved


def _relabel(j: Jet3, t, x) -> Jet3:
    return Jet3(t, x, j.u, j.ux, j.uxx, j.uxxx, j.ut, j.utx, j.utxx)
