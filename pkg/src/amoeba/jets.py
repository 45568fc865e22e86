"""Forward-mode jets: multivariate Taylor scalars up to third order.

A :class:`Jet` carries the value and the symmetric derivative tensors of a
scalar quantity with respect to n seed variables.  Pushing seeded jets
through any code written with plain arithmetic (+, -, *, /, sin, cos)
yields exact derivatives to the carried order, which is how iterated Lie
brackets of the control fields are evaluated without finite differences
or symbolic algebra.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

__all__ = ["Jet", "jsin", "jcos", "taylor_of", "TaylorData", "bracket_data"]


def _sym3(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    # symmetrization of m (rank 2) with v (rank 1) over the three slots
    return (m[:, :, None] * v[None, None, :]
            + m[:, None, :] * v[None, :, None]
            + m[None, :, :] * v[:, None, None])


def _cube(v: np.ndarray) -> np.ndarray:
    return v[:, None, None] * v[None, :, None] * v[None, None, :]


class Jet:
    """Scalar with derivative tensors up to ``order`` in ``n`` variables."""

    __slots__ = ("n", "order", "ts")

    def __init__(self, n: int, order: int, ts: list):
        self.n = n
        self.order = order
        self.ts = ts

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, x: float, n: int, order: int) -> "Jet":
        ts = [float(x)] + [np.zeros((n,) * k) for k in range(1, order + 1)]
        return cls(n, order, ts)

    @classmethod
    def seeds(cls, values: Sequence[float], order: int) -> list:
        n = len(values)
        out = []
        for i, v in enumerate(values):
            j = cls.constant(float(v), n, order)
            if order >= 1:
                g = np.zeros(n)
                g[i] = 1.0
                j.ts[1] = g
            out.append(j)
        return out

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(float(other), self.n, self.order)

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return Jet(self.n, self.order, [a + b for a, b in zip(self.ts, o.ts)])

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n, self.order, [-a for a in self.ts])

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet(self.n, self.order, [a - b for a, b in zip(self.ts, o.ts)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        a, b = self.ts, o.ts
        ts = [a[0] * b[0]]
        if self.order >= 1:
            ts.append(a[1] * b[0] + a[0] * b[1])
        if self.order >= 2:
            ts.append(a[2] * b[0] + a[0] * b[2]
                      + np.outer(a[1], b[1]) + np.outer(b[1], a[1]))
        if self.order >= 3:
            ts.append(a[3] * b[0] + a[0] * b[3]
                      + _sym3(a[2], b[1]) + _sym3(b[2], a[1]))
        return Jet(self.n, self.order, ts)

    __rmul__ = __mul__

    def _recip(self):
        a = self.ts
        i0 = 1.0 / a[0]
        ts = [i0]
        if self.order >= 1:
            ts.append(-a[1] * i0 * i0)
        if self.order >= 2:
            ts.append(-a[2] * i0 * i0 + 2.0 * np.outer(a[1], a[1]) * i0 ** 3)
        if self.order >= 3:
            ts.append(-a[3] * i0 * i0 + 2.0 * i0 ** 3 * _sym3(a[2], a[1])
                      - 6.0 * i0 ** 4 * _cube(a[1]))
        return Jet(self.n, self.order, ts)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o._recip()

    def __rtruediv__(self, other):
        return self._recip() * other

    def __pow__(self, p: int):
        if not isinstance(p, int) or p < 1:
            raise ValueError("jets support positive integer powers only")
        out = self
        for _ in range(p - 1):
            out = out * self
        return out

    @property
    def value(self) -> float:
        return self.ts[0]

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.ts[0]!r})"


def jsin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    a = x.ts
    s, c = math.sin(a[0]), math.cos(a[0])
    ts = [s]
    if x.order >= 1:
        ts.append(c * a[1])
    if x.order >= 2:
        ts.append(c * a[2] - s * np.outer(a[1], a[1]))
    if x.order >= 3:
        ts.append(c * a[3] - s * _sym3(a[2], a[1]) - c * _cube(a[1]))
    return Jet(x.n, x.order, ts)


def jcos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    a = x.ts
    s, c = math.sin(a[0]), math.cos(a[0])
    ts = [c]
    if x.order >= 1:
        ts.append(-s * a[1])
    if x.order >= 2:
        ts.append(-s * a[2] - c * np.outer(a[1], a[1]))
    if x.order >= 3:
        ts.append(-s * a[3] - c * _sym3(a[2], a[1]) + s * _cube(a[1]))
    return Jet(x.n, x.order, ts)


@dataclasses.dataclass(frozen=True)
class TaylorData:
    """Stacked Taylor tensors of a vector field at one point.

    ``tensors[p]`` has shape (m, n, ..., n) with p trailing n-axes; entry
    [i, j1..jp] is the p-th partial derivative of component i.
    """

    tensors: tuple
    n: int

    @property
    def order(self) -> int:
        return len(self.tensors) - 1

    @property
    def value(self) -> np.ndarray:
        return self.tensors[0]


def taylor_of(fn: Callable, x: np.ndarray, order: int) -> TaylorData:
    """Taylor data of ``fn`` (generic-scalar evaluator) at ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    outs = fn(Jet.seeds(x.tolist(), order))
    tensors = []
    for p in range(order + 1):
        shape = (len(outs),) + (n,) * p
        t = np.zeros(shape)
        for i, y in enumerate(outs):
            if isinstance(y, Jet):
                t[i] = y.ts[p]
            elif p == 0:
                t[i] = float(y)
        tensors.append(t)
    return TaylorData(tensors=tuple(tensors), n=n)


def bracket_data(f: TaylorData, g: TaylorData) -> TaylorData:
    """Taylor data of the commutator [f, g] = Jf g - Jg f.

    Each bracketing consumes one derivative order; the result carries
    min(order_f, order_g) - 1 orders.
    """
    r = min(f.order, g.order) - 1
    if r < 0:
        raise ValueError("operand Taylor data carries no derivatives")
    F, G = f.tensors, g.tensors
    out = [F[1] @ G[0] - G[1] @ F[0]]
    if r >= 1:
        out.append(np.einsum("ijm,j->im", F[2], G[0]) + F[1] @ G[1]
                   - np.einsum("ijm,j->im", G[2], F[0]) - G[1] @ F[1])
    if r >= 2:
        h2 = (np.einsum("ijmp,j->imp", F[3], G[0])
              + np.einsum("ijm,jp->imp", F[2], G[1])
              + np.einsum("ijp,jm->imp", F[2], G[1])
              + np.einsum("ij,jmp->imp", F[1], G[2]))
        h2 -= (np.einsum("ijmp,j->imp", G[3], F[0])
               + np.einsum("ijm,jp->imp", G[2], F[1])
               + np.einsum("ijp,jm->imp", G[2], F[1])
               + np.einsum("ij,jmp->imp", G[1], F[2]))
        out.append(h2)
    return TaylorData(tensors=tuple(out[: r + 1]), n=f.n)
