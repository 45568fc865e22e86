"""Generalized internal forces of prescribed shape-changes and their inverse.

The reduced Lagrangian 0.5 cdot^T K(c) cdot turns the force computation
into a geodesic-type identity

    F = K(c) cddot + Gamma(c)[cdot, cdot, .],

with Gamma the Christoffel symbol of the shape metric K.  The inverse map
integrates cddot = K^{-1} (F - Gamma[cdot, cdot, .]) and is monitored
against the a-priori energy bound that guarantees global existence.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from . import matrices
from .errors import NonFiniteState, SingularK
from .matrices import assemble, coercivity_constant, d_k_dc, reduced_k
from .shape import PhysicalConstants, ShapeCoefficients, ShapeVelocity

__all__ = [
    "GeneralizedForce",
    "christoffel",
    "force_from_shape",
    "lagrangian_reduced",
    "shape_from_force",
    "force_first_form",
    "cost_functional",
    "dual_t_norm",
]


@dataclasses.dataclass(frozen=True)
class GeneralizedForce:
    """Force components along the (a_1, b_1, ..., a_N, b_N) shape axes."""

    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=float).reshape(-1).copy()
        if not np.isfinite(arr).all():
            raise ValueError("force components must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)


def christoffel(c: ShapeCoefficients, k: PhysicalConstants) -> np.ndarray:
    """First-kind Christoffel tensor of K; symmetric in its first two slots.

    Gamma[i, j, m] = (dK_jm/dc_i + dK_im/dc_j - dK_ij/dc_m) / 2.
    """
    t = d_k_dc(c, k)
    return 0.5 * (t + t.transpose(1, 0, 2) - t.transpose(1, 2, 0))


def _gamma_quadratic(c: ShapeCoefficients, cdot: np.ndarray,
                     k: PhysicalConstants) -> np.ndarray:
    # Gamma[cdot, cdot, .] without forming the symmetrized tensor
    t = d_k_dc(c, k)
    along = np.einsum("d,dim,i->m", cdot, t, cdot)
    grad = 0.5 * np.einsum("mij,i,j->m", t, cdot, cdot)
    return along - grad


def force_from_shape(c: ShapeCoefficients, cdot: ShapeVelocity,
                     cddot: ShapeVelocity, k: PhysicalConstants) -> GeneralizedForce:
    """Internal force producing the instantaneous (c, cdot, cddot)."""
    kk = reduced_k(assemble(c, k)).k_mat
    f = kk @ cddot.reals + _gamma_quadratic(c, cdot.reals, k)
    return GeneralizedForce(components=f)


def lagrangian_reduced(c: ShapeCoefficients, cdot: ShapeVelocity,
                       k: PhysicalConstants) -> float:
    """Reduced kinetic energy 0.5 cdot^T K(c) cdot (>= 0)."""
    kk = reduced_k(assemble(c, k)).k_mat
    v = cdot.reals
    return 0.5 * float(v @ kk @ v)


def dual_t_norm(f: np.ndarray) -> float:
    """Norm of a force vector dual to the weighted-l2 shape norm."""
    f = np.asarray(f, dtype=float)
    n = f.size // 2
    w = 1.0 / np.arange(1, n + 1, dtype=float)
    return float(np.sqrt(np.sum(w * (f[0::2] ** 2 + f[1::2] ** 2))))


def _t_norm_sq(v: np.ndarray) -> float:
    n = v.size // 2
    w = np.arange(1, n + 1, dtype=float)
    return float(np.sum(w * (v[0::2] ** 2 + v[1::2] ** 2)))


def shape_from_force(force_curve: Callable[[float], np.ndarray],
                     c0: ShapeCoefficients, cdot0: ShapeVelocity,
                     t_span: Sequence[float], dt: float, k: PhysicalConstants,
                     monitor_bound: bool = True
                     ) -> list[tuple[float, ShapeCoefficients, ShapeVelocity]]:
    """Integrate shape-changes from a prescribed internal-force history.

    ``force_curve(t)`` returns the 2N force components.  RK4 on the
    second-order system; when ``monitor_bound`` is set, the a-priori
    energy estimate on ||cdot||_T (with the module's coercivity constant)
    is checked at every step and a violation raises an integration fault.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = c0.n_modes
    nu = coercivity_constant(n, k)

    def fvec(t):
        f = force_curve(t)
        if isinstance(f, GeneralizedForce):
            f = f.components
        return np.asarray(f, dtype=float)

    def rhs(t, y):
        c = ShapeCoefficients.from_reals(y[:2 * n])
        v = y[2 * n:]
        kk = reduced_k(assemble(c, k)).k_mat
        try:
            acc = np.linalg.solve(kk, fvec(t) - _gamma_quadratic(c, v, k))
        except np.linalg.LinAlgError as exc:
            raise SingularK("reduced metric numerically singular") from exc
        return np.concatenate([v, acc])

    y = np.concatenate([c0.reals, cdot0.reals])
    e0 = lagrangian_reduced(c0, cdot0, k)
    fint = 0.0
    fprev = dual_t_norm(fvec(t0))
    out = [(t0, c0, cdot0)]
    n_steps = max(1, int(math.ceil((t1 - t0) / dt - 1e-12)))
    t = t0
    for _ in range(n_steps):
        h = min(dt, t1 - t)
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t + h
        if not np.isfinite(y).all():
            raise NonFiniteState(f"shape state became non-finite at t = {t:.6g}")
        fnow = dual_t_norm(fvec(t))
        fint += 0.5 * h * (fprev + fnow)
        fprev = fnow
        if monitor_bound:
            bound = (2.0 / nu) * e0 + (1.0 / nu) * (
                math.sqrt(max(e0, 0.0)) + 0.5 * fint / math.sqrt(nu)) ** 2
            if _t_norm_sq(y[2 * n:]) > bound * (1.0 + 1e-9) + 1e-12:
                raise NonFiniteState(
                    f"a-priori energy bound violated at t = {t:.6g}; "
                    "integration fault")
        out.append((t, ShapeCoefficients.from_reals(y[:2 * n]),
                    ShapeVelocity.from_reals(y[2 * n:])))
    return out


def force_first_form(shape_curve, t: float, k: PhysicalConstants,
                     fd_step: float = 1e-5) -> np.ndarray:
    """Independent force oracle: time-difference of the momentum K(c) cdot
    minus the shape gradient of the reduced energy.

    ``shape_curve`` must expose sample(t) -> (c, cdot).  Used by the test
    suite to cross-check :func:`force_from_shape`; not a production path.
    """
    def momentum(tt):
        c, cdot = shape_curve.sample(tt)
        kk = reduced_k(assemble(c, k)).k_mat
        return kk @ cdot.reals

    c, cdot = shape_curve.sample(t)
    v = cdot.reals
    dmom = (momentum(t + fd_step) - momentum(t - fd_step)) / (2.0 * fd_step)
    t3 = matrices.d_k_dc(c, k)
    grad = 0.5 * np.einsum("mij,i,j->m", t3, v, v)
    return dmom - grad


def cost_functional(times: np.ndarray, force_rows: np.ndarray) -> float:
    """Diagnostic effort integral of a force history (dual-norm squared)."""
    times = np.asarray(times, dtype=float)
    vals = np.array([dual_t_norm(row) ** 2 for row in np.asarray(force_rows, dtype=float)])
    return float(np.trapezoid(vals, times))
