"""Rigid-motion dynamics driven by prescribed shape-changes.

With zero initial impulse, the Euler-Lagrange equations collapse to the
first-order system

    d/dt (r, theta) = -Rot(theta) (M^r(c))^{-1} N(c) cdot,

so the trajectory is reconstructed by integrating the body-frame velocity
rotated into the lab frame.  The integrator is fixed-step classical RK4
with an optional step-halving guard; theta is kept unwrapped so winding
diagnostics stay meaningful.

The right-hand side depends on the state only through theta (the shape is
a prescribed function of time), which lets the default engine evaluate the
mass matrices for all stage times in vectorized batches and reduce both
integrations to cumulative sums; a scalar fallback handles providers that
cannot be sampled in batch.  Both engines implement the same stage
arithmetic and agree to rounding.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence, Union

import numpy as np

from . import matrices, shape
from .errors import NonFiniteState, OutOfDomain, StepTooLarge
from .shape import PhysicalConstants, ShapeCoefficients, ShapeVelocity

__all__ = [
    "RigidState",
    "SampleDiagnostics",
    "TrajectorySample",
    "Impulses",
    "rigid_velocity",
    "rigid_velocity_body",
    "integrate",
    "impulses",
    "flapping_bound",
    "as_provider",
]

_CHUNK = 8192


@dataclasses.dataclass(frozen=True)
class RigidState:
    """Lab-frame position of the center of mass and unwrapped orientation."""

    r: np.ndarray
    theta: float

    def __post_init__(self):
        arr = np.asarray(self.r, dtype=float).reshape(2).copy()
        if not (np.isfinite(arr).all() and np.isfinite(self.theta)):
            raise ValueError("rigid state entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "r", arr)
        object.__setattr__(self, "theta", float(self.theta))

    @classmethod
    def origin(cls) -> "RigidState":
        return cls(r=np.zeros(2), theta=0.0)

    @property
    def q(self) -> np.ndarray:
        return np.array([self.r[0], self.r[1], self.theta])


@dataclasses.dataclass(frozen=True)
class SampleDiagnostics:
    volume_drift: float
    constraint_f: float
    lagrangian: float


@dataclasses.dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: RigidState
    shape: ShapeCoefficients
    shape_velocity: ShapeVelocity
    diagnostics: SampleDiagnostics


@dataclasses.dataclass(frozen=True)
class Impulses:
    """Translational/angular impulses of the rigid motion (p, pi) and of the
    deformation (l, lambda); their sums vanish along any solution."""

    p: np.ndarray
    pi: float
    l: np.ndarray
    lam: float


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------------------
# Shape-curve providers
# ---------------------------------------------------------------------------

class _ConstantProvider:
    def __init__(self, c: ShapeCoefficients):
        self._c = c
        self._zero = ShapeVelocity.zeros(c.n_modes)

    def sample(self, t: float):
        return self._c, self._zero

    def sample_batch(self, ts: np.ndarray):
        reals = self._c.reals
        tile = np.tile(reals, (ts.size, 1))
        return tile, np.zeros_like(tile)


class _CallableProvider:
    """Wraps a plain c(t) callable; velocity by central differences."""

    def __init__(self, fn: Callable[[float], ShapeCoefficients], fd_step: float):
        self._fn = fn
        self._h = fd_step

    def sample(self, t: float):
        c = self._fn(t)
        h = self._h
        lo = self._fn(t - 0.5 * h)
        hi = self._fn(t + 0.5 * h)
        return c, ShapeVelocity((hi.coeffs - lo.coeffs) / h)


ShapeCurve = Union[ShapeCoefficients, Callable[[float], ShapeCoefficients], object]


def as_provider(shape_curve: ShapeCurve, dt: float = 1e-3):
    """Adapt the accepted curve kinds to the (c, cdot) sampling protocol."""
    if hasattr(shape_curve, "sample"):
        return shape_curve
    if isinstance(shape_curve, ShapeCoefficients):
        return _ConstantProvider(shape_curve)
    if callable(shape_curve):
        return _CallableProvider(shape_curve, fd_step=0.5 * dt)
    raise TypeError("shape_curve must expose sample(t), be constant, or be callable")


def _eval_curve(provider, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(provider, "sample_batch"):
        c_arr, cd_arr = provider.sample_batch(ts)
        return np.asarray(c_arr, dtype=float), np.asarray(cd_arr, dtype=float)
    cs, cds = [], []
    for t in ts:
        c, cd = provider.sample(float(t))
        cs.append(c.reals)
        cds.append(cd.reals)
    return np.array(cs), np.array(cds)


# ---------------------------------------------------------------------------
# Velocities and impulses
# ---------------------------------------------------------------------------

def rigid_velocity_body(c: ShapeCoefficients, cdot: ShapeVelocity,
                        k: PhysicalConstants) -> np.ndarray:
    """Body-frame velocity (rdot*_1, rdot*_2, omega) = -(M^r)^{-1} N cdot."""
    m_r, n_mat = matrices.rigid_system(c.reals, k)
    return -np.linalg.solve(m_r, n_mat @ cdot.reals)


def rigid_velocity(c: ShapeCoefficients, cdot: ShapeVelocity, theta: float,
                   k: PhysicalConstants) -> np.ndarray:
    """Lab-frame velocity (rdot_1, rdot_2, omega) at orientation theta."""
    v = rigid_velocity_body(c, cdot, k)
    out = np.empty(3)
    out[:2] = _rot(theta) @ v[:2]
    out[2] = v[2]
    return out


def impulses(c: ShapeCoefficients, cdot: ShapeVelocity, qdot_star: np.ndarray,
             k: PhysicalConstants) -> Impulses:
    """Impulse pairs (M^r qdot*, N cdot) for a body-frame velocity qdot*."""
    m_r, n_mat = matrices.rigid_system(c.reals, k)
    rigid = m_r @ np.asarray(qdot_star, dtype=float)
    deform = n_mat @ cdot.reals
    return Impulses(p=rigid[:2], pi=float(rigid[2]),
                    l=deform[:2], lam=float(deform[2]))


# ---------------------------------------------------------------------------
# Batched stage evaluation
# ---------------------------------------------------------------------------

def _bodies(c_arr: np.ndarray, cd_arr: np.ndarray, k: PhysicalConstants,
            want_diag: bool):
    """Body-frame velocities (and per-sample diagnostics) for stacked shapes."""
    t_total = c_arr.shape[0]
    body = np.empty((t_total, 3))
    lag = np.empty(t_total) if want_diag else None
    for lo in range(0, t_total, _CHUNK):
        hi = min(lo + _CHUNK, t_total)
        cb = c_arr[lo:hi]
        cdb = cd_arr[lo:hi]
        m_r, n_mat, phi = matrices.rigid_system_batch(cb, k)
        coupling = np.einsum("tij,tj->ti", n_mat, cdb)
        sol = np.linalg.solve(m_r, coupling[:, :, None])[:, :, 0]
        body[lo:hi] = -sol
        if want_diag:
            n = cb.shape[1] // 2
            s = matrices._struct(n)
            mix = np.einsum("ti,tipj->tpj", cdb, phi[:, 3:])
            quad = np.einsum("tpj,tpj,j->t", mix, mix, s["w"])
            md_quad = (np.pi * k.rho_f * quad
                       + np.pi * k.rho_0 * (cdb * cdb) @ np.repeat(s["inv_kp1"], 2))
            lag[lo:hi] = 0.5 * (md_quad - np.einsum("ti,ti->t", coupling, sol))
    return body, lag


def _grid(t0: float, t1: float, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n_steps = max(1, int(math.ceil((t1 - t0) / dt - 1e-12)))
    tfull = t0 + dt * np.arange(n_steps + 1)
    tfull[-1] = t1
    hs = np.diff(tfull)
    thalf = tfull[:-1] + 0.5 * hs
    return tfull, thalf, hs


def _run(provider, q0: np.ndarray, t0: float, t1: float, dt: float,
         k: PhysicalConstants, collect: bool, require_domain_D: bool,
         t_ref_norm: float, sample_stride: int):
    tfull, thalf, hs = _grid(t0, t1, dt)
    c_f, cd_f = _eval_curve(provider, tfull)
    c_h, cd_h = _eval_curve(provider, thalf)
    body_f, lag_f = _bodies(c_f, cd_f, k, collect)
    body_h, _ = _bodies(c_h, cd_h, k, False)

    w_f = body_f[:, 2]
    w_h = body_h[:, 2]
    dtheta = (hs / 6.0) * (w_f[:-1] + 4.0 * w_h + w_f[1:])
    theta = np.empty(tfull.size)
    theta[0] = q0[2]
    theta[1:] = q0[2] + np.cumsum(dtheta)

    def rotv(angles, v):
        ca, sa = np.cos(angles), np.sin(angles)
        return np.stack([ca * v[:, 0] - sa * v[:, 1],
                         ca * v[:, 1] + sa * v[:, 0]], axis=1)

    th = theta[:-1]
    k1 = rotv(th, body_f[:-1, :2])
    k2 = rotv(th + 0.5 * hs * w_f[:-1], body_h[:, :2])
    k3 = rotv(th + 0.5 * hs * w_h, body_h[:, :2])
    k4 = rotv(th + hs * w_h, body_f[1:, :2])
    dr = (hs / 6.0)[:, None] * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    r = np.empty((tfull.size, 2))
    r[0] = q0[:2]
    r[1:] = q0[:2] + np.cumsum(dr, axis=0)

    if not (np.isfinite(theta).all() and np.isfinite(r).all()):
        bad = int(np.argmax(~(np.isfinite(theta) & np.isfinite(r).all(axis=1))))
        raise NonFiniteState(f"state became non-finite at t = {tfull[bad]:.6g}")

    q_end = np.array([r[-1, 0], r[-1, 1], theta[-1]])
    samples: list[TrajectorySample] = []
    if collect:
        n = c_f.shape[1] // 2
        weights = np.repeat(np.arange(1, n + 1, dtype=float), 2)
        fw = np.repeat(1.0 / (np.arange(1, n + 1, dtype=float) + 1.0), 2)
        idx = list(range(0, tfull.size - 1, sample_stride)) + [tfull.size - 1]
        for i in idx:
            c = ShapeCoefficients.from_reals(c_f[i])
            cd = ShapeVelocity.from_reals(cd_f[i])
            if require_domain_D and not shape.in_domain_D(c):
                raise OutOfDomain(
                    f"shape left the embedding domain at t = {tfull[i]:.6g}")
            tnorm_sq = float(weights @ (c_f[i] * c_f[i]))
            resid = float(fw[0::2] @ (cd_f[i][1::2] * c_f[i][0::2]
                                      - cd_f[i][0::2] * c_f[i][1::2]))
            diag = SampleDiagnostics(
                volume_drift=float(np.pi * (t_ref_norm ** 2 - tnorm_sq)),
                constraint_f=resid,
                lagrangian=float(lag_f[i]))
            samples.append(TrajectorySample(
                t=float(tfull[i]), state=RigidState(r=r[i], theta=float(theta[i])),
                shape=c, shape_velocity=cd, diagnostics=diag))
    return q_end, samples


def integrate(shape_curve: ShapeCurve, q0: RigidState, t_span: Sequence[float],
              dt: float, k: PhysicalConstants, *, check_step: bool = True,
              step_guard: float = 1e-3, require_domain_D: bool = False,
              sample_stride: int = 1) -> list[TrajectorySample]:
    """Integrate the rigid trajectory over ``t_span`` with fixed-step RK4.

    Samples (with volume-drift, constraint and energy diagnostics) are
    emitted at every step (or every ``sample_stride``-th step plus the
    endpoint, for long runs).  With ``check_step`` on, the run is repeated
    at half the step and a mismatch beyond ``step_guard`` raises
    :class:`StepTooLarge`.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if sample_stride < 1:
        raise ValueError("sample_stride must be at least 1")
    provider = as_provider(shape_curve, dt)
    c_start, _ = provider.sample(t0)
    t_ref_norm = shape.norm_T(c_start)
    q_end, samples = _run(provider, q0.q, t0, t1, dt, k, True,
                          require_domain_D, t_ref_norm, sample_stride)
    if check_step:
        q_half, _ = _run(provider, q0.q, t0, t1, 0.5 * dt, k, False,
                         False, t_ref_norm, sample_stride)
        gap = float(np.max(np.abs(q_half - q_end)))
        if gap > step_guard:
            raise StepTooLarge(
                f"halving dt moved the endpoint by {gap:.3e} (> {step_guard:g})")
    return samples


def flapping_bound(shape_curve: ShapeCurve, t_span: Sequence[float],
                   k: PhysicalConstants, grid: int = 1024) -> float:
    """Radius T sup |(M^r)^{-1} N cdot| confining every reparameterized replay.

    Any time-reparameterization of the same shape path stays within this
    distance of its starting configuration.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    provider = as_provider(shape_curve, (t1 - t0) / grid)
    ts = np.linspace(t0, t1, grid)
    c_arr, cd_arr = _eval_curve(provider, ts)
    body, _ = _bodies(c_arr, cd_arr, k, False)
    return (t1 - t0) * float(np.max(np.linalg.norm(body, axis=1)))
