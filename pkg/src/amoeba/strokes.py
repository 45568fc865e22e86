"""Stroke programs: allowable six-mode gaits from angular controls.

A stroke is built from five angle controls alpha_1..alpha_5 and three
steering controls h_1..h_3.  The radii

    R_k(t) = (mu / sqrt(k)) sin(alpha_1)...sin(alpha_{k-1}) cos(alpha_k)

(with the last sine chain for R_6) parameterize the sphere ||c||_T = mu
exactly, while the phases theta_k accumulate steering quadratures chosen
so consecutive mode pairs cancel the angular-momentum constraint
pointwise.  Writing c_k = R_k exp(i theta_k) then yields shape curves that
are allowable by construction, whatever the controls.

Presets: ``straight``, ``circular``, ``pair34``, ``pair56``,
``moonwalk_base``, ``moonwalk_reverse``.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence, Union

import numpy as np

from .errors import UnknownPreset
from .shape import ShapeCoefficients, ShapeVelocity

__all__ = ["Const", "Linear", "TimeFunction", "StrokeProgram", "preset", "PRESET_NAMES"]

N_MODES = 6


@dataclasses.dataclass(frozen=True)
class Const:
    value: float = 0.0

    def __call__(self, t: float) -> float:
        return self.value

    def deriv(self, t: float) -> float:
        return 0.0


@dataclasses.dataclass(frozen=True)
class Linear:
    rate: float
    offset: float = 0.0

    def __call__(self, t: float) -> float:
        return self.offset + self.rate * t

    def deriv(self, t: float) -> float:
        return self.rate


TimeFunction = Union[Const, Linear, Callable[[float], float]]

_FD_STEP = 1e-6


def _as_tf(f) -> TimeFunction:
    if isinstance(f, (int, float)):
        return Const(float(f))
    return f


def _tf_deriv(f: TimeFunction, t: float) -> float:
    if hasattr(f, "deriv"):
        return f.deriv(t)
    return (f(t + 0.5 * _FD_STEP) - f(t - 0.5 * _FD_STEP)) / _FD_STEP


def _tf_deriv_batch(f: TimeFunction, ts: np.ndarray):
    if hasattr(f, "deriv"):
        return f.deriv(ts)
    return (f(ts + 0.5 * _FD_STEP) - f(ts - 0.5 * _FD_STEP)) / _FD_STEP


class StrokeProgram:
    """Allowable six-mode shape curve driven by (alpha_j, h_k) controls.

    Phase quadratures are advanced on an internal grid of step ``quad_dt``
    with checkpointing, so samples may be requested in any order (replays,
    reversals, RK4 stage points) deterministically.
    """

    def __init__(self, mu: float, alpha: Sequence, h: Sequence,
                 quad_dt: float = 1e-3, name: str = "custom"):
        if len(alpha) != 5 or len(h) != 3:
            raise ValueError("need 5 alpha controls and 3 h controls")
        self.mu = float(mu)
        self.alpha = tuple(_as_tf(f) for f in alpha)
        self.h = tuple(_as_tf(f) for f in h)
        self.quad_dt = float(quad_dt)
        self.name = name
        self._static_phases = all(
            isinstance(f, Const) and f.value == 0.0 for f in self.h)
        self._checkpoints = [np.zeros(N_MODES)]

    @property
    def n_modes(self) -> int:
        return N_MODES

    def clone(self) -> "StrokeProgram":
        return StrokeProgram(self.mu, self.alpha, self.h,
                             quad_dt=self.quad_dt, name=self.name)

    # -- radii and their rates --------------------------------------------
    def _radii(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        av = [f(t) for f in self.alpha]
        ad = [_tf_deriv(f, t) for f in self.alpha]
        sin = [math.sin(x) for x in av]
        cos = [math.cos(x) for x in av]
        r = np.empty(N_MODES)
        rd = np.empty(N_MODES)
        prod, dprod = 1.0, 0.0
        for k in range(1, N_MODES + 1):
            coef = self.mu / math.sqrt(k)
            if k <= 5:
                r[k - 1] = coef * prod * cos[k - 1]
                rd[k - 1] = coef * (dprod * cos[k - 1]
                                    - prod * sin[k - 1] * ad[k - 1])
                dprod = dprod * sin[k - 1] + prod * cos[k - 1] * ad[k - 1]
                prod = prod * sin[k - 1]
            else:
                r[k - 1] = coef * prod
                rd[k - 1] = coef * dprod
        return r, rd

    def _phase_rate(self, t: float, r: np.ndarray | None = None) -> np.ndarray:
        if r is None:
            r, _ = self._radii(t)
        out = np.zeros(N_MODES)
        for p in range(3):
            hp = self.h[p](t)
            lo, hi = 2 * p, 2 * p + 1        # modes 2p+1, 2p+2 (0-based)
            out[lo] = -hp * r[hi] ** 2 / (2 * p + 3)
            out[hi] = hp * r[lo] ** 2 / (2 * p + 2)
        return out

    # -- phase quadrature with checkpoints ---------------------------------
    def _rk4_phase(self, theta: np.ndarray, t: float, h: float) -> np.ndarray:
        k1 = self._phase_rate(t)
        k2 = self._phase_rate(t + 0.5 * h)
        k4 = self._phase_rate(t + h)
        return theta + (h / 6.0) * (k1 + 4.0 * k2 + k4)

    def _phases(self, t: float) -> np.ndarray:
        if self._static_phases:
            return np.zeros(N_MODES)
        if t <= 0.0:
            return self._rk4_phase(self._checkpoints[0], 0.0, t)
        idx = int(math.floor(t / self.quad_dt + 1e-12))
        cps = self._checkpoints
        while len(cps) <= idx:
            i = len(cps) - 1
            cps.append(self._rk4_phase(cps[i], i * self.quad_dt, self.quad_dt))
        rem = t - idx * self.quad_dt
        if rem == 0.0:
            return cps[idx]
        return self._rk4_phase(cps[idx], idx * self.quad_dt, rem)

    # -- sampling -----------------------------------------------------------
    def sample(self, t: float) -> tuple[ShapeCoefficients, ShapeVelocity]:
        """Shape and its analytic time derivative at time t."""
        r, rd = self._radii(t)
        th = self._phases(t)
        thd = self._phase_rate(t, r)
        ct, st = np.cos(th), np.sin(th)
        a = r * ct
        b = r * st
        ad = rd * ct - r * st * thd
        bd = rd * st + r * ct * thd
        return (ShapeCoefficients(a + 1j * b), ShapeVelocity(ad + 1j * bd))

    def _radii_batch(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        shape = ts.shape
        av = [np.broadcast_to(np.asarray(f(ts), dtype=float), shape) for f in self.alpha]
        ad = [np.broadcast_to(np.asarray(_tf_deriv_batch(f, ts), dtype=float), shape)
              for f in self.alpha]
        sin = [np.sin(x) for x in av]
        cos = [np.cos(x) for x in av]
        r = np.empty(shape + (N_MODES,))
        rd = np.empty(shape + (N_MODES,))
        prod = np.ones(shape)
        dprod = np.zeros(shape)
        for k in range(1, N_MODES + 1):
            coef = self.mu / math.sqrt(k)
            if k <= 5:
                r[..., k - 1] = coef * prod * cos[k - 1]
                rd[..., k - 1] = coef * (dprod * cos[k - 1]
                                         - prod * sin[k - 1] * ad[k - 1])
                dprod = dprod * sin[k - 1] + prod * cos[k - 1] * ad[k - 1]
                prod = prod * sin[k - 1]
            else:
                r[..., k - 1] = coef * prod
                rd[..., k - 1] = coef * dprod
        return r, rd

    def sample_batch(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """Interleaved (a, b) shape/velocity rows for a whole time grid."""
        ts = np.asarray(ts, dtype=float)
        r, rd = self._radii_batch(ts)
        if self._static_phases:
            th = np.zeros(ts.shape + (N_MODES,))
            thd = np.zeros_like(th)
        else:
            th = np.array([self._phases(float(t)) for t in ts])
            hv = np.stack([np.broadcast_to(np.asarray(self.h[p](ts), dtype=float),
                                           ts.shape) for p in range(3)], axis=-1)
            thd = np.zeros_like(th)
            for p in range(3):
                lo, hi = 2 * p, 2 * p + 1
                thd[..., lo] = -hv[..., p] * r[..., hi] ** 2 / (2 * p + 3)
                thd[..., hi] = hv[..., p] * r[..., lo] ** 2 / (2 * p + 2)
        ct, st = np.cos(th), np.sin(th)
        c_out = np.empty(ts.shape + (2 * N_MODES,))
        cd_out = np.empty_like(c_out)
        c_out[..., 0::2] = r * ct
        c_out[..., 1::2] = r * st
        cd_out[..., 0::2] = rd * ct - r * st * thd
        cd_out[..., 1::2] = rd * st + r * ct * thd
        return c_out, cd_out


_HALF_PI = math.pi / 2.0

PRESET_NAMES = ("straight", "circular", "pair34", "pair56",
                "moonwalk_base", "moonwalk_reverse")


def preset(name: str, mu: float = 0.5, quad_dt: float = 1e-3,
           h1: float = 1.0, h2: float = 1.2, h3: float = 1.0,
           omega: float = 1e4) -> StrokeProgram:
    """Named stroke programs with the reference parameter values.

    ``h1``/``h2``/``h3`` steer the circular and pair presets; ``omega`` is
    the fast-phase frequency of the moonwalk reversal.
    """
    zero = Const(0.0)
    if name == "straight":
        alpha = (Linear(1.0), zero, zero, zero, zero)
        h = (zero, zero, zero)
    elif name == "circular":
        alpha = (Linear(1.0), zero, zero, zero, zero)
        h = (Const(h1), zero, zero)
    elif name == "pair34":
        alpha = (Const(_HALF_PI), Const(_HALF_PI), Linear(1.0), zero, zero)
        h = (zero, Const(h2), zero)
    elif name == "pair56":
        alpha = (Const(_HALF_PI), Const(_HALF_PI), Const(_HALF_PI),
                 Const(_HALF_PI), Linear(1.0))
        h = (zero, zero, Const(h3))
    elif name == "moonwalk_base":
        alpha = (Linear(1.0), Const(math.pi / 6.0), Const(math.pi / 12.0),
                 Const(math.pi / 12.0), zero)
        h = (zero, zero, zero)
    elif name == "moonwalk_reverse":
        alpha = (Linear(1.0), Const(math.pi / 6.0), Const(math.pi / 12.0),
                 Const(math.pi / 12.0), Linear(-omega))
        h = (zero, zero, zero)
    else:
        raise UnknownPreset(f"no preset named {name!r}")
    return StrokeProgram(mu=mu, alpha=alpha, h=h, quad_dt=quad_dt, name=name)
