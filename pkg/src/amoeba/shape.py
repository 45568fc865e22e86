"""Truncated shape space of the swimming body.

A shape is a finite vector of complex Laurent coefficients c = (c_k),
c_k = a_k + i b_k, parameterizing the deformation map of the unit disk

    chi(c)(z) = z + sum_k c_k conj(z)^k         (body interior),
    phi(c)(z) = z + sum_k c_k z^(-k)            (fluid exterior),

both agreeing on the unit circle.  This module provides the two natural
norms, the embedding-domain test, body volume / inertia / density, the
self-propulsion constraint functionals, and sphere projection.
"""
from __future__ import annotations

import dataclasses
from typing import Union

import numpy as np

from .errors import NonPositiveVolume, OutOfDomain, SingularJacobian, ZeroShape

__all__ = [
    "ShapeCoefficients",
    "ShapeVelocity",
    "PhysicalConstants",
    "norm_S",
    "norm_T",
    "in_domain_D",
    "volume",
    "inertia",
    "body_mass",
    "constraint_G",
    "constraint_F",
    "chi_eval",
    "phi_eval",
    "deformation_jacobian_det",
    "density_eval",
    "body_mass_quadrature",
    "project_sphere",
]

_BOUNDARY_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class _CoefficientVector:
    """Immutable complex coefficient vector c_k = a_k + i b_k, k = 1..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex).reshape(-1).copy()
        if arr.size == 0:
            raise ValueError("at least one mode is required")
        if not np.isfinite(arr).all():
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, n_modes: int = 6):
        return cls(np.zeros(n_modes, dtype=complex))

    @classmethod
    def from_reals(cls, reals):
        """Build from the interleaved real vector (a_1, b_1, ..., a_N, b_N)."""
        v = np.asarray(reals, dtype=float).reshape(-1)
        if v.size % 2 != 0:
            raise ValueError("interleaved vector must have even length")
        return cls(v[0::2] + 1j * v[1::2])

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @property
    def a(self) -> np.ndarray:
        return self.coeffs.real

    @property
    def b(self) -> np.ndarray:
        return self.coeffs.imag

    @property
    def reals(self) -> np.ndarray:
        """Interleaved real layout (a_1, b_1, a_2, b_2, ...)."""
        out = np.empty(2 * self.n_modes)
        out[0::2] = self.coeffs.real
        out[1::2] = self.coeffs.imag
        return out

    def __len__(self) -> int:
        return self.coeffs.size


class ShapeCoefficients(_CoefficientVector):
    """The shape (control) variable."""


class ShapeVelocity(_CoefficientVector):
    """Time derivative of the shape variable, same layout."""


ShapeLike = Union[ShapeCoefficients, ShapeVelocity]


@dataclasses.dataclass(frozen=True)
class PhysicalConstants:
    """Fluid density, reference body density and shape-sphere radius.

    ``rho`` below is the density ratio rho_0/rho_f that the trajectory
    dynamics actually depend on.
    """

    rho_f: float = 1.0
    rho_0: float = 1.0
    mu: float = 0.5

    def __post_init__(self):
        for name in ("rho_f", "rho_0", "mu"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite")

    @classmethod
    def neutrally_buoyant(cls, rho_f: float = 1.0, mu: float = 0.5) -> "PhysicalConstants":
        """Constants with rho_0 = rho_f (1 - mu^2), so the body floats freely."""
        if not 0 < mu < 1:
            raise ValueError("neutral buoyancy requires 0 < mu < 1")
        return cls(rho_f=rho_f, rho_0=rho_f * (1.0 - mu * mu), mu=mu)

    @property
    def rho(self) -> float:
        return self.rho_0 / self.rho_f


def _weights(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float)


def norm_S(c: ShapeLike) -> float:
    """Weighted l1 norm  sum_k k (|a_k| + |b_k|)."""
    k = _weights(c.n_modes)
    return float(np.sum(k * (np.abs(c.a) + np.abs(c.b))))


def norm_T(c: ShapeLike) -> float:
    """Weighted l2 norm  sqrt(sum_k k (a_k^2 + b_k^2))."""
    k = _weights(c.n_modes)
    return float(np.sqrt(np.sum(k * (c.a ** 2 + c.b ** 2))))


def in_domain_D(c: ShapeCoefficients, samples: int = 4096) -> bool:
    """Embedding-domain test: sup over the circle of |sum (k+1) c_{k+1} z^k| < 1.

    The test polynomial has degree N-1, so dense angular sampling with a
    Lipschitz margin factor (1 + N pi / samples) is a sound check at the
    resolutions used here.
    """
    n = c.n_modes
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    powers = np.exp(1j * np.outer(theta, np.arange(n)))
    coef = np.arange(1, n + 1, dtype=float) * c.coeffs
    grid_max = float(np.max(np.abs(powers @ coef)))
    return grid_max * (1.0 + n * np.pi / samples) < 1.0


def volume(c: ShapeCoefficients) -> float:
    """Body area pi (1 - ||c||_T^2); raises if the shape is degenerate."""
    t = norm_T(c)
    if t >= 1.0:
        raise NonPositiveVolume(f"||c||_T = {t:.6g} >= 1 gives non-positive volume")
    return float(np.pi * (1.0 - t * t))


def inertia(c: ShapeCoefficients, k: PhysicalConstants) -> float:
    """Moment of inertia  pi rho_0 (1/2 + sum_k |c_k|^2 / (k+1))."""
    w = 1.0 / (np.arange(1, c.n_modes + 1, dtype=float) + 1.0)
    return float(np.pi * k.rho_0 * (0.5 + np.sum(w * np.abs(c.coeffs) ** 2)))


def body_mass(k: PhysicalConstants) -> float:
    """Total mass pi rho_0, constant along any shape-change."""
    return float(np.pi * k.rho_0)


def constraint_G(c: ShapeCoefficients, cdot: ShapeVelocity) -> float:
    """Volume-conservation rate  sum_k k (adot_k a_k + bdot_k b_k)."""
    n = min(c.n_modes, cdot.n_modes)
    k = _weights(n)
    return float(np.sum(k * (cdot.a[:n] * c.a[:n] + cdot.b[:n] * c.b[:n])))


def constraint_F(c: ShapeCoefficients, cdot: ShapeVelocity) -> float:
    """Angular self-propulsion residual  sum_k (bdot_k a_k - adot_k b_k)/(k+1)."""
    n = min(c.n_modes, cdot.n_modes)
    w = 1.0 / (np.arange(1, n + 1, dtype=float) + 1.0)
    return float(np.sum(w * (cdot.b[:n] * c.a[:n] - cdot.a[:n] * c.b[:n])))


def chi_eval(c: ShapeCoefficients, z):
    """Interior deformation map  z + sum_k c_k conj(z)^k  on the closed disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + _BOUNDARY_TOL):
        raise OutOfDomain("chi is defined on the closed unit disk")
    zc = np.conj(z)
    out = z.astype(complex).copy()
    term = np.ones_like(zc)
    for ck in c.coeffs:
        term = term * zc
        out = out + ck * term
    if out.ndim == 0:
        return complex(out)
    return out


def phi_eval(c: ShapeCoefficients, z):
    """Exterior conformal map  z + sum_k c_k z^(-k)  outside the unit disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) < 1.0 - _BOUNDARY_TOL):
        raise OutOfDomain("phi is defined outside the unit disk")
    inv = 1.0 / z
    out = z.astype(complex).copy()
    term = np.ones_like(inv)
    for ck in c.coeffs:
        term = term * inv
        out = out + ck * term
    if out.ndim == 0:
        return complex(out)
    return out


def deformation_jacobian_det(c: ShapeCoefficients, z):
    """det D(chi) at points of the closed disk, 1 - |sum_k k c_k conj(z)^(k-1)|^2."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + _BOUNDARY_TOL):
        raise OutOfDomain("the Jacobian is evaluated on the closed unit disk")
    zc = np.conj(z)
    s = np.zeros_like(zc)
    term = np.ones_like(zc)
    for k, ck in enumerate(c.coeffs, start=1):
        s = s + k * ck * term
        term = term * zc
    out = 1.0 - np.abs(s) ** 2
    if out.ndim == 0:
        return float(out)
    return out.real


def density_eval(c: ShapeCoefficients, k: PhysicalConstants, z) -> float:
    """Mass density of the deformed body at the preimage point z in the disk.

    Conservation of mass gives rho_0 / det D(chi); the determinant must stay
    positive, which holds whenever the shape is embedded.
    """
    det = deformation_jacobian_det(c, z)
    det_arr = np.asarray(det, dtype=float)
    if np.any(det_arr <= 1e-14):
        raise SingularJacobian("deformation Jacobian vanished; shape self-overlaps")
    out = k.rho_0 / det_arr
    if out.ndim == 0:
        return float(out)
    return out


def body_mass_quadrature(c: ShapeCoefficients, k: PhysicalConstants,
                         n_r: int = 48, n_theta: int = 256) -> float:
    """Integrate the deformed density over the body as a consistency oracle.

    Gauss-Legendre in radius and a trapezoid rule in angle (exact for the
    trigonometric polynomials involved); returns the total mass, which must
    equal pi rho_0 for any embedded shape.
    """
    nodes, wts = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (nodes + 1.0)
    wr = 0.5 * wts
    theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    zz = r[:, None] * np.exp(1j * theta[None, :])
    det = deformation_jacobian_det(c, zz)
    if np.any(det <= 1e-14):
        raise SingularJacobian("deformation Jacobian vanished inside the disk")
    rho = k.rho_0 / det
    # dm = rho(x*) dx* = rho(chi(z)) * det * r dr dtheta
    integrand = rho * det * r[:, None]
    return float((2.0 * np.pi / n_theta) * np.sum(wr @ integrand))


def project_sphere(c: ShapeCoefficients, mu: float) -> ShapeCoefficients:
    """Radial projection mu * c / ||c||_T onto the shape sphere of radius mu."""
    t = norm_T(c)
    if t == 0.0:
        raise ZeroShape("cannot project the zero shape onto a sphere")
    return ShapeCoefficients(c.coeffs * (mu / t))
