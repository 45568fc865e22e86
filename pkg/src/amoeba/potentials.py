"""Laurent-Fourier coefficients of the elementary flow potentials.

Each elementary potential (three for the rigid degrees of freedom, two per
shape mode) is harmonic outside the unit disk and determined by Neumann data
on the circle.  Expanding that data in a Fourier series and dividing mode j
by j yields the coefficient pairs used in every mass-matrix entry.  The
closed-form recurrences below are the production path; the FFT route over
the pointwise boundary data is shipped as an independent test oracle.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .shape import ShapeCoefficients

__all__ = [
    "CoefficientPair",
    "alpha_coeffs",
    "mu_nu_coeffs",
    "weighted_dot",
    "boundary_data_fft_oracle",
    "support_bound",
]


@dataclasses.dataclass(frozen=True)
class CoefficientPair:
    """Cosine/sine coefficient lists of one elementary potential, j = 1..J."""

    cos_part: np.ndarray
    sin_part: np.ndarray

    def __post_init__(self):
        cp = np.asarray(self.cos_part, dtype=float).reshape(-1).copy()
        sp = np.asarray(self.sin_part, dtype=float).reshape(-1).copy()
        if cp.size != sp.size:
            raise ValueError("cos and sin parts must have equal length")
        cp.setflags(write=False)
        sp.setflags(write=False)
        object.__setattr__(self, "cos_part", cp)
        object.__setattr__(self, "sin_part", sp)

    @property
    def J(self) -> int:
        return self.cos_part.size


def _dense_j(n_modes: int) -> int:
    # All supports fit below N+2 for modes k <= N.
    return n_modes + 2


def support_bound(n_modes: int, k: int) -> int:
    """Largest index j that can carry a nonzero entry for mode k."""
    if k == 0:
        return max(n_modes, 1)
    return max(n_modes - k, k + 1)


def alpha_coeffs(c: ShapeCoefficients) -> CoefficientPair:
    """Coefficients of the rotational potential.

    alpha1_m = b_{m-1} [m >= 2] + sum_j (b_{j+m} a_j - a_{j+m} b_j)
    alpha2_m = -a_{m-1} [m >= 2] - sum_j (a_{j+m} a_j + b_{j+m} b_j)
    """
    n = c.n_modes
    J = _dense_j(n)
    a, b = c.a, c.b
    cos = np.zeros(J)
    sin = np.zeros(J)
    for m in range(1, J + 1):
        s1 = 0.0
        s2 = 0.0
        if m <= n - 1:
            s1 = float(np.dot(b[m:], a[: n - m]) - np.dot(a[m:], b[: n - m]))
            s2 = float(np.dot(a[m:], a[: n - m]) + np.dot(b[m:], b[: n - m]))
        lin1 = b[m - 2] if 2 <= m <= n + 1 else 0.0
        lin2 = a[m - 2] if 2 <= m <= n + 1 else 0.0
        cos[m - 1] = lin1 + s1
        sin[m - 1] = -lin2 - s2
    return CoefficientPair(cos, sin)


def mu_nu_coeffs(c: ShapeCoefficients, k: int) -> tuple[CoefficientPair, CoefficientPair]:
    """Coefficient pairs (mu_k, nu_k) of the two mode-k potentials.

    Mode k = 0 covers the two translational potentials (mu_0 drives e1,
    nu_0 drives e2); it is the k = 0 instance of z^(k+1) phi'(c)(z),
    giving mu1_{0,j} = a_j - delta_{j1}, nu2_{0,j} = -a_j - delta_{j1}
    with b_j on the remaining parts.
    """
    n = c.n_modes
    if not 0 <= k <= n:
        raise ValueError("mode index must satisfy 0 <= k <= n_modes")
    J = _dense_j(n)
    a, b = c.a, c.b
    mu_cos = np.zeros(J)
    mu_sin = np.zeros(J)
    nu_cos = np.zeros(J)
    nu_sin = np.zeros(J)
    if k == 0:
        mu_cos[:n] = a
        mu_sin[:n] = b
        nu_cos[:n] = b
        nu_sin[:n] = -a
        mu_cos[0] -= 1.0
        nu_sin[0] -= 1.0
        return CoefficientPair(mu_cos, mu_sin), CoefficientPair(nu_cos, nu_sin)

    for j in range(1, J + 1):
        plus = k / j + 1.0
        if k + j <= n:
            mu_cos[j - 1] += plus * a[k + j - 1]
            mu_sin[j - 1] += plus * b[k + j - 1]
            nu_cos[j - 1] += plus * b[k + j - 1]
            nu_sin[j - 1] -= plus * a[k + j - 1]
        if 1 <= j <= k - 1:
            minus = k / j - 1.0
            mu_cos[j - 1] += minus * a[k - j - 1]
            mu_sin[j - 1] -= minus * b[k - j - 1]
            nu_cos[j - 1] += minus * b[k - j - 1]
            nu_sin[j - 1] += minus * a[k - j - 1]
        if j == k + 1:
            mu_cos[j - 1] -= 1.0 / (k + 1.0)
            nu_sin[j - 1] -= 1.0 / (k + 1.0)
    return CoefficientPair(mu_cos, mu_sin), CoefficientPair(nu_cos, nu_sin)


def weighted_dot(u: CoefficientPair, v: CoefficientPair) -> float:
    """Weighted pairing sum_j j (u1_j v1_j + u2_j v2_j); short lists zero-padded."""
    m = min(u.J, v.J)
    w = np.arange(1, m + 1, dtype=float)
    return float(np.sum(w * (u.cos_part[:m] * v.cos_part[:m]
                             + u.sin_part[:m] * v.sin_part[:m])))


def _phi_prime_on_circle(c: ShapeCoefficients, z: np.ndarray) -> np.ndarray:
    k = np.arange(1, c.n_modes + 1, dtype=float)
    return 1.0 - (z[:, None] ** (-(k + 1.0))) @ (k * c.coeffs)


def boundary_data_fft_oracle(c: ShapeCoefficients, which: str,
                             samples: int = 512) -> CoefficientPair:
    """Brute-force coefficients from pointwise Neumann data on the circle.

    ``which`` is one of ``"r1"``, ``"r2"``, ``"r3"`` (rigid potentials) or
    ``"a<k>"`` / ``"b<k>"`` (shape potentials).  The data is sampled, the
    discrete Fourier transform taken, and mode j divided by j.  Independent
    of the closed-form recurrences by construction.
    """
    n = c.n_modes
    if samples < 4 * (n + 2):
        raise ValueError("samples must be at least 4 (n_modes + 2)")
    if samples & (samples - 1):
        raise ValueError("samples must be a power of two")
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    z = np.exp(1j * theta)
    dphi = _phi_prime_on_circle(c, z)

    if which == "r1":
        data = -np.real(z * dphi)
    elif which == "r2":
        data = -np.imag(z * dphi)
    elif which == "r3":
        k = np.arange(1, n + 1, dtype=float)
        phi = z + (z[:, None] ** (-k)) @ c.coeffs
        data = -np.imag(np.conj(phi) * z * dphi)
    elif which[:1] in ("a", "b") and which[1:].isdigit():
        k = int(which[1:])
        if not 1 <= k <= n:
            raise ValueError(f"mode out of range in {which!r}")
        if which[0] == "a":
            data = -np.real(z ** (k + 1) * dphi) - k * c.a[k - 1]
        else:
            data = -np.imag(z ** (k + 1) * dphi) - k * c.b[k - 1]
    else:
        raise ValueError(f"unknown potential id {which!r}")

    spec = np.fft.rfft(data)
    J = _dense_j(n)
    j = np.arange(1, J + 1, dtype=float)
    cos = 2.0 * spec[1:J + 1].real / samples / j
    sin = -2.0 * spec[1:J + 1].imag / samples / j
    return CoefficientPair(cos, sin)
