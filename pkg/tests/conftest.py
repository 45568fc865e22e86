import numpy as np
import pytest

from amoeba import PhysicalConstants, ShapeCoefficients


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def consts():
    return PhysicalConstants.neutrally_buoyant(rho_f=1.0, mu=0.5)


def random_embedded_shape(rng, n_modes, margin=0.85):
    """Random coefficients with the derivative sup-norm bound below 1,
    guaranteeing membership in the embedding domain."""
    raw = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
    bound = float(np.sum(np.arange(1, n_modes + 1) * np.abs(raw)))
    scale = margin * rng.uniform(0.2, 1.0) / bound
    return ShapeCoefficients(raw * scale)


def random_shape_tnorm(rng, n_modes, tmax=1.0):
    raw = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
    k = np.arange(1, n_modes + 1)
    tnorm = np.sqrt(np.sum(k * np.abs(raw) ** 2))
    return ShapeCoefficients(raw * (rng.uniform(0.1, 1.0) * tmax / tnorm))


# ---------------------------------------------------------------------------
# Two-mode closed forms used as the assembly oracle (coefficient pairings
# written out explicitly in terms of a1, b1, a2, b2).
# ---------------------------------------------------------------------------

def two_mode_pairings(a1, b1, a2, b2):
    return {
        "mu0_mu0": (1 - a1) ** 2 + b1 ** 2 + 2 * a2 ** 2 + 2 * b2 ** 2,
        "mu0_nu0": -2 * b1,
        "mu0_alpha": 3 * (a2 * b1 - a1 * b2) - 2 * a1 * b1 * a2 + b2 * (a1 ** 2 - b1 ** 2),
        "nu0_nu0": (1 + a1) ** 2 + b1 ** 2 + 2 * a2 ** 2 + 2 * b2 ** 2,
        "nu0_alpha": 3 * (b1 * b2 + a2 * a1) + 2 * a1 * b1 * b2 + a2 * (a1 ** 2 - b1 ** 2),
        "alpha_alpha": ((a1 ** 2 + b1 ** 2) * (a2 ** 2 + b2 ** 2)
                        + 2 * b1 ** 2 + 2 * a1 ** 2 + 3 * b2 ** 2 + 3 * a2 ** 2),
        "mu0_mu1": 2 * (a2 * a1 + b2 * b1) - 3 * a2,
        "mu0_nu1": 2 * (b2 * a1 - a2 * b1) - 3 * b2,
        "mu0_mu2": -a1 + a1 ** 2 - b1 ** 2,
        "mu0_nu2": -b1 + 2 * a1 * b1,
        "nu0_mu1": 2 * (a2 * b1 - b2 * a1) - 3 * b2,
        "nu0_nu1": 2 * (b2 * b1 + a2 * a1) + 3 * a2,
        "nu0_mu2": b1 + 2 * a1 * b1,
        "nu0_nu2": b1 ** 2 - a1 ** 2 - a1,
        "alpha_mu1": -b1 - 2 * b1 * (a2 ** 2 + b2 ** 2),
        "alpha_nu1": a1 + 2 * a1 * (b2 ** 2 + a2 ** 2),
        "alpha_mu2": -b2 + b2 * (a1 ** 2 + b1 ** 2),
        "alpha_nu2": a2 - a2 * (b1 ** 2 + a1 ** 2),
        "mu1_mu1": 4 * (a2 ** 2 + b2 ** 2) + 0.5,
        "mu1_nu1": 0.0,
        "mu1_mu2": 2 * (a2 * a1 - b2 * b1),
        "mu1_nu2": 2 * (a2 * b1 + a1 * b2),
        "mu2_mu2": a1 ** 2 + b1 ** 2 + 1.0 / 3.0,
        "mu2_nu1": 2 * (a1 * b2 + b1 * a2),
        "mu2_nu2": 0.0,
        "nu1_nu1": 4 * (b2 ** 2 + a2 ** 2) + 0.5,
        "nu1_nu2": 2 * (b1 * b2 - a2 * a1),
        "nu2_nu2": b1 ** 2 + a1 ** 2 + 1.0 / 3.0,
    }


def two_mode_matrices(a1, b1, a2, b2, rho_0, rho_f):
    """Reference (M^r, N, M^d) assembled from the explicit pairings."""
    p = two_mode_pairings(a1, b1, a2, b2)
    pf = np.pi * rho_f
    p0 = np.pi * rho_0
    m_r = p0 * np.diag([1.0, 1.0,
                        0.5 + (a1 ** 2 + b1 ** 2) / 2.0 + (a2 ** 2 + b2 ** 2) / 3.0])
    m_r += pf * np.array([
        [p["mu0_mu0"], p["mu0_nu0"], p["mu0_alpha"]],
        [p["mu0_nu0"], p["nu0_nu0"], p["nu0_alpha"]],
        [p["mu0_alpha"], p["nu0_alpha"], p["alpha_alpha"]],
    ])
    n_mat = pf * np.array([
        [p["mu0_mu1"], p["mu0_nu1"], p["mu0_mu2"], p["mu0_nu2"]],
        [p["nu0_mu1"], p["nu0_nu1"], p["nu0_mu2"], p["nu0_nu2"]],
        [p["alpha_mu1"], p["alpha_nu1"], p["alpha_mu2"], p["alpha_nu2"]],
    ])
    m_d = pf * np.array([
        [p["mu1_mu1"], p["mu1_nu1"], p["mu1_mu2"], p["mu1_nu2"]],
        [p["mu1_nu1"], p["nu1_nu1"], p["mu2_nu1"], p["nu1_nu2"]],
        [p["mu1_mu2"], p["mu2_nu1"], p["mu2_mu2"], p["mu2_nu2"]],
        [p["mu1_nu2"], p["nu1_nu2"], p["mu2_nu2"], p["nu2_nu2"]],
    ]) + p0 * np.diag([0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0])
    return m_r, n_mat, m_d
