"""Assembly of the kinetic-energy mass matrices and their shape derivatives.

The full quadratic form on (rigid velocity, shape velocity) splits into a
3x3 rigid block M^r, a 3x2N coupling block N and a 2N x 2N deformation
block M^d.  Every added-mass entry is the weighted pairing of two
coefficient rows from :mod:`amoeba.potentials`; the body contributes the
diagonal pi*rho_0 terms.  Eliminating the rigid velocity leaves the reduced
shape metric K = M^d - N^T (M^r)^{-1} N that governs internal forces.

Shape axes are ordered (a_1, b_1, ..., a_N, b_N) throughout.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .errors import SingularMr
from .shape import PhysicalConstants, ShapeCoefficients

__all__ = [
    "MassMatrices",
    "ReducedMassMatrix",
    "assemble",
    "reduced_k",
    "d_k_dc",
    "mr_inverse_cofactor",
    "rigid_system",
    "coercivity_constant",
    "assemble_generic",
]


@dataclasses.dataclass(frozen=True)
class MassMatrices:
    """Rigid, coupling and deformation blocks of the kinetic-energy form."""

    m_r: np.ndarray      # (3, 3) symmetric positive definite
    n_mat: np.ndarray    # (3, 2N)
    m_d: np.ndarray      # (2N, 2N) symmetric positive definite

    def __post_init__(self):
        for name in ("m_r", "n_mat", "m_d"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self) -> int:
        return self.n_mat.shape[1] // 2

    @property
    def full(self) -> np.ndarray:
        """The (3+2N) x (3+2N) block matrix of the whole quadratic form."""
        top = np.hstack([self.m_r, self.n_mat])
        bot = np.hstack([self.n_mat.T, self.m_d])
        return np.vstack([top, bot])


@dataclasses.dataclass(frozen=True)
class ReducedMassMatrix:
    """Shape-space metric after eliminating the rigid velocity."""

    k_mat: np.ndarray    # (2N, 2N) symmetric positive definite

    def __post_init__(self):
        arr = np.asarray(self.k_mat, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "k_mat", arr)


def coercivity_constant(n_modes: int, k: PhysicalConstants) -> float:
    """Lower bound nu with (1/2) v^T K v >= nu ||v||_T^2 for all shapes."""
    return float(np.pi * k.rho_0 / (2.0 * n_modes * (n_modes + 1.0)))


# ---------------------------------------------------------------------------
# Coefficient-row table: row 0 = mu_0, row 1 = nu_0, row 2 = alpha,
# rows 3+2(k-1) / 4+2(k-1) = mu_k / nu_k, each of shape (2, J), J = N+2.
# ---------------------------------------------------------------------------

_STRUCT_CACHE: dict[int, dict] = {}


def _struct(n: int) -> dict:
    s = _STRUCT_CACHE.get(n)
    if s is None:
        s = {
            "J": n + 2,
            "R": 2 * n + 3,
            "w": np.arange(1, n + 3, dtype=float),
            "kplus": [None] + [(k / np.arange(1.0, n - k + 1.0) + 1.0) if k < n else np.zeros(0)
                               for k in range(1, n + 1)],
            "kminus": [None] + [(k / np.arange(1.0, float(k)) - 1.0) if k >= 2 else np.zeros(0)
                                for k in range(1, n + 1)],
            "inv_kp1": 1.0 / (np.arange(1, n + 1, dtype=float) + 1.0),
        }
        _STRUCT_CACHE[n] = s
        # affine split phi(c) = CONST + LIN c + alpha-quadratic; built from the
        # loop-based constructor once per truncation order
        const = _phi_rows_loops(np.zeros(2 * n), True)
        lin = np.empty((s["R"] * 2 * s["J"], 2 * n))
        for d in range(2 * n):
            e = np.zeros(2 * n)
            e[d] = 1.0
            col = _phi_rows_loops(e, False)
            qc, qs = _alpha_quad(e[0::2], e[1::2], n)
            col[2, 0, :max(n - 1, 0)] -= qc
            col[2, 1, :max(n - 1, 0)] -= qs
            lin[:, d] = col.reshape(-1)
        s["CONST"] = const
        s["LIN"] = lin
    return s


def _alpha_quad(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # quadratic alpha sums for m = 1..n-1:  sum_j b_{j+m} a_j - a_{j+m} b_j  and
    # -(sum_j a_{j+m} a_j + b_{j+m} b_j), via full correlations
    if n < 2:
        z = np.zeros(0)
        return z, z
    ba = np.correlate(b, a, "full")[n:]
    ab = np.correlate(a, b, "full")[n:]
    aa = np.correlate(a, a, "full")[n:]
    bb = np.correlate(b, b, "full")[n:]
    return ba - ab, -(aa + bb)


def _alpha_rows(a: np.ndarray, b: np.ndarray, n: int, J: int) -> tuple[np.ndarray, np.ndarray]:
    cos = np.zeros(J)
    sin = np.zeros(J)
    cos[1:n + 1] += b
    sin[1:n + 1] -= a
    for m in range(1, n):
        cos[m - 1] += np.dot(b[m:], a[:n - m]) - np.dot(a[m:], b[:n - m])
        sin[m - 1] -= np.dot(a[m:], a[:n - m]) + np.dot(b[m:], b[:n - m])
    return cos, sin


def _alpha_bilinear(ua, ub, va, vb, n: int, J: int) -> tuple[np.ndarray, np.ndarray]:
    # bilinear split B(u, v) with B(c, c) equal to the quadratic part of alpha
    cos = np.zeros(J)
    sin = np.zeros(J)
    for m in range(1, n):
        cos[m - 1] += np.dot(ua[:n - m], vb[m:]) - np.dot(ub[:n - m], va[m:])
        sin[m - 1] -= np.dot(ua[:n - m], va[m:]) + np.dot(ub[:n - m], vb[m:])
    return cos, sin


def _phi_rows(c_reals: np.ndarray, with_const: bool = True) -> np.ndarray:
    """Coefficient-row table (R, 2, J) via the cached affine split."""
    n = c_reals.size // 2
    s = _struct(n)
    phi = (s["LIN"] @ c_reals).reshape(s["R"], 2, s["J"])
    if with_const:
        phi += s["CONST"]
    if n >= 2:
        qc, qs = _alpha_quad(c_reals[0::2], c_reals[1::2], n)
        phi[2, 0, :n - 1] += qc
        phi[2, 1, :n - 1] += qs
    return phi


def _phi_rows_loops(c_reals: np.ndarray, with_const: bool = True) -> np.ndarray:
    n = c_reals.size // 2
    s = _STRUCT_CACHE[n]
    J, R = s["J"], s["R"]
    a = c_reals[0::2]
    b = c_reals[1::2]
    phi = np.zeros((R, 2, J))

    phi[0, 0, :n] = a
    phi[0, 1, :n] = b
    phi[1, 0, :n] = b
    phi[1, 1, :n] = -a
    if with_const:
        phi[0, 0, 0] -= 1.0
        phi[1, 1, 0] -= 1.0

    cos, sin = _alpha_rows(a, b, n, J)
    phi[2, 0] = cos
    phi[2, 1] = sin

    for k in range(1, n + 1):
        rm = 3 + 2 * (k - 1)
        rn = rm + 1
        kp = s["kplus"][k]
        if kp.size:
            phi[rm, 0, :n - k] = kp * a[k:]
            phi[rm, 1, :n - k] = kp * b[k:]
            phi[rn, 0, :n - k] = kp * b[k:]
            phi[rn, 1, :n - k] = -kp * a[k:]
        km = s["kminus"][k]
        if km.size:
            ar = a[k - 2::-1]
            br = b[k - 2::-1]
            phi[rm, 0, :k - 1] += km * ar
            phi[rm, 1, :k - 1] -= km * br
            phi[rn, 0, :k - 1] += km * br
            phi[rn, 1, :k - 1] += km * ar
        if with_const:
            phi[rm, 0, k] -= 1.0 / (k + 1.0)
            phi[rn, 1, k] -= 1.0 / (k + 1.0)
    return phi


def _phi_rows_direction(c_reals: np.ndarray, d_reals: np.ndarray) -> np.ndarray:
    """Directional derivative of the row table; exact since rows are affine
    apart from the quadratic alpha row."""
    n = c_reals.size // 2
    s = _struct(n)
    dphi = _phi_rows(d_reals, with_const=False)
    ca, cb = c_reals[0::2], c_reals[1::2]
    da, db = d_reals[0::2], d_reals[1::2]
    cos = np.zeros(s["J"])
    sin = np.zeros(s["J"])
    cos[1:n + 1] += db
    sin[1:n + 1] -= da
    c1, s1 = _alpha_bilinear(da, db, ca, cb, n, s["J"])
    c2, s2 = _alpha_bilinear(ca, cb, da, db, n, s["J"])
    dphi[2, 0] = cos + c1 + c2
    dphi[2, 1] = sin + s1 + s2
    return dphi


def _gram(phi: np.ndarray, w: np.ndarray, rows: int | None = None) -> np.ndarray:
    flat = (phi * w).reshape(phi.shape[0], -1)
    other = phi.reshape(phi.shape[0], -1)
    if rows is None:
        return flat @ other.T
    return flat[:rows] @ other.T


def _inertia_term(c_reals: np.ndarray, inv_kp1: np.ndarray) -> float:
    a = c_reals[0::2]
    b = c_reals[1::2]
    return 0.5 + float(np.sum(inv_kp1 * (a * a + b * b)))


def assemble(c: ShapeCoefficients, k: PhysicalConstants) -> MassMatrices:
    """Build M^r, N, M^d at the given shape from the coefficient pairings."""
    n = c.n_modes
    s = _struct(n)
    reals = c.reals
    phi = _phi_rows(reals)
    g = _gram(phi, s["w"])
    pf = np.pi * k.rho_f
    p0 = np.pi * k.rho_0

    m_r = pf * g[:3, :3]
    m_r[0, 0] += p0
    m_r[1, 1] += p0
    m_r[2, 2] += p0 * _inertia_term(reals, s["inv_kp1"])

    n_mat = pf * g[:3, 3:]

    m_d = pf * g[3:, 3:]
    m_d[np.arange(2 * n), np.arange(2 * n)] += p0 * np.repeat(s["inv_kp1"], 2)
    return MassMatrices(m_r=m_r, n_mat=n_mat, m_d=m_d)


def _rigid_from_phi(phi: np.ndarray, c_reals: np.ndarray,
                    k: PhysicalConstants) -> tuple[np.ndarray, np.ndarray]:
    n = c_reals.size // 2
    s = _struct(n)
    g3 = _gram(phi, s["w"], rows=3)
    pf = np.pi * k.rho_f
    p0 = np.pi * k.rho_0
    m_r = pf * g3[:, :3]
    m_r[0, 0] += p0
    m_r[1, 1] += p0
    m_r[2, 2] += p0 * _inertia_term(c_reals, s["inv_kp1"])
    return m_r, pf * g3[:, 3:]


def rigid_system(c_reals: np.ndarray, k: PhysicalConstants) -> tuple[np.ndarray, np.ndarray]:
    """Fast path for the dynamics: only (M^r, N) from the raw shape vector."""
    return _rigid_from_phi(_phi_rows(c_reals), c_reals, k)


def _phi_rows_batch(c_batch: np.ndarray) -> np.ndarray:
    """Row tables for a whole batch of shapes, shape (T, R, 2, J)."""
    t, dim = c_batch.shape
    n = dim // 2
    s = _struct(n)
    phi = (c_batch @ s["LIN"].T).reshape(t, s["R"], 2, s["J"])
    phi += s["CONST"]
    a = c_batch[:, 0::2]
    b = c_batch[:, 1::2]
    for m in range(1, n):
        qc = (np.einsum("tj,tj->t", b[:, m:], a[:, :n - m])
              - np.einsum("tj,tj->t", a[:, m:], b[:, :n - m]))
        qs = -(np.einsum("tj,tj->t", a[:, m:], a[:, :n - m])
               + np.einsum("tj,tj->t", b[:, m:], b[:, :n - m]))
        phi[:, 2, 0, m - 1] += qc
        phi[:, 2, 1, m - 1] += qs
    return phi


def rigid_system_batch(c_batch: np.ndarray, k: PhysicalConstants
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched (M^r, N, phi) over shapes stacked along the leading axis."""
    n = c_batch.shape[1] // 2
    s = _struct(n)
    phi = _phi_rows_batch(c_batch)
    g3 = np.einsum("tapj,tbpj,j->tab", phi[:, :3], phi, s["w"])
    pf = np.pi * k.rho_f
    p0 = np.pi * k.rho_0
    m_r = pf * g3[:, :, :3]
    m_r[:, 0, 0] += p0
    m_r[:, 1, 1] += p0
    a = c_batch[:, 0::2]
    b = c_batch[:, 1::2]
    m_r[:, 2, 2] += p0 * (0.5 + (a * a + b * b) @ s["inv_kp1"])
    return m_r, pf * g3[:, :, 3:], phi


def mr_inverse_cofactor(m_r: np.ndarray) -> tuple[np.ndarray, float]:
    """3x3 inverse via the transposed cofactor matrix, plus the determinant."""
    m = m_r
    co = np.empty((3, 3))
    co[0, 0] = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    co[0, 1] = -(m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
    co[0, 2] = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    co[1, 0] = -(m[0, 1] * m[2, 2] - m[0, 2] * m[2, 1])
    co[1, 1] = m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
    co[1, 2] = -(m[0, 0] * m[2, 1] - m[0, 1] * m[2, 0])
    co[2, 0] = m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]
    co[2, 1] = -(m[0, 0] * m[1, 2] - m[0, 2] * m[1, 0])
    co[2, 2] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    det = m[0, 0] * co[0, 0] + m[0, 1] * co[0, 1] + m[0, 2] * co[0, 2]
    if abs(det) < 1e-14:
        raise SingularMr(f"det M^r = {det:.3e} below threshold")
    return co.T / det, float(det)


def reduced_k(mm: MassMatrices) -> ReducedMassMatrix:
    """K = M^d - N^T (M^r)^{-1} N, exactly symmetrized."""
    inv, _ = mr_inverse_cofactor(mm.m_r)
    k = mm.m_d - mm.n_mat.T @ inv @ mm.n_mat
    return ReducedMassMatrix(k_mat=0.5 * (k + k.T))


def d_k_dc(c: ShapeCoefficients, k: PhysicalConstants) -> np.ndarray:
    """All first derivatives of K along the shape axes, shape (2N, 2N, 2N).

    Entry [d, i, j] is dK_ij / dc_d.  Computed by exact forward propagation
    of the affine coefficient rows (quadratic alpha row handled bilinearly)
    through the pairing and the Schur complement; no finite differences.
    """
    n = c.n_modes
    s = _struct(n)
    reals = c.reals
    phi = _phi_rows(reals)
    mm = assemble(c, k)
    inv, _ = mr_inverse_cofactor(mm.m_r)
    smat = inv @ mm.n_mat      # (3, 2N)

    pf = np.pi * k.rho_f
    p0 = np.pi * k.rho_0
    dim = 2 * n
    eye = np.eye(dim)

    # all-direction row derivatives: the affine part is just LIN reshaped,
    # the alpha row gains both bilinear slots
    dphi = np.ascontiguousarray(s["LIN"].T).reshape(dim, s["R"], 2, s["J"]).copy()
    ca, cb = reals[0::2], reals[1::2]
    for d in range(dim):
        da, db = eye[d][0::2], eye[d][1::2]
        c1, s1 = _alpha_bilinear(da, db, ca, cb, n, s["J"])
        c2, s2 = _alpha_bilinear(ca, cb, da, db, n, s["J"])
        dphi[d, 2, 0] += c1 + c2
        dphi[d, 2, 1] += s1 + s2

    dg = np.einsum("drpj,spj,j->drs", dphi, phi, s["w"])
    dg = dg + dg.transpose(0, 2, 1)
    d_mr = pf * dg[:, :3, :3]
    d_mr[:, 2, 2] += p0 * 2.0 * reals * np.repeat(s["inv_kp1"], 2)
    d_n = pf * dg[:, :3, 3:]
    d_md = pf * dg[:, 3:, 3:]
    t1 = np.einsum("dji,jm->dim", d_n, smat)
    t3 = np.einsum("ji,djk,km->dim", smat, d_mr, smat)
    out = d_md - t1 - t1.transpose(0, 2, 1) + t3
    return 0.5 * (out + out.transpose(0, 2, 1))


# ---------------------------------------------------------------------------
# Scalar-generic assembly: identical formulas over plain Python arithmetic so
# that jet/dual scalars can flow through (used for exact field Jacobians).
# ---------------------------------------------------------------------------

def _alpha_generic(a: list, b: list, n: int, J: int) -> tuple[list, list]:
    cos = [0.0] * J
    sin = [0.0] * J
    for m in range(1, J + 1):
        t1 = 0.0
        t2 = 0.0
        for j in range(1, n - m + 1):
            t1 = t1 + b[j + m - 1] * a[j - 1] - a[j + m - 1] * b[j - 1]
            t2 = t2 + a[j + m - 1] * a[j - 1] + b[j + m - 1] * b[j - 1]
        if 2 <= m <= n + 1:
            t1 = t1 + b[m - 2]
            t2 = t2 + a[m - 2]
        cos[m - 1] = t1
        sin[m - 1] = 0.0 - t2
    return cos, sin


def assemble_generic(c_scalars, rho_0, rho_f, rigid_only: bool = False):
    """(M^r, N, M^d) as nested lists over generic scalars.

    ``c_scalars`` is the interleaved (a_1, b_1, ...) sequence; entries may be
    floats or any numeric type supporting +, -, *, / (jets, duals).  With
    ``rigid_only`` the deformation block is skipped and (M^r, N) returned.
    """
    n = len(c_scalars) // 2
    J = n + 2
    a = list(c_scalars[0::2])
    b = list(c_scalars[1::2])

    rows = []
    mu0c = [a[j] for j in range(n)] + [0.0, 0.0]
    mu0s = [b[j] for j in range(n)] + [0.0, 0.0]
    nu0c = [b[j] for j in range(n)] + [0.0, 0.0]
    nu0s = [0.0 - a[j] for j in range(n)] + [0.0, 0.0]
    mu0c[0] = mu0c[0] - 1.0
    nu0s[0] = nu0s[0] - 1.0
    rows.append((mu0c, mu0s))
    rows.append((nu0c, nu0s))
    rows.append(_alpha_generic(a, b, n, J))
    for k in range(1, n + 1):
        mc = [0.0] * J
        ms = [0.0] * J
        nc = [0.0] * J
        ns = [0.0] * J
        for j in range(1, J + 1):
            plus = k / j + 1.0
            if k + j <= n:
                mc[j - 1] = mc[j - 1] + plus * a[k + j - 1]
                ms[j - 1] = ms[j - 1] + plus * b[k + j - 1]
                nc[j - 1] = nc[j - 1] + plus * b[k + j - 1]
                ns[j - 1] = ns[j - 1] - plus * a[k + j - 1]
            if 1 <= j <= k - 1:
                minus = k / j - 1.0
                mc[j - 1] = mc[j - 1] + minus * a[k - j - 1]
                ms[j - 1] = ms[j - 1] - minus * b[k - j - 1]
                nc[j - 1] = nc[j - 1] + minus * b[k - j - 1]
                ns[j - 1] = ns[j - 1] + minus * a[k - j - 1]
            if j == k + 1:
                mc[j - 1] = mc[j - 1] - 1.0 / (k + 1.0)
                ns[j - 1] = ns[j - 1] - 1.0 / (k + 1.0)
        rows.append((mc, ms))
        rows.append((nc, ns))

    pf = float(np.pi) * rho_f
    p0 = float(np.pi) * rho_0
    R = 2 * n + 3

    def pair(r1, r2):
        u, v = rows[r1], rows[r2]
        tot = 0.0
        for j in range(J):
            tot = tot + (j + 1.0) * (u[0][j] * v[0][j] + u[1][j] * v[1][j])
        return tot

    top = 3 if rigid_only else R
    gram = [[None] * R for _ in range(top)]
    for r1 in range(top):
        for r2 in range(r1 if not rigid_only else 0, R):
            gram[r1][r2] = pair(r1, r2)
            if not rigid_only and r2 < top:
                gram[r2][r1] = gram[r1][r2]

    inert = 0.5
    for k in range(1, n + 1):
        inert = inert + (a[k - 1] * a[k - 1] + b[k - 1] * b[k - 1]) / (k + 1.0)

    m_r = [[pf * gram[i][j] for j in range(3)] for i in range(3)]
    m_r[0][0] = m_r[0][0] + p0
    m_r[1][1] = m_r[1][1] + p0
    m_r[2][2] = m_r[2][2] + p0 * inert

    n_mat = [[pf * gram[i][3 + j] for j in range(2 * n)] for i in range(3)]
    if rigid_only:
        return m_r, n_mat

    m_d = [[pf * gram[3 + i][3 + j] for j in range(2 * n)] for i in range(2 * n)]
    for i in range(2 * n):
        m_d[i][i] = m_d[i][i] + p0 / (i // 2 + 2.0)
    return m_r, n_mat, m_d
