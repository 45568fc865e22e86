"""Allowable vector fields on shape space, Lie brackets, rank certificates.

For every ordered mode pair (k0, k1) there are two polynomial fields that
annihilate both self-propulsion constraint functionals, so their flows stay
on the shape sphere.  Lifting them through the motion equation gives fields
on configuration x shape space whose iterated Lie brackets certify local
controllability: the span of brackets up to a small depth is measured by
SVD at sampled points, standing in for a symbolic rank argument.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from . import matrices
from .dynamics import RigidState, SampleDiagnostics, TrajectorySample
from .errors import NonFiniteState
from .jets import TaylorData, bracket_data, jcos, jsin, taylor_of
from .shape import PhysicalConstants, ShapeCoefficients, ShapeVelocity

__all__ = [
    "ShapeField",
    "ConfigField",
    "shape_field",
    "standard_fields",
    "config_fields",
    "field_eval",
    "lie_bracket",
    "RankCertificate",
    "rank_certificate",
    "commutator_maneuver",
    "bracket_x1_x2_closed_form",
]


@dataclasses.dataclass(frozen=True)
class ShapeField:
    """Constraint-annihilating polynomial field on the truncated shape space.

    Normalized so the (1,2,j) instances restrict on two modes to the
    reference fields X^1/X^2 (and (2,1,j) to X^3/X^4).
    """

    k0: int
    k1: int
    j: int
    n_modes: int

    def __post_init__(self):
        if not (1 <= self.k0 <= self.n_modes and 1 <= self.k1 <= self.n_modes):
            raise ValueError("mode indices must lie in 1..n_modes")
        if self.k0 == self.k1:
            raise ValueError("mode indices must differ")
        if self.j not in (1, 2):
            raise ValueError("component selector j must be 1 or 2")

    @property
    def label(self) -> str:
        return f"X({self.k0},{self.k1},{self.j})"

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def _eval(self, xs):
        """Generic-scalar evaluation; xs is the interleaved 2N sequence."""
        k0, k1 = self.k0, self.k1
        a0 = xs[2 * (k0 - 1)]
        b0 = xs[2 * (k0 - 1) + 1]
        a1 = xs[2 * (k1 - 1)]
        b1 = xs[2 * (k1 - 1) + 1]
        norm = k0 * (k1 + 1.0)
        p = (k1 * k1 + k1) / norm
        q = (k0 * k0 + k0) / norm
        out = [0.0] * (2 * self.n_modes)
        if self.j == 1:
            out[2 * (k0 - 1)] = -(p * (a0 * a1)) - q * (b0 * b1)
            out[2 * (k0 - 1) + 1] = -(p * (a1 * b0)) + q * (a0 * b1)
            out[2 * (k1 - 1)] = a0 * a0 + b0 * b0
        else:
            out[2 * (k0 - 1)] = -(p * (a0 * b1)) + q * (a1 * b0)
            out[2 * (k0 - 1) + 1] = -(p * (b0 * b1)) - q * (a0 * a1)
            out[2 * (k1 - 1) + 1] = a0 * a0 + b0 * b0
        return out

    def value(self, c) -> np.ndarray:
        x = _reals_of(c, self.n_modes)
        return np.array([float(v) for v in self._eval(x)])

    def jacobian(self, c) -> np.ndarray:
        x = _reals_of(c, self.n_modes)
        return taylor_of(self._eval, x, 1).tensors[1]


@dataclasses.dataclass(frozen=True)
class ConfigField:
    """Shape field lifted to (r1, r2, theta, c) via the motion equation."""

    base: ShapeField
    consts: PhysicalConstants
    det_scaled: bool = False

    @property
    def label(self) -> str:
        tag = "Y*" if self.det_scaled else "Y"
        return f"{tag}({self.base.k0},{self.base.k1},{self.base.j})"

    @property
    def dim(self) -> int:
        return 3 + 2 * self.base.n_modes

    def _eval(self, xs):
        theta = xs[2]
        c = xs[3:]
        x = self.base._eval(c)
        m_r, n_mat = matrices.assemble_generic(
            c, self.consts.rho_0, self.consts.rho_f, rigid_only=True)
        rhs = [sum(n_mat[i][j] * x[j] for j in range(len(x))) for i in range(3)]
        v, det = _cofactor_solve_generic(m_r, rhs)
        ct = jcos(theta)
        st = jsin(theta)
        out = [-(ct * v[0] - st * v[1]), -(st * v[0] + ct * v[1]), -v[2]] + list(x)
        if self.det_scaled:
            scale = det * (1.0 / self.consts.rho_f ** 3)
            out = [scale * o for o in out]
        return out

    def value(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        theta = x[2]
        shp = x[3:]
        xv = self.base.value(shp)
        m_r, n_mat = matrices.rigid_system(shp, self.consts)
        v = np.linalg.solve(m_r, n_mat @ xv)
        ct, st = math.cos(theta), math.sin(theta)
        out = np.concatenate([[-(ct * v[0] - st * v[1]),
                               -(st * v[0] + ct * v[1]), -v[2]], xv])
        if self.det_scaled:
            out = out * (np.linalg.det(m_r) / self.consts.rho_f ** 3)
        return out

    def jacobian(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        return taylor_of(self._eval, x, 1).tensors[1]


def _reals_of(c, n_modes: int) -> list:
    if isinstance(c, (ShapeCoefficients, ShapeVelocity)):
        return c.reals.tolist()
    arr = np.asarray(c, dtype=float).reshape(-1)
    if arr.size != 2 * n_modes:
        raise ValueError("point has the wrong dimension for this field")
    return arr.tolist()


def _cofactor_solve_generic(m, rhs):
    c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1]
    c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2]
    c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0]
    c10 = m[0][2] * m[2][1] - m[0][1] * m[2][2]
    c11 = m[0][0] * m[2][2] - m[0][2] * m[2][0]
    c12 = m[0][1] * m[2][0] - m[0][0] * m[2][1]
    c20 = m[0][1] * m[1][2] - m[0][2] * m[1][1]
    c21 = m[0][2] * m[1][0] - m[0][0] * m[1][2]
    c22 = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02
    inv_det = 1.0 / det
    v0 = (c00 * rhs[0] + c10 * rhs[1] + c20 * rhs[2]) * inv_det
    v1 = (c01 * rhs[0] + c11 * rhs[1] + c21 * rhs[2]) * inv_det
    v2 = (c02 * rhs[0] + c12 * rhs[1] + c22 * rhs[2]) * inv_det
    return [v0, v1, v2], det


def shape_field(k0: int, k1: int, j: int, n_modes: int = 2) -> ShapeField:
    return ShapeField(k0=k0, k1=k1, j=j, n_modes=n_modes)


def standard_fields(n_modes: int = 2) -> list[ShapeField]:
    """The four reference fields X^1..X^4 (mode pair (1,2) both ways)."""
    return [shape_field(1, 2, 1, n_modes), shape_field(1, 2, 2, n_modes),
            shape_field(2, 1, 1, n_modes), shape_field(2, 1, 2, n_modes)]


def config_fields(fields: Sequence[ShapeField], consts: PhysicalConstants,
                  det_scaled: bool = False) -> list[ConfigField]:
    return [ConfigField(base=f, consts=consts, det_scaled=det_scaled) for f in fields]


def field_eval(f: ShapeField, c) -> np.ndarray:
    """Value of a shape field at c (exact polynomial evaluation)."""
    return f.value(c)


def lie_bracket(f, g, point) -> np.ndarray:
    """Commutator [f, g](point) = Jf(point) g(point) - Jg(point) f(point).

    Oriented to reproduce the reference closed forms (so the (+f, +g, -f, -g)
    phase loop drifts along [g, f] = -[f, g] per unit squared phase length).
    """
    point = np.asarray(point, dtype=float)
    return f.jacobian(point) @ g.value(point) - g.jacobian(point) @ f.value(point)


def bracket_x1_x2_closed_form(c) -> np.ndarray:
    """Reference closed form of [X^1, X^2] on two modes."""
    a1, b1, a2, b2 = np.asarray(_reals_of(c, 2), dtype=float)
    return (4.0 / 3.0) * (a1 * a1 + b1 * b1) * np.array([-b1, a1, -3.0 * b2, 3.0 * a2])


# ---------------------------------------------------------------------------
# Rank certificates
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class RankCertificate:
    rank: int
    singular_values: np.ndarray
    labels: tuple
    bracket_depth: int
    tol: float

    @property
    def sigma_ratio(self) -> float:
        """Conditioning sigma_rank / sigma_max of the certified span."""
        s = self.singular_values
        if self.rank == 0 or not s.size or s[0] == 0:
            return 0.0
        return float(s[self.rank - 1] / s[0])


def _tangent_project(vectors: np.ndarray, point: np.ndarray, shape_offset: int) -> np.ndarray:
    """Remove the component normal to the shape sphere (volume-gradient)."""
    shp = point[shape_offset:]
    n = shp.size // 2
    weights = np.repeat(np.arange(1, n + 1, dtype=float), 2)
    normal = weights * shp
    norm = np.linalg.norm(normal)
    if norm == 0.0:
        return vectors
    normal = normal / norm
    out = vectors.copy()
    block = out[shape_offset:, :]
    block -= np.outer(normal, normal @ block)
    return out


def rank_certificate(fields: Sequence, point, bracket_depth: int = 3,
                     tol: float = 1e-8) -> RankCertificate:
    """Numerical rank of the fields plus iterated brackets at one point.

    ``bracket_depth`` counts nesting levels of the bracket operation (base
    fields have depth 0).  Vectors are projected onto the tangent space of
    the shape sphere, columns normalized, and the rank read off the SVD at
    threshold ``tol * sigma_max``.
    """
    if bracket_depth < 0 or bracket_depth > 3:
        raise ValueError("bracket_depth must be between 0 and 3")
    point = np.asarray(point, dtype=float)
    is_config = isinstance(fields[0], ConfigField)
    shape_offset = 3 if is_config else 0

    words: list[tuple[TaylorData, int, str]] = [
        (taylor_of(f._eval, point, bracket_depth), 0, f.label) for f in fields]
    level_start = 0
    for depth in range(1, bracket_depth + 1):
        level_end = len(words)
        fresh = []
        for ia in range(level_end):
            da, deptha, la = words[ia]
            for ib in range(ia + 1, level_end):
                db, depthb, lb = words[ib]
                if max(deptha, depthb) != depth - 1:
                    continue
                if min(da.order, db.order) < 1:
                    continue
                fresh.append((bracket_data(da, db), depth, f"[{la},{lb}]"))
        if not fresh:
            break
        words.extend(fresh)
        level_start = level_end

    cols = []
    labels = []
    for data, _, label in words:
        v = data.value
        nrm = np.linalg.norm(v)
        if nrm > 1e-150:
            cols.append(v / nrm)
            labels.append(label)
    if not cols:
        return RankCertificate(rank=0, singular_values=np.zeros(0), labels=(),
                               bracket_depth=bracket_depth, tol=tol)
    mat = np.column_stack(cols)
    mat = _tangent_project(mat, point, shape_offset)
    sing = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sing > tol * sing[0])) if sing.size else 0
    return RankCertificate(rank=rank, singular_values=sing, labels=tuple(labels),
                           bracket_depth=bracket_depth, tol=tol)


# ---------------------------------------------------------------------------
# Commutator maneuver
# ---------------------------------------------------------------------------

def commutator_maneuver(pair: Sequence[ShapeField], epsilon: float, cycles: int,
                        q0: RigidState, c0: ShapeCoefficients,
                        k: PhysicalConstants, substeps: int = 16
                        ) -> list[TrajectorySample]:
    """Drive the four-phase (+i, +j, -i, -j) piecewise-constant schedule.

    Each phase lasts ``epsilon`` and the cycle repeats ``cycles`` times;
    the net displacement per cycle approximates epsilon^2 times the bracket
    of the pair.  Returns the sampled trajectory (one sample per substep).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    fi, fj = pair
    yi = ConfigField(base=fi, consts=k)
    yj = ConfigField(base=fj, consts=k)
    schedule = [(yi, 1.0), (yj, 1.0), (yi, -1.0), (yj, -1.0)]

    dim = 3 + 2 * c0.n_modes
    x = np.empty(dim)
    x[:3] = q0.q
    x[3:] = c0.reals
    t = 0.0
    h = epsilon / substeps

    def mk_sample(tt, xv, cdot_vec):
        c = ShapeCoefficients.from_reals(xv[3:])
        cd = ShapeVelocity.from_reals(cdot_vec)
        diag = SampleDiagnostics(volume_drift=0.0, constraint_f=0.0, lagrangian=0.0)
        return TrajectorySample(t=float(tt), state=RigidState(r=xv[:2], theta=float(xv[2])),
                                shape=c, shape_velocity=cd, diagnostics=diag)

    samples = [mk_sample(t, x, np.zeros(2 * c0.n_modes))]
    for _ in range(cycles):
        for field, sgn in schedule:
            def rhs(xv):
                return sgn * field.value(xv)
            for _ in range(substeps):
                k1 = rhs(x)
                k2 = rhs(x + 0.5 * h * k1)
                k3 = rhs(x + 0.5 * h * k2)
                k4 = rhs(x + h * k3)
                x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += h
                if not np.isfinite(x).all():
                    raise NonFiniteState(f"maneuver state non-finite at t = {t:.6g}")
                samples.append(mk_sample(t, x, rhs(x)[3:]))
    return samples
