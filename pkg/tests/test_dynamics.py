import math

import numpy as np
import pytest

from amoeba import (
    PhysicalConstants,
    RigidState,
    ShapeCoefficients,
    ShapeVelocity,
    flapping_bound,
    impulses,
    integrate,
    rigid_velocity,
    rigid_velocity_body,
)
from amoeba.dynamics import as_provider
from amoeba.errors import NonFiniteState, StepTooLarge
from amoeba.strokes import preset

from conftest import random_embedded_shape

TWO_PI = 2.0 * math.pi


class ReversedCurve:
    """Replay of a provider's shape path backwards over [T, 2T]."""

    def __init__(self, inner, t_end):
        self._inner = inner
        self._t_end = t_end

    def sample(self, t):
        c, cd = self._inner.sample(2.0 * self._t_end - t)
        return c, ShapeVelocity(-cd.coeffs)

    def sample_batch(self, ts):
        c, cd = self._inner.sample_batch(2.0 * self._t_end - np.asarray(ts))
        return c, -cd


class Reparameterized:
    """Same shape path traversed under a smooth clock beta(t)."""

    def __init__(self, inner, beta, beta_dot):
        self._inner = inner
        self._beta = beta
        self._beta_dot = beta_dot

    def sample(self, t):
        c, cd = self._inner.sample(self._beta(t))
        return c, ShapeVelocity(cd.coeffs * self._beta_dot(t))


class TestRigidVelocity:
    def test_zero_velocity(self, consts, rng):
        c = random_embedded_shape(rng, 4)
        cd = ShapeVelocity.zeros(4)
        assert np.abs(rigid_velocity(c, cd, 0.3, consts)).max() == 0.0

    def test_linear_in_shape_velocity(self, consts, rng):
        c = random_embedded_shape(rng, 3)
        cd = ShapeVelocity(rng.normal(size=3) + 1j * rng.normal(size=3))
        lam = 2.75
        v1 = rigid_velocity(c, cd, 0.4, consts)
        v2 = rigid_velocity(c, ShapeVelocity(lam * cd.coeffs), 0.4, consts)
        assert np.allclose(v2, lam * v1, rtol=1e-12)

    def test_real_coefficients_stay_on_axis(self, consts, rng):
        # all-real shape + all-real rate: no sideways drift, no rotation
        for n in (2, 6):
            a = rng.normal(size=n) * 0.2
            da = rng.normal(size=n)
            c = ShapeCoefficients(a.astype(complex))
            cd = ShapeVelocity(da.astype(complex))
            v = rigid_velocity_body(c, cd, consts)
            assert abs(v[1]) < 1e-14
            assert abs(v[2]) < 1e-14

    def test_frame_rotation(self, consts, rng):
        c = random_embedded_shape(rng, 3)
        cd = ShapeVelocity(rng.normal(size=3) + 1j * rng.normal(size=3))
        body = rigid_velocity_body(c, cd, consts)
        delta = 0.77
        lab = rigid_velocity(c, cd, delta, consts)
        rot = np.array([[math.cos(delta), -math.sin(delta)],
                        [math.sin(delta), math.cos(delta)]])
        assert np.allclose(lab[:2], rot @ body[:2], rtol=1e-13)
        assert lab[2] == pytest.approx(body[2])

    def test_density_ratio_invariance(self, rng):
        c = random_embedded_shape(rng, 3)
        cd = ShapeVelocity(rng.normal(size=3) + 1j * rng.normal(size=3))
        k1 = PhysicalConstants(rho_f=1.0, rho_0=0.75, mu=0.5)
        k2 = PhysicalConstants(rho_f=4.0, rho_0=3.0, mu=0.5)
        assert np.allclose(rigid_velocity_body(c, cd, k1),
                           rigid_velocity_body(c, cd, k2), rtol=1e-12)


class TestIntegrate:
    def test_constant_shape_is_fixed_point(self, consts, rng):
        c = random_embedded_shape(rng, 4)
        q0 = RigidState(r=np.array([0.4, -0.2]), theta=0.9)
        traj = integrate(c, q0, (0.0, 2.0), 1e-2, consts)
        assert np.abs(traj[-1].state.r - q0.r).max() < 1e-14
        assert traj[-1].state.theta == pytest.approx(0.9)

    def test_straight_stroke_moves_on_axis(self, consts):
        traj = integrate(preset("straight"), RigidState.origin(),
                         (0.0, TWO_PI), 2e-3, consts, check_step=False)
        assert max(abs(s.state.r[1]) for s in traj) < 1e-8
        assert max(abs(s.state.theta) for s in traj) < 1e-8
        assert abs(traj[-1].state.r[0]) > 1e-3

    def test_reversal_returns_home(self, consts):
        sp = preset("straight")
        fwd = integrate(sp, RigidState.origin(), (0.0, TWO_PI), 2e-3, consts,
                        check_step=False)
        back = integrate(ReversedCurve(sp, TWO_PI), fwd[-1].state,
                         (TWO_PI, 2 * TWO_PI), 2e-3, consts, check_step=False)
        end = back[-1].state
        assert np.abs(end.r).max() < 1e-6
        assert abs(end.theta) < 1e-6

    def test_reversal_generic_gait(self, consts):
        sp = preset("circular", h1=1.0)
        fwd = integrate(sp, RigidState.origin(), (0.0, 5.0), 1e-3, consts,
                        check_step=False)
        back = integrate(ReversedCurve(sp, 5.0), fwd[-1].state,
                         (5.0, 10.0), 1e-3, consts, check_step=False)
        end = back[-1].state
        assert np.abs(end.r).max() < 1e-6
        assert abs(end.theta) < 1e-6

    def test_frame_covariance(self, consts):
        sp = preset("circular", h1=1.0)
        base = integrate(sp, RigidState.origin(), (0.0, 4.0), 2e-3, consts,
                         check_step=False)
        delta = 1.1
        rot = np.array([[math.cos(delta), -math.sin(delta)],
                        [math.sin(delta), math.cos(delta)]])
        turned = integrate(sp, RigidState(r=np.zeros(2), theta=delta),
                           (0.0, 4.0), 2e-3, consts, check_step=False)
        for s, t in zip(base[::200], turned[::200]):
            assert np.abs(t.state.r - rot @ s.state.r).max() < 1e-10
            assert t.state.theta - delta == pytest.approx(s.state.theta, abs=1e-10)

    def test_density_ratio_invariance(self):
        sp = preset("straight")
        k1 = PhysicalConstants(rho_f=1.0, rho_0=0.75, mu=0.5)
        k2 = PhysicalConstants(rho_f=2.0, rho_0=1.5, mu=0.5)
        a = integrate(sp, RigidState.origin(), (0.0, 3.0), 2e-3, k1, check_step=False)
        b = integrate(sp, RigidState.origin(), (0.0, 3.0), 2e-3, k2, check_step=False)
        assert np.abs(a[-1].state.q - b[-1].state.q).max() < 1e-13

    def test_periodic_displacement_repeats(self, consts):
        # step chosen so the period boundary is a grid point
        dt = TWO_PI / 3000.0
        traj = integrate(preset("straight"), RigidState.origin(),
                         (0.0, 2 * TWO_PI), dt, consts, check_step=False)
        ts = np.array([s.t for s in traj])
        r1 = np.array([s.state.r[0] for s in traj])
        i1 = int(np.argmin(np.abs(ts - TWO_PI)))
        assert abs(ts[i1] - TWO_PI) < 1e-9
        d1 = r1[i1] - r1[0]
        d2 = r1[-1] - r1[i1]
        assert d1 == pytest.approx(d2, abs=1e-8)

    def test_convergence_order(self, consts):
        # non-period-multiple window so the O(dt^4) term is visible
        sp = preset("straight")
        ref = integrate(sp, RigidState.origin(), (0.0, 5.0), 6.25e-4, consts,
                        check_step=False)[-1].state.q
        errs = []
        for dt in (2e-2, 1e-2, 5e-3):
            q = integrate(sp, RigidState.origin(), (0.0, 5.0), dt, consts,
                          check_step=False)[-1].state.q
            errs.append(np.max(np.abs(q - ref)))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert orders.min() >= 3.7

    def test_samples_strictly_increasing(self, consts):
        traj = integrate(preset("straight"), RigidState.origin(), (0.0, 1.0),
                         1e-2, consts)
        ts = [s.t for s in traj]
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_sample_stride(self, consts):
        traj = integrate(preset("straight"), RigidState.origin(), (0.0, 1.0),
                         1e-2, consts, sample_stride=10)
        assert len(traj) == 11
        assert traj[-1].t == pytest.approx(1.0)

    def test_diagnostics_populated(self, consts):
        traj = integrate(preset("straight"), RigidState.origin(), (0.0, 1.0),
                         1e-2, consts)
        for s in traj:
            assert abs(s.diagnostics.volume_drift) < 1e-12
            assert abs(s.diagnostics.constraint_f) < 1e-12
            assert s.diagnostics.lagrangian >= 0.0

    def test_diagnostic_lagrangian_matches_reduced_metric(self, consts):
        from amoeba import lagrangian_reduced
        traj = integrate(preset("circular", h1=1.0), RigidState.origin(),
                         (0.0, 2.0), 1e-2, consts, check_step=False)
        for s in traj[::40]:
            want = lagrangian_reduced(s.shape, s.shape_velocity, consts)
            assert s.diagnostics.lagrangian == pytest.approx(want, rel=1e-10)

    def test_step_guard_fires(self, consts):
        # an unresolved fast replay of the straight gait moves the endpoint
        # when dt halves
        sp = preset("straight")
        omega = 37.0
        fast = Reparameterized(sp, lambda t: omega * t, lambda t: omega)
        with pytest.raises(StepTooLarge):
            integrate(fast, RigidState.origin(), (0.0, 1.0), 0.05, consts,
                      check_step=True)

    def test_domain_check_flag(self, consts):
        # a gait whose shapes self-overlap is rejected only when the
        # physically-allowable flag is on
        big = preset("straight", mu=0.8)
        from amoeba.errors import OutOfDomain
        traj = integrate(big, RigidState.origin(), (0.0, 1.0), 1e-2, consts,
                         check_step=False)
        assert len(traj) == 101
        with pytest.raises(OutOfDomain):
            integrate(big, RigidState.origin(), (0.0, 1.0), 1e-2, consts,
                      check_step=False, require_domain_D=True)

    def test_non_finite_state(self, consts):
        class Broken:
            def sample(self, t):
                c = ShapeCoefficients(np.array([0.2 + 0.0j]))
                scale = 1.0 / (0.5 - t) if t < 0.5 else np.inf
                return c, ShapeVelocity(np.array([complex(scale, 0.0)]))
        with pytest.raises((NonFiniteState, ValueError)):
            integrate(Broken(), RigidState.origin(), (0.0, 1.0), 1e-2, consts,
                      check_step=False)

    def test_dt_validation(self, consts):
        with pytest.raises(ValueError):
            integrate(preset("straight"), RigidState.origin(), (0.0, 1.0), 0.0,
                      consts)

    def test_callable_provider_fd(self, consts):
        # plain callable curve gets central-difference velocities
        def curve(t):
            return ShapeCoefficients(np.array([0.3 * math.cos(t) + 0.0j,
                                               0.2 * math.sin(t) + 0.0j]))
        prov = as_provider(curve, dt=1e-3)
        c, cd = prov.sample(0.6)
        assert cd.a[0] == pytest.approx(-0.3 * math.sin(0.6), abs=1e-6)
        traj = integrate(curve, RigidState.origin(), (0.0, 1.0), 1e-2, consts,
                         check_step=False)
        assert len(traj) == 101


class TestImpulses:
    def test_zero_inputs(self, consts, rng):
        c = random_embedded_shape(rng, 3)
        out = impulses(c, ShapeVelocity.zeros(3), np.zeros(3), consts)
        assert np.abs(out.p).max() == 0.0 and out.pi == 0.0
        assert np.abs(out.l).max() == 0.0 and out.lam == 0.0

    def test_rest_shape_unit_velocity(self, consts):
        out = impulses(ShapeCoefficients.zeros(2), ShapeVelocity.zeros(2),
                       np.array([1.0, 0.0, 0.0]), consts)
        want = (consts.rho_0 + consts.rho_f) * np.pi
        assert out.p[0] == pytest.approx(want)
        assert out.p[1] == 0.0 and out.pi == 0.0

    def test_conservation_along_solution(self, consts):
        traj = integrate(preset("circular", h1=1.0), RigidState.origin(),
                         (0.0, 4.0), 2e-3, consts, check_step=False)
        for s in traj[::100]:
            qdot_star = rigid_velocity_body(s.shape, s.shape_velocity, consts)
            out = impulses(s.shape, s.shape_velocity, qdot_star, consts)
            assert np.abs(out.p + out.l).max() < 1e-10
            assert abs(out.pi + out.lam) < 1e-10


class TestFlappingBound:
    def test_constant_curve(self, consts, rng):
        c = random_embedded_shape(rng, 3)
        assert flapping_bound(c, (0.0, 5.0), consts) == 0.0

    def test_replays_stay_inside(self, consts):
        sp = preset("straight")
        radius = flapping_bound(sp, (0.0, TWO_PI), consts)
        assert radius > 0.0

        def beta(t):
            return TWO_PI * 0.5 * (1.0 - math.cos(t))

        def beta_dot(t):
            return TWO_PI * 0.5 * math.sin(t)

        traj = integrate(Reparameterized(sp, beta, beta_dot),
                         RigidState.origin(), (0.0, 8.0), 2e-3, consts,
                         check_step=False)
        worst = max(np.linalg.norm(np.array([s.state.r[0], s.state.r[1],
                                             s.state.theta])) for s in traj)
        assert worst <= radius + 1e-9

    def test_speed_scaling_invariance(self, consts):
        sp = preset("straight")
        r1 = flapping_bound(sp, (0.0, TWO_PI), consts)

        class Doubled:
            def sample(self, t):
                c, cd = sp.sample(2.0 * t)
                return c, ShapeVelocity(2.0 * cd.coeffs)

        r2 = flapping_bound(Doubled(), (0.0, 0.5 * TWO_PI), consts)
        assert r2 == pytest.approx(r1, rel=1e-3)
