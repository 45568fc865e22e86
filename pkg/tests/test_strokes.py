import math

import numpy as np
import pytest

from amoeba import ShapeCoefficients, constraint_F, in_domain_D, norm_T
from amoeba.errors import UnknownPreset
from amoeba.strokes import Const, Linear, StrokeProgram, preset


class TestStraightPreset:
    def test_closed_form_samples(self):
        sp = preset("straight")
        for t in (0.0, 0.3, 1.7, 4.9):
            c, cd = sp.sample(t)
            assert c.a[0] == pytest.approx(0.5 * math.cos(t), abs=1e-15)
            assert c.a[1] == pytest.approx((0.5 / math.sqrt(2.0)) * math.sin(t), abs=1e-15)
            assert np.abs(c.b).max() == 0.0
            assert np.abs(c.coeffs[2:]).max() == 0.0
            assert cd.a[0] == pytest.approx(-0.5 * math.sin(t), abs=1e-15)

    def test_default_radius(self):
        sp = preset("straight")
        assert sp.mu == 0.5

    def test_periodicity(self):
        sp = preset("straight")
        c0, cd0 = sp.sample(0.8)
        c1, cd1 = sp.sample(0.8 + 2.0 * math.pi)
        assert np.abs(c0.coeffs - c1.coeffs).max() < 1e-14
        assert np.abs(cd0.coeffs - cd1.coeffs).max() < 1e-14

    def test_stays_embedded(self):
        sp = preset("straight")
        for t in np.linspace(0.0, 2 * math.pi, 64):
            c, _ = sp.sample(float(t))
            assert in_domain_D(c)


class TestAllPresets:
    names = ("straight", "circular", "pair34", "pair56",
             "moonwalk_base", "moonwalk_reverse")

    @pytest.mark.parametrize("name", names)
    def test_sphere_radius_exact(self, name):
        sp = preset(name, omega=50.0)
        for t in np.linspace(0.0, 9.0, 40):
            c, _ = sp.sample(float(t))
            assert norm_T(c) == pytest.approx(sp.mu, abs=1e-14)

    @pytest.mark.parametrize("name", names)
    def test_angular_constraint(self, name):
        sp = preset(name, omega=50.0)
        for t in np.linspace(0.0, 9.0, 40):
            c, cd = sp.sample(float(t))
            assert abs(constraint_F(c, cd)) < 1e-10

    @pytest.mark.parametrize("name", names)
    def test_velocity_matches_fd(self, name):
        sp = preset(name, omega=20.0)
        h = 1e-6
        for t in (0.4, 2.2, 5.3):
            _, cd = sp.sample(t)
            cm, _ = sp.sample(t - h)
            cp, _ = sp.sample(t + h)
            fd = (cp.coeffs - cm.coeffs) / (2.0 * h)
            assert np.abs(cd.coeffs - fd).max() < 1e-7

    @pytest.mark.parametrize("name", names)
    def test_batch_matches_scalar(self, name):
        sp = preset(name, omega=20.0)
        ts = np.linspace(0.0, 7.0, 23)
        cb, cdb = sp.sample_batch(ts)
        for i, t in enumerate(ts):
            c, cd = sp.clone().sample(float(t))
            assert np.abs(cb[i] - c.reals).max() < 1e-12
            assert np.abs(cdb[i] - cd.reals).max() < 1e-12

    def test_unknown_name(self):
        with pytest.raises(UnknownPreset):
            preset("sidestroke")


class TestSteeredPresets:
    def test_circular_only_two_modes_active(self):
        sp = preset("circular", h1=1.0)
        for t in (0.5, 3.0, 11.0):
            c, _ = sp.sample(t)
            assert np.abs(c.coeffs[2:]).max() < 1e-14

    def test_circular_phases_against_quadrature(self):
        # theta_2 = (h1 mu^2 / 2)(t/2 + sin(2t)/4) in closed form
        sp = preset("circular", h1=1.0, quad_dt=5e-4)
        mu = sp.mu
        for t in (0.7, 4.1, 9.3):
            got = sp._phases(t)
            want2 = 0.5 * mu * mu * (t / 2.0 + math.sin(2 * t) / 4.0)
            want1 = -(mu * mu / 6.0) * (t / 2.0 - math.sin(2 * t) / 4.0)
            assert got[1] == pytest.approx(want2, abs=1e-10)
            assert got[0] == pytest.approx(want1, abs=1e-10)

    def test_pair34_active_modes(self):
        sp = preset("pair34", h2=1.2)
        c, _ = sp.sample(1.3)
        assert np.abs(c.coeffs[[0, 1, 4, 5]]).max() < 1e-14
        assert np.abs(c.coeffs[[2, 3]]).max() > 1e-3

    def test_pair56_active_modes(self):
        sp = preset("pair56", h3=1.0)
        c, _ = sp.sample(1.3)
        assert np.abs(c.coeffs[:4]).max() < 1e-14
        assert np.abs(c.coeffs[[4, 5]]).max() > 1e-3

    def test_random_access_deterministic(self):
        sp = preset("circular", h1=1.3)
        late = sp.sample(8.0)[0]
        early = sp.sample(2.0)[0]
        fresh = preset("circular", h1=1.3)
        assert np.abs(fresh.sample(2.0)[0].coeffs - early.coeffs).max() < 1e-15
        assert np.abs(fresh.sample(8.0)[0].coeffs - late.coeffs).max() < 1e-15


class TestMoonwalkPair:
    def test_shared_slow_controls(self):
        base = preset("moonwalk_base")
        rev = preset("moonwalk_reverse", omega=100.0)
        for i in range(4):
            assert base.alpha[i](1.23) == rev.alpha[i](1.23)
        assert base.alpha[4](1.0) == 0.0
        assert rev.alpha[4](1.0) == -100.0

    def test_gap_only_in_fast_pair(self):
        base = preset("moonwalk_base")
        rev = preset("moonwalk_reverse", omega=100.0)
        c0, _ = base.sample(0.9)
        c1, _ = rev.sample(0.9)
        assert np.abs(c0.coeffs[:4] - c1.coeffs[:4]).max() < 1e-15
        assert np.abs(c0.coeffs[4:] - c1.coeffs[4:]).max() > 1e-5


class TestTimeFunctions:
    def test_const(self):
        f = Const(2.5)
        assert f(10.0) == 2.5 and f.deriv(10.0) == 0.0

    def test_linear(self):
        f = Linear(3.0, offset=1.0)
        assert f(2.0) == 7.0 and f.deriv(2.0) == 3.0

    def test_custom_callable_fd(self):
        sp = StrokeProgram(mu=0.4, alpha=(lambda t: math.sin(t), 0, 0, 0, 0),
                           h=(0, 0, 0))
        c, cd = sp.sample(0.6)
        # a1 = mu cos(sin t); da1/dt = mu * -sin(sin t) * cos t
        want = -0.4 * math.sin(math.sin(0.6)) * math.cos(0.6)
        assert cd.a[0] == pytest.approx(want, abs=1e-7)

    def test_bad_lengths(self):
        with pytest.raises(ValueError):
            StrokeProgram(mu=0.5, alpha=(0, 0), h=(0, 0, 0))
