"""Surface traction assembly and numeric force/torque integration."""

import math

import numpy as np
import pytest

from lubgap.fields import ProblemParams, subflow_indices
from lubgap.geometry import GapProfile, surface_sample
from lubgap.traction import (
    force_numeric,
    leading_coefficient,
    total_numeric,
    traction,
)


def mconvex(m=2.0, eps=1e-3, dimension=3, r=0.5, R=2.0):
    return GapProfile(
        kind="m-convex", m=m, s=0.0, eps=eps, r=r, R=R, dimension=dimension
    )


class TestTraction:
    def test_pure_shear_at_apex(self, params3d):
        # at the apex n = (0,0,-1), the A-terms vanish by parity and the
        # shear sub-flow traction reduces to (-mu (U1 - w2 R)/eps, 0, 0)
        prof = params3d.profile
        sp = surface_sample(prof, "top", (0.0, 0.0))
        tr = traction(1, params3d, sp)
        c = params3d.U[0] - params3d.omega[1] * prof.R
        expected = -params3d.mu * c / prof.eps
        assert tr[0] == pytest.approx(expected, rel=1e-12)
        assert abs(tr[1]) <= 1e-12 * abs(expected)
        assert abs(tr[2]) <= 1e-12 * abs(expected)

    def test_linear_in_motion(self, prof3d):
        base = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.3, -0.2, -0.5), omega=(0.15, 0.2, 0.1)
        )
        double = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.6, -0.4, -1.0), omega=(0.3, 0.4, 0.2)
        )
        sp = surface_sample(prof3d, "top", (0.21, -0.13))
        for k in subflow_indices(3):
            t1 = traction(k, base, sp)
            t2 = traction(k, double, sp)
            assert np.max(np.abs(t2 - 2.0 * t1)) <= 1e-11 * max(
                float(np.max(np.abs(t2))), 1e-30
            )

    def test_rigid_mean_not_gap_singular(self):
        # the k=0 interpolant is eps-uniformly smooth: its apex traction
        # stays bounded while the shear sub-flow's grows like 1/eps
        vals = []
        for eps in (1e-3, 1e-4, 1e-5):
            prof = mconvex(eps=eps)
            params = ProblemParams(
                profile=prof, mu=1.0, U=(0.3, -0.2, -0.5), omega=(0.15, 0.2, 0.1)
            )
            sp = surface_sample(prof, "top", (0.0, 0.0))
            vals.append(float(np.max(np.abs(traction(0, params, sp)))))
        assert max(vals) <= 10.0 * min(vals)

    def test_2d(self, params2d):
        sp = surface_sample(params2d.profile, "top", 0.2)
        tr = traction(1, params2d, sp)
        assert tr.shape == (2,)
        assert np.all(np.isfinite(tr))


class TestForceNumeric:
    def test_squeeze_force_value(self):
        # m=2, mu=1, U3=-1, omega=0, r=0.5: F3 = -3*pi*U3*Gamma_34/eps + O(1)
        # with Gamma_34 = 1/2, i.e. about +(3*pi/2)*1e4 at eps = 1e-4 (the
        # approach U3 < 0 is resisted by a positive vertical force)
        prof = mconvex(eps=1e-4)
        params = ProblemParams(
            profile=prof, mu=1.0, U=(0.0, 0.0, -1.0), omega=(0.0, 0.0, 0.0)
        )
        res = force_numeric(3, params)
        assert res.F[2] == pytest.approx(1.5 * math.pi * 1e4, rel=1e-2)
        assert abs(res.F[0]) <= 1e-8 * abs(res.F[2])
        assert abs(res.F[1]) <= 1e-8 * abs(res.F[2])

    def test_zero_motion_zero_force(self, prof3d):
        params = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.0, 0.0, 0.0), omega=(0.0, 0.0, 0.0)
        )
        for k in subflow_indices(3):
            res = force_numeric(k, params)
            assert np.all(res.F == 0.0)
            assert np.all(np.asarray(res.T) == 0.0)

    def test_error_estimates_nonnegative(self, params3d, params2d):
        for params in (params3d, params2d):
            for k in subflow_indices(params.profile.dimension):
                res = force_numeric(k, params)
                assert np.all(np.asarray(res.F_err) >= 0.0)
                assert np.all(np.asarray(res.T_err) >= 0.0)
                assert np.all(np.isfinite(res.F))

    def test_invalid_subflow(self, params2d):
        with pytest.raises(ValueError):
            force_numeric(6, params2d)

    def test_shear_parity_zeros(self):
        # k=1: F2, F3, T1, T3 stay bounded across a decade of gap widths
        # while F1 grows like the log moment
        f1 = []
        others = []
        for eps in (1e-3, 1e-4):
            prof = mconvex(eps=eps)
            params = ProblemParams(
                profile=prof, mu=1.0, U=(1.0, 0.0, 0.0), omega=(0.0, 0.0, 0.0)
            )
            res = force_numeric(1, params)
            f1.append(abs(float(res.F[0])))
            others.append(
                max(
                    abs(float(res.F[1])),
                    abs(float(res.F[2])),
                    abs(float(res.T[0])),
                    abs(float(res.T[2])),
                )
            )
        # log growth: |ln 1e-4| / |ln 1e-3| = 4/3
        assert f1[1] > 1.25 * f1[0]
        assert max(others) <= 1e-6 * f1[0]

    def test_squeeze_exponent_m3(self):
        # |F3| ~ eps^-(3 - 4/m): slope -(5/3) for m = 3
        eps = (1e-3, 1e-4)
        vals = []
        for e in eps:
            prof = mconvex(m=3.0, eps=e)
            params = ProblemParams(
                profile=prof, mu=1.0, U=(0.0, 0.0, -1.0), omega=(0.0, 0.0, 0.0)
            )
            vals.append(abs(float(force_numeric(3, params).F[2])))
        slope = (math.log(vals[1]) - math.log(vals[0])) / (
            math.log(eps[1]) - math.log(eps[0])
        )
        assert slope == pytest.approx(-(3.0 - 4.0 / 3.0), abs=0.03)

    def test_2d_squeeze_torque_scalar(self, params2d):
        res = force_numeric(2, params2d)
        assert np.isscalar(res.T) or np.ndim(res.T) == 0
        assert res.F.shape == (2,)


class TestTotalNumeric:
    def test_superposition(self, prof3d):
        U = (0.3, -0.2, -0.5)
        w = (0.15, 0.2, 0.1)
        both = total_numeric(ProblemParams(profile=prof3d, mu=1.0, U=U, omega=w))
        only_u = total_numeric(
            ProblemParams(profile=prof3d, mu=1.0, U=U, omega=(0.0, 0.0, 0.0))
        )
        only_w = total_numeric(
            ProblemParams(profile=prof3d, mu=1.0, U=(0.0, 0.0, 0.0), omega=w)
        )
        tol_F = both.F_err + only_u.F_err + only_w.F_err
        assert np.all(np.abs(both.F - only_u.F - only_w.F) <= tol_F + 1e-10)
        tol_T = both.T_err + only_u.T_err + only_w.T_err
        assert np.all(np.abs(both.T - only_u.T - only_w.T) <= tol_T + 1e-10)

    def test_per_subflow_sums_to_total(self, params2d):
        res = total_numeric(params2d)
        assert set(res.per_subflow) == set(subflow_indices(2))
        F = np.sum([r.F for r in res.per_subflow.values()], axis=0)
        assert np.max(np.abs(F - res.F)) <= 1e-12 * max(float(np.max(np.abs(F))), 1e-30)


class TestLeadingCoefficient:
    def test_power_model_exact(self):
        c, d, a = 3.7, -1.2, 1.5
        v = lambda e: c * e ** (-a) + d
        got = leading_coefficient(v(1e-3), v(1e-4), 1e-3, 1e-4, power=a)
        assert got == pytest.approx(c, rel=1e-12)

    def test_log_model_exact(self):
        c, d = -2.25, 0.4
        v = lambda e: c * abs(math.log(e)) + d
        got = leading_coefficient(v(1e-2), v(1e-5), 1e-2, 1e-5, is_log=True)
        assert got == pytest.approx(c, rel=1e-12)

    def test_equal_eps_rejected(self):
        with pytest.raises(ValueError):
            leading_coefficient(1.0, 2.0, 1e-3, 1e-3, power=1.0)
