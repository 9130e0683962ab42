"""Energy functional, dual test tensors, and the error bilinear form."""

import numpy as np
import pytest

from lubgap.asymptotics import fit_exponent
from lubgap.dualcheck import EllReport, dual_tensor, ell, energy, err_sweep
from lubgap.fields import ProblemParams
from lubgap.geometry import GapProfile
from lubgap.quadrature import QuadSpec

RNG_SEED = 90812


def core_points(prof, n, rng):
    """Random points of the core region {|x'| < r/4, |x3| < h/2}."""
    pts = []
    for _ in range(n):
        t = 0.9 * 0.25 * prof.r * np.sqrt(rng.uniform())
        th = rng.uniform(0.0, 2.0 * np.pi)
        x1, x2 = t * np.cos(th), t * np.sin(th)
        h = float(prof.h(x1, x2))
        pts.append((x1, x2, rng.uniform(-0.45, 0.45) * h))
    return pts


def squeeze_params(prof):
    return ProblemParams(
        profile=prof, mu=1.0, U=(0.0, 0.0, -1.0), omega=(0.0, 0.0, 0.0)
    )


def fd_divergence(k, params, x, step):
    """Divergence of the dual tensor by central differences; (value, scale)."""
    div = np.zeros(3)
    scale = 0.0
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = step
        sp = dual_tensor(k, params, np.asarray(x) + dx)
        sm = dual_tensor(k, params, np.asarray(x) - dx)
        grad_j = (sp - sm) / (2.0 * step)
        div += grad_j[j, :]
        scale = max(scale, float(np.max(np.abs(grad_j))))
    return div, scale


class TestDualTensor:
    def test_zero_subflows(self, params3d):
        rng = np.random.default_rng(RNG_SEED)
        for k in (0, 4, 5):
            for x in core_points(params3d.profile, 5, rng):
                assert np.all(dual_tensor(k, params3d, x) == 0.0)

    def test_symmetry(self, params3d):
        rng = np.random.default_rng(RNG_SEED + 1)
        for k in (1, 2, 3, 6):
            for x in core_points(params3d.profile, 5, rng):
                S = dual_tensor(k, params3d, x)
                assert np.max(np.abs(S - S.T)) == 0.0

    def test_zero_outside_core(self, params3d):
        prof = params3d.profile
        x = (0.3 * prof.r, 0.0, 0.0)  # |x'| > r/4
        for k in (1, 2, 3, 6):
            assert np.all(dual_tensor(k, params3d, x) == 0.0)

    def test_shear_matrix_midplane(self, params3d):
        # k=1 at x3 = 0: only the (1,3) shear entry mu (U1 - w2 R) / h
        prof = params3d.profile
        c = params3d.U[0] - params3d.omega[1] * prof.R
        for x1, x2 in ((0.05, 0.02), (-0.08, 0.06)):
            h = float(prof.h(x1, x2))
            S = dual_tensor(1, params3d, (x1, x2, 0.0))
            assert S[0, 2] == pytest.approx(params3d.mu * c / h, rel=1e-12)
            assert np.all(np.diag(S) == 0.0)
            assert S[0, 1] == 0.0
            assert S[1, 2] == 0.0

    def test_squeeze_divergence_free(self, prof3d):
        params = squeeze_params(prof3d)
        rng = np.random.default_rng(RNG_SEED + 2)
        step = 1e-5 * prof3d.r
        for x in core_points(prof3d, 10, rng):
            div, scale = fd_divergence(3, params, x, step)
            assert np.max(np.abs(div)) <= 1e-4 * scale

    def test_rotation_divergence_residual(self, prof3d):
        # the rotation tensor's divergence keeps an x3-independent
        # horizontal cross term (the same term that survives in the
        # pressure balance); the vertical component still closes
        params = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.0, 0.0, 0.0), omega=(0.15, 0.2, 0.0)
        )
        step = 1e-5 * prof3d.r
        x = (0.05, 0.03, 0.0002)
        div, scale = fd_divergence(6, params, x, step)
        assert abs(div[2]) <= 1e-4 * scale
        assert max(abs(div[0]), abs(div[1])) > 1e-4 * scale

    def test_2d_rejected(self, params2d):
        with pytest.raises(ValueError):
            dual_tensor(1, params2d, (0.05, 0.0, 0.0))

    def test_unknown_subflow(self, params3d):
        with pytest.raises(ValueError):
            dual_tensor(9, params3d, (0.05, 0.0, 0.0))


class TestEll:
    def test_symmetry(self, params3d):
        assert ell(1, 2, params3d) == pytest.approx(ell(2, 1, params3d), rel=1e-12)

    def test_diagonal_nonnegative(self, params3d):
        for i in (1, 2, 3, 6):
            assert ell(i, i, params3d) >= 0.0

    def test_cauchy_schwarz(self, params3d):
        pairs = ((1, 2), (1, 3), (2, 6))
        diag = {i: ell(i, i, params3d) for i in (1, 2, 3, 6)}
        for i, j in pairs:
            cross = ell(i, j, params3d)
            assert cross * cross <= diag[i] * diag[j] * (1.0 + 1e-6) + 1e-15

    def test_zero_motion_short_circuits(self, prof3d):
        params = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.0, 0.0, 0.0), omega=(0.0, 0.0, 0.0)
        )
        for i in (1, 2, 3, 6):
            assert ell(i, i, params) == 0.0

    def test_2d_rejected(self, params2d):
        with pytest.raises(ValueError):
            ell(1, 1, params2d)


class TestEnergy:
    def test_zero_motion(self, prof3d):
        params = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.0, 0.0, 0.0), omega=(0.0, 0.0, 0.0)
        )
        assert energy(params) == 0.0

    def test_quadratic_scaling(self, prof3d):
        base = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.3, -0.2, -0.5), omega=(0.15, 0.2, 0.1)
        )
        double = ProblemParams(
            profile=prof3d, mu=1.0, U=(0.6, -0.4, -1.0), omega=(0.3, 0.4, 0.2)
        )
        assert energy(double) == pytest.approx(4.0 * energy(base), rel=1e-8)

    def test_squeeze_blowup_slope(self):
        # squeeze-only energy grows like 1/eps as the gap closes
        eps_grid = (1e-2, 1e-3, 1e-4)
        vals = []
        for e in eps_grid:
            prof = GapProfile(
                kind="m-convex", m=2.0, s=0.0, eps=e, r=0.5, R=2.0, dimension=3
            )
            vals.append(energy(squeeze_params(prof)))
        slope = fit_exponent(eps_grid, vals)
        assert slope == pytest.approx(1.0, abs=0.05)

    def test_2d_rejected(self, params2d):
        with pytest.raises(ValueError):
            energy(params2d)


class TestErrSweep:
    def test_report_structure(self, prof3d):
        params = squeeze_params(prof3d)  # only the squeeze sub-flow active
        spec = QuadSpec(rel_tol=1e-6, abs_tol=1e-12)
        rep = err_sweep(params, (1e-2, 1e-3, 1e-4), spec)
        assert rep.eps_grid == (1e-2, 1e-3, 1e-4)
        assert rep.pairs == ((3, 3),)
        assert len(rep.values[(3, 3)]) == 3
        assert all(v >= 0.0 for v in rep.values[(3, 3)])
        assert (3, 3) in rep.slopes

    def test_grid_validation(self, params3d):
        with pytest.raises(ValueError):
            err_sweep(params3d, (1e-2, 1e-3))
        with pytest.raises(ValueError):
            err_sweep(params3d, (1e-2, 1e-2, 1e-3))
        with pytest.raises(ValueError):
            err_sweep(params3d, (1e-2, 8e-3, 5e-3))

    def test_report_rejects_increasing_grid(self):
        with pytest.raises(ValueError):
            EllReport(
                pairs=((1, 1),),
                eps_grid=(1e-4, 1e-3, 1e-2),
                values={(1, 1): (1.0, 1.0, 1.0)},
                slopes={(1, 1): 0.0},
                violations=(),
            )
