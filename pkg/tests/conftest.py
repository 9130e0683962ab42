"""Shared fixtures: representative problem configurations."""

import pytest

from lubgap import GapProfile, ProblemParams


@pytest.fixture
def prof3d():
    return GapProfile(
        kind="m-convex", m=2.0, s=0.0, eps=1e-3, r=0.5, R=2.0, dimension=3
    )


@pytest.fixture
def params3d(prof3d):
    return ProblemParams(
        profile=prof3d, mu=1.0, U=(0.3, -0.2, -0.5), omega=(0.15, 0.2, 0.1)
    )


@pytest.fixture
def prof2d():
    return GapProfile(
        kind="m-convex", m=2.0, s=0.0, eps=1e-3, r=0.5, R=2.0, dimension=2
    )


@pytest.fixture
def params2d(prof2d):
    return ProblemParams(profile=prof2d, mu=1.0, U=(0.4, -0.3), omega=0.25)


@pytest.fixture
def prof3d_flat():
    return GapProfile(
        kind="flat-capped", m=2.0, s=0.1, eps=1e-3, r=0.5, R=2.0, dimension=3
    )


@pytest.fixture
def params3d_flat(prof3d_flat):
    return ProblemParams(
        profile=prof3d_flat, mu=1.0, U=(0.3, -0.2, -0.5), omega=(0.15, 0.2, 0.1)
    )
