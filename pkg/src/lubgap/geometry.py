"""Gap geometry: profiles, gap function, and surface parametrization.

Two nearly touching rigid particles are placed symmetrically about the
midplane ``x3 = 0``; through the gap region the top particle's boundary is

    x3 = eps/2 + |x'|^m / 2            (m-convex)
    x3 = eps/2                          for |x'| <= s,
         eps/2 + (|x'| - s)^2 / 2       for s < |x'| <= r   (flat-capped)

and the bottom boundary is its mirror image.  The vertical distance between
the boundaries is the gap function ``h``; the top particle's centroid sits
at ``(0', eps/2 + R)``, so the lever arm of a top surface point is
``nu = (x1, x2, (h - eps)/2 - R)``.  The 2D profiles are the single-variable
analogues with coordinate ``x1`` and vertical coordinate ``x2``.

Profile objects are immutable; all evaluators accept scalars or numpy
arrays and are pure functions of their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = ["GapProfile", "SurfacePoint", "gap", "surface_sample", "FlatHypothesisError"]

_SQRT2M1 = np.sqrt(2.0) - 1.0


class FlatHypothesisError(ValueError):
    """Flat radius violates the s < (sqrt(2)-1) r hypothesis of the flat asymptotics."""


@dataclass(frozen=True)
class GapProfile:
    """Geometry of the near-contact region.

    Parameters
    ----------
    dimension : 2 or 3
    kind : "m-convex" or "flat-capped"
    m : profile exponent; >= 2 in 3D, > 1 in 2D.  Flat-capped profiles use
        a parabolic (m = 2) curved part; ``m`` is forced to 2 there.
    r : radius of the gap region.
    s : flat-cap radius (flat-capped only; 0 otherwise).
    eps : interparticle distance at closest approach.
    R : distance from the contact plane to the particle centroid.
    """

    dimension: int
    kind: Literal["m-convex", "flat-capped"]
    m: float
    r: float
    s: float
    eps: float
    R: float

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        if self.kind not in ("m-convex", "flat-capped"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.eps <= 0.0 or self.r <= 0.0 or self.R <= 0.0:
            raise ValueError("eps, r, R must be positive")
        if self.kind == "m-convex":
            if self.dimension == 3 and self.m < 2.0:
                raise ValueError("3D profiles require m >= 2")
            if self.dimension == 2 and self.m <= 1.0:
                raise ValueError("2D profiles require m > 1")
            if self.s != 0.0:
                raise ValueError("m-convex profiles have no flat radius")
        else:
            object.__setattr__(self, "m", 2.0)
            if not 0.0 < self.s < self.r:
                raise ValueError("flat-capped profiles require 0 < s < r")

    @classmethod
    def m_convex(cls, dimension: int, m: float, r: float, eps: float, R: float) -> "GapProfile":
        return cls(dimension, "m-convex", m, r, 0.0, eps, R)

    @classmethod
    def flat_capped(cls, dimension: int, r: float, s: float, eps: float, R: float) -> "GapProfile":
        return cls(dimension, "flat-capped", 2.0, r, s, eps, R)

    # -- scalar/array evaluators of the radial profile ---------------------

    def check_flat_hypothesis(self, override: bool = False) -> None:
        """Validate ``s < (sqrt(2)-1) r`` required by the flat asymptotics."""
        if self.kind != "flat-capped":
            return
        if self.s >= _SQRT2M1 * self.r:
            if override:
                import warnings

                warnings.warn(
                    f"flat radius s={self.s} >= (sqrt(2)-1)r={_SQRT2M1 * self.r:.6g}; "
                    "flat asymptotics are outside their proven range",
                    stacklevel=2,
                )
            else:
                raise FlatHypothesisError(
                    f"s={self.s} violates s < (sqrt(2)-1) r = {_SQRT2M1 * self.r:.6g}"
                )

    def h_radial(self, rho):
        """Gap as a function of the radial coordinate ``rho = |x'| >= 0``."""
        rho = np.abs(rho)
        if self.kind == "m-convex":
            return self.eps + rho**self.m
        return self.eps + np.square(np.maximum(rho - self.s, 0.0))

    def dh_radial(self, rho):
        """d h / d rho (one-sided limit from the flat side at rho = s)."""
        rho = np.abs(rho)
        if self.kind == "m-convex":
            return self.m * rho ** (self.m - 1.0)
        return 2.0 * np.maximum(rho - self.s, 0.0)

    def boundary_layer_scale(self) -> float:
        """Radial scale ``eps^(1/m)`` over which the gap doubles."""
        return self.eps ** (1.0 / self.m)

    def radial_splits(self) -> tuple[float, ...]:
        """Quadrature breakpoints: the boundary-layer scale, and ``s``."""
        pts = [p for p in (self.boundary_layer_scale(), self.s) if 0.0 < p < self.r]
        return tuple(sorted(set(pts)))

    # -- planar partial derivatives of h (3D) ------------------------------

    def h(self, x1, x2=None):
        if self.dimension == 2:
            return self.h_radial(x1)
        return self.h_radial(np.hypot(x1, x2))

    def h_grad(self, x1, x2):
        """(d1 h, d2 h) for a 3D profile; smooth limits at the origin."""
        rho = np.hypot(x1, x2)
        if self.kind == "m-convex":
            fac = self.m * _safe_pow(rho, self.m - 2.0)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                fac = np.where(rho > self.s, 2.0 * (rho - self.s) / np.where(rho > 0, rho, 1.0), 0.0)
        return fac * x1, fac * x2

    def h_hess(self, x1, x2):
        """(d11 h, d12 h, d22 h) for a 3D profile."""
        rho = np.hypot(x1, x2)
        if self.kind == "m-convex":
            a = self.m * _safe_pow(rho, self.m - 2.0)
            b = self.m * (self.m - 2.0) * _safe_pow(rho, self.m - 4.0)
            return a + b * x1 * x1, b * x1 * x2, a + b * x2 * x2
        inside = rho <= self.s
        with np.errstate(divide="ignore", invalid="ignore"):
            rho_safe = np.where(rho > 0, rho, 1.0)
            a = 2.0 * (1.0 - self.s / rho_safe)
            b = 2.0 * self.s / rho_safe**3
        h11 = np.where(inside, 0.0, a + b * x1 * x1)
        h12 = np.where(inside, 0.0, b * x1 * x2)
        h22 = np.where(inside, 0.0, a + b * x2 * x2)
        return h11, h12, h22

    # -- 2D derivatives -----------------------------------------------------

    def dh(self, x1):
        """d h / d x1 for a 2D profile (odd; 0 at the origin)."""
        if self.kind == "m-convex":
            return self.m * _safe_pow(np.abs(x1), self.m - 1.0) * np.sign(x1)
        return 2.0 * np.maximum(np.abs(x1) - self.s, 0.0) * np.sign(x1)

    def d2h(self, x1):
        """d2 h / d x1^2 for a 2D profile (even; flat-side limit at |x1|=s)."""
        if self.kind == "m-convex":
            return self.m * (self.m - 1.0) * _safe_pow(np.abs(x1), self.m - 2.0)
        return np.where(np.abs(x1) > self.s, 2.0, 0.0)


def _safe_pow(rho, p):
    """``rho**p`` with the symmetric limit 0^p -> 0 for p>0 and 0 for p<0 at rho=0.

    Negative powers only ever occur multiplied by matching powers of the
    coordinates; the correct symmetric limit of those products is 0, which
    this choice reproduces.
    """
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(rho > 0.0, rho, 1.0) ** p
    return np.where(rho > 0.0, out, 0.0 if p != 0.0 else 1.0)


@dataclass(frozen=True)
class SurfacePoint:
    """A point of the top (or bottom) gap boundary.

    Attributes
    ----------
    xprime : planar coordinates (x1, x2), or scalar x1 in 2D.
    x3 : height of the boundary point (``+h/2`` on top).
    n : unit outward normal of the top particle (points down into the gap,
        vertical component negative).
    nu : lever arm, the point minus the top particle's centroid.
    jac : area element factor dS/dx' = sqrt(1 + |grad x3|^2) >= 1.
    """

    xprime: tuple
    x3: float
    n: tuple
    nu: tuple
    jac: float


def gap(profile: GapProfile, xprime) -> float:
    """Vertical distance between the particle boundaries above ``xprime``."""
    if profile.dimension == 3:
        x1, x2 = xprime
        rho = np.hypot(x1, x2)
    else:
        rho = abs(float(xprime))
        x1 = xprime
    if np.any(rho > profile.r):
        raise ValueError(f"|x'| = {rho} outside the gap region r = {profile.r}")
    return float(profile.h_radial(rho))


def surface_sample(profile: GapProfile, side: str, xprime) -> SurfacePoint:
    """Sample the gap boundary at planar position ``xprime``.

    ``side`` is ``"top"`` or ``"bottom"``; the returned normal is always the
    outward normal of the particle the sampled boundary belongs to (downward
    ``n3 < 0`` on top, upward on bottom), and ``nu`` is the lever arm with
    respect to the top particle's centroid as used by the torque integrals.
    On the flat-cap kink circle ``|x'| = s`` the flat-region (vertical)
    normal is returned, a measure-zero determinism convention.
    """
    if side not in ("top", "bottom"):
        raise ValueError("side must be 'top' or 'bottom'")
    sign = 1.0 if side == "top" else -1.0

    if profile.dimension == 3:
        x1, x2 = (float(v) for v in xprime)
        rho = float(np.hypot(x1, x2))
        if rho > profile.r:
            raise ValueError(f"|x'| = {rho} outside the gap region r = {profile.r}")
        h = float(profile.h_radial(rho))
        dh = float(profile.dh_radial(rho))
        # grad of the surface height h/2; radial direction (x1, x2)/rho
        if rho > 0.0 and not (profile.kind == "flat-capped" and rho <= profile.s):
            g1, g2 = 0.5 * dh * x1 / rho, 0.5 * dh * x2 / rho
        else:
            g1 = g2 = 0.0
        jac = float(np.sqrt(1.0 + g1 * g1 + g2 * g2))
        n = (sign * g1 / jac, sign * g2 / jac, -sign / jac)
        nu3 = 0.5 * (h - profile.eps) - profile.R if side == "top" else None
        if side == "bottom":
            # lever arm is always taken about the top centroid (torque on D1)
            nu3 = -0.5 * (h - profile.eps) - profile.eps - profile.R
        x3 = sign * 0.5 * h
        return SurfacePoint((x1, x2), x3, n, (x1, x2, nu3), jac)

    x1 = float(xprime)
    if abs(x1) > profile.r:
        raise ValueError(f"|x1| = {abs(x1)} outside the gap region r = {profile.r}")
    h = float(profile.h_radial(abs(x1)))
    g1 = 0.5 * float(profile.dh(x1))
    jac = float(np.sqrt(1.0 + g1 * g1))
    n = (sign * g1 / jac, -sign / jac)
    nu2 = 0.5 * (h - profile.eps) - profile.R
    if side == "bottom":
        nu2 = -0.5 * (h - profile.eps) - profile.eps - profile.R
    x2 = sign * 0.5 * h
    return SurfacePoint(x1, x2, n, (x1, nu2), jac)
