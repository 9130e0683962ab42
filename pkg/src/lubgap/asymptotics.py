"""Closed-form blow-up expansions of the hydrodynamic force and torque.

For each supported geometry the force/torque components are given as
asymptotic expansions in the gap width ``eps``: explicitly known singular
terms, plus either a plain O(1) remainder or a *sandwich residual* whose
next singular term is only pinned between explicit lower and upper
expansions (rotation-driven contributions in 3D).

Conventions:

* All expansions are for the force/torque exerted on the upper particle,
  with the torque taken about its centroid.
* The sandwich inequalities are established under the sign normalization
  ``U3 <= 0``, ``omega_i >= 0``.  When the supplied motion violates it the
  interval residuals are dropped (the known terms remain valid) and a
  warning is recorded on the result and emitted via :mod:`warnings`.
* Flat-capped expansions require the cap hypothesis ``s < (sqrt(2)-1) r``;
  pass ``override_flat_hypothesis=True`` to evaluate outside the proven
  range (with a warning).

The printed torque sandwich builders for the 3D flat cap omit the
viscosity factor present in every other coefficient of the family; it is
restored here (all coefficients scale linearly in ``mu``).
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .fields import ProblemParams
from .special import AsymptoticExpansion, AsymptoticTerm, IntervalResidual, gamma_coeff

__all__ = [
    "CoefficientSet",
    "TheoremResult",
    "force_asymptotic_3d",
    "force_asymptotic_3d_flat",
    "force_asymptotic_2d",
    "force_asymptotic_2d_flat",
    "force_asymptotic",
    "fit_exponent",
]


@dataclass(frozen=True)
class CoefficientSet:
    """Named closed-form coefficients entering one expansion family."""

    entries: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    def __getitem__(self, name: str) -> float:
        for key, value in self.entries:
            if key == name:
                return value
        raise KeyError(name)

    def as_dict(self) -> dict:
        return dict(self.entries)


@dataclass(frozen=True)
class TheoremResult:
    """Asymptotic force/torque expansions for one configuration.

    ``F`` holds one expansion per force component; ``T`` holds three
    expansions in 3D and a single one in 2D (scalar torque).
    """

    F: tuple
    T: tuple | AsymptoticExpansion
    coefficients: CoefficientSet
    warnings: tuple = ()


def _terms(*pairs) -> tuple:
    """Build terms from (coeff, power) or (coeff, "log") pairs, dropping
    exact zeros so that empty components stay empty."""
    out = []
    for coeff, power in pairs:
        if coeff == 0.0:
            continue
        if power == "log":
            out.append(AsymptoticTerm(float(coeff), is_log=True))
        else:
            out.append(AsymptoticTerm(float(coeff), power=float(power)))
    return tuple(out)


def _interval(lower_pairs, upper_pairs, keep: bool) -> IntervalResidual | None:
    if not keep:
        return None
    lo, up = _terms(*lower_pairs), _terms(*upper_pairs)
    if not lo and not up:
        return None
    return IntervalResidual(lo, up)


def _sign_normalized(params: ProblemParams) -> tuple[bool, tuple]:
    """Check the sandwich sign hypothesis; return (ok, warnings)."""
    if params.profile.dimension == 3:
        U3 = params.U[2]
        bad = U3 > 0.0 or min(params.omega) < 0.0
    else:
        bad = params.omega < 0.0
    if bad:
        msg = (
            "motion violates the sign normalization (U3 <= 0, omega >= 0); "
            "interval residuals are suppressed, known terms remain valid"
        )
        _warnings.warn(msg, stacklevel=3)
        return False, (msg,)
    return True, ()


def force_asymptotic_3d(params: ProblemParams) -> TheoremResult:
    """Blow-up expansion for a 3D profile ``h = eps + |x'|^m``.

    For ``m = 2`` the shear terms are logarithmic; for ``m > 2`` they decay
    as ``eps^-(1-2/m)`` and an extra rotation term ``eps^-(2-4/m)`` appears
    in the horizontal force components.  The rotation-driven leading terms
    at ``eps^-(3-4/m)`` are sandwich residuals.
    """
    prof = params.profile
    if prof.dimension != 3 or prof.kind != "m-convex":
        raise ValueError("requires a 3D m-convex profile")
    mu, r, R, m = params.mu, prof.r, prof.R, prof.m
    U1, U2, U3 = params.U
    w1, w2, _w3 = params.omega

    a12 = 2.0 * np.pi * mu * gamma_coeff(1, 2, m)
    a34 = 1.5 * np.pi * mu * gamma_coeff(3, 4, m)
    b1 = (
        (3.0 / 16.0)
        * np.pi
        * mu
        * gamma_coeff(3, 4, m)
        * (1.0 - 2.0 ** (m / 2.0 + 2.0) * R * r ** (m - 2.0) + 2.0 ** (-2.0 * m) * r ** (2.0 * m - 2.0))
    )
    b2 = (
        3.0
        * np.pi
        * mu
        * gamma_coeff(3, 4, m)
        * (1.0 - 2.0 ** (-m) * R * r ** (m - 2.0) + 2.0 ** (m - 2.0) * r ** (2.0 * m - 2.0))
    )
    coeffs = CoefficientSet(
        (("alpha12", a12), ("alpha34", a34), ("beta1", b1), ("beta2", b2))
    )
    cu1 = U1 - w2 * R
    cu2 = U2 + w1 * R
    keep, warns = _sign_normalized(params)

    p3 = 3.0 - 4.0 / m
    if m == 2.0:
        shear_pow = "log"
        p1_coeff = 1.0
        lo1, up1 = 0.25 * r**2, 2.0 * r**2
    else:
        shear_pow = 1.0 - 2.0 / m
        p1_coeff = 1.0
        lo1, up1 = 2.0 ** (-m) * r**m, 2.0 ** (m / 2.0) * r**m

    def shear_terms(coeff):
        return ((coeff * p1_coeff, shear_pow),)

    extra_F1 = () if m == 2.0 else ((w2 * a34, 2.0 - 4.0 / m),)
    extra_F2 = () if m == 2.0 else ((-w1 * a34, 2.0 - 4.0 / m),)

    F1 = AsymptoticExpansion(
        _terms(*shear_terms(-cu1 * a12), *extra_F1),
        _interval([(w2 * lo1 * a34, p3)], [(w2 * up1 * a34, p3)], keep),
    )
    F2 = AsymptoticExpansion(
        _terms(*shear_terms(-cu2 * a12), *extra_F2),
        _interval([(-w1 * up1 * a34, p3)], [(-w1 * lo1 * a34, p3)], keep),
    )
    F3 = AsymptoticExpansion(
        _terms((-2.0 * U3 * a34, p3)),
        _interval(
            [((w1 + w2) * r * a34, p3)], [(2.0 * (w1 + w2) * r * a34, p3)], keep
        ),
    )
    T1 = AsymptoticExpansion(
        _terms(*shear_terms(-R * cu2 * a12)),
        _interval([(w1 * r**2 * b1, p3)], [(w1 * r**2 * b2, p3)], keep),
    )
    T2 = AsymptoticExpansion(
        _terms(*shear_terms(R * cu1 * a12)),
        _interval([(w2 * r**2 * b1, p3)], [(w2 * r**2 * b2, p3)], keep),
    )
    T3 = AsymptoticExpansion(())
    return TheoremResult((F1, F2, F3), (T1, T2, T3), coeffs, warns)


def force_asymptotic_3d_flat(
    params: ProblemParams, override_flat_hypothesis: bool = False
) -> TheoremResult:
    """Blow-up expansion for a 3D flat-capped profile (cap radius ``s``).

    The shear bracket ``|ln eps| + 2 s G11 eps^-1/2 + s^2 eps^-1`` appears
    in the horizontal forces and torques; the squeeze force reaches
    ``eps^-3``.  Requires ``s < (sqrt(2)-1) r`` unless overridden.
    """
    prof = params.profile
    if prof.dimension != 3 or prof.kind != "flat-capped":
        raise ValueError("requires a 3D flat-capped profile")
    prof.check_flat_hypothesis(override_flat_hypothesis)
    mu, r, R, s = params.mu, prof.r, prof.R, prof.s
    U1, U2, U3 = params.U
    w1, w2, _w3 = params.omega

    G11 = gamma_coeff(1, 1, 2)
    G21 = gamma_coeff(2, 1, 2)
    G32 = gamma_coeff(3, 2, 2)
    pim = np.pi * mu
    coeffs = CoefficientSet(
        (
            ("B1_1", (3.0 / 16.0) * pim * (r - s) ** 2),
            ("B1_3", (3.0 / 16.0) * pim * (r - s) ** 2 * s**4),
            ("B2_1", (3.0 / 4.0) * pim * (2.0 * r - s) ** 2),
            ("B2_3", (3.0 / 4.0) * pim * (2.0 * r - s) ** 2 * 2.0 * s**4),
            ("C1_1", (3.0 / 4.0) * pim * (r + s)),
            ("C1_3", (3.0 / 4.0) * pim * (r + s) * s**4),
            ("C2_1", (3.0 / 2.0) * pim * r),
            ("C2_3", (3.0 / 2.0) * pim * r * 2.0 * s**4),
            (
                "D1_1",
                (3.0 / 32.0)
                * pim
                * (-4.0 * R * (np.sqrt(2.0) * r - s) ** 2 + (r + s) ** 2 + (r - s) ** 4 / 16.0),
            ),
            (
                "D1_3",
                -(3.0 / 16.0)
                * pim
                * s**4
                * (
                    4.0 * R * (np.sqrt(2.0) * r - s) ** 2
                    + (s - r) ** 2
                    - 2.0 * r**2
                    - (r - s) ** 4 / 16.0
                ),
            ),
            (
                "D2_1",
                (3.0 / 8.0)
                * pim
                * (-R * (r - s) ** 2 + 4.0 * r**2 + (np.sqrt(2.0) * r - s) ** 4),
            ),
            (
                "D2_3",
                -(3.0 / 16.0)
                * pim
                * s**4
                * (R * (r - s) ** 2 - 4.0 * r**2 + 2.0 * s**2 - (np.sqrt(2.0) * r - s) ** 4),
            ),
        )
    )
    keep, warns = _sign_normalized(params)

    def bracket(coeff):
        """coeff * (|ln eps| + 2 s G11 / eps^1/2 + s^2 / eps)"""
        return (
            (coeff, "log"),
            (coeff * 2.0 * s * G11, 0.5),
            (coeff * s**2, 1.0),
        )

    def pair(prefix, scale):
        return [(scale * coeffs[prefix + "_1"], 1.0), (scale * coeffs[prefix + "_3"], 3.0)]

    F1 = AsymptoticExpansion(
        _terms(*bracket(-pim * (U1 - w2 * R))),
        _interval(pair("B1", w2), pair("B2", w2), keep),
    )
    F2 = AsymptoticExpansion(
        _terms(*bracket(-pim * (U2 + w1 * R))),
        _interval(
            [(-c, p) for c, p in pair("B2", w1)], [(-c, p) for c, p in pair("B1", w1)], keep
        ),
    )
    G31 = gamma_coeff(3, 1, 2)
    F3 = AsymptoticExpansion(
        _terms(
            (-3.0 * pim * U3 * 0.5, 1.0),
            (-3.0 * pim * U3 * 1.5 * s * G21, 1.5),
            (-3.0 * pim * U3 * 3.0 * s**2 * G32, 2.0),
            (-3.0 * pim * U3 * s**3 * G31, 2.5),
            (-3.0 * pim * U3 * 0.5 * s**4, 3.0),
        ),
        _interval(pair("C1", w1 + w2), pair("C2", w1 + w2), keep),
    )
    T1 = AsymptoticExpansion(
        _terms(*bracket(-pim * R * (U2 + w1 * R))),
        _interval(pair("D1", w1), pair("D2", w1), keep),
    )
    T2 = AsymptoticExpansion(
        _terms(*bracket(pim * R * (U1 - w2 * R))),
        _interval(pair("D1", w2), pair("D2", w2), keep),
    )
    T3 = AsymptoticExpansion(())
    return TheoremResult((F1, F2, F3), (T1, T2, T3), coeffs, warns)


def force_asymptotic_2d(params: ProblemParams) -> TheoremResult:
    """Blow-up expansion for a 2D profile ``h = eps + |x1|^m`` (m > 1).

    The force expansion is exact up to O(1) (no sandwich residuals); the
    torque goes through six regimes in ``m``, with logarithmic marginal
    cases at ``m = 5/3`` and ``m = 3``.  ``m = 3/2`` sits in the low branch.
    """
    prof = params.profile
    if prof.dimension != 2 or prof.kind != "m-convex":
        raise ValueError("requires a 2D m-convex profile")
    mu, r, R, m = params.mu, prof.r, prof.R, prof.m
    U1, U2 = params.U
    w0 = params.omega

    a11 = 2.0 * mu * gamma_coeff(1, 1, m)
    a33 = 3.0 * mu * gamma_coeff(3, 3, m)
    beta = 3.0 * mu * (1.0 + 0.25 * r ** (2.0 * m - 2.0) - R * r ** (m - 2.0)) * gamma_coeff(3, 3, m)
    entries = [("alpha11", a11), ("alpha33", a33), ("beta", beta)]
    cu = U1 + w0 * R
    pshear = 1.0 - 1.0 / m
    psq = 3.0 - 3.0 / m
    pmid = 2.0 - 3.0 / m

    F1_pairs = [(-cu * a11, pshear), (-w0 * r**m * a33, psq)]
    if m > 1.5:
        F1_pairs.append((-w0 * a33, pmid))
    F1 = AsymptoticExpansion(_terms(*F1_pairs))
    F2 = AsymptoticExpansion(_terms((-2.0 * (2.0 * U2 - w0 * r) * a33, psq)))

    tol = 1e-12
    a35 = a13 = 0.0
    if m > 5.0 / 3.0 - tol:
        a35 = 3.0 * mu * gamma_coeff(3, 5, m)
        entries.append(("alpha35", a35))
    if m > 3.0 + tol:
        a13 = (mu / (2.0 * m)) * (
            (18.0 + 3.0 * m) * gamma_coeff(1, 3, m) + 6.0 * m * gamma_coeff(2, 3, m)
        )
        entries.append(("alpha13", a13))

    T_pairs = [(-R * cu * a11, pshear), (w0 * r**2 * beta, psq)]
    if m <= 1.5 + tol:
        pass
    elif abs(m - 5.0 / 3.0) <= tol:
        T_pairs = [
            (-(18.0 / 5.0) * mu * w0, "log"),
            (-R * w0 * a33, 0.2),
            (-R * cu * a11, 0.4),
            (w0 * r**2 * beta, 1.2),
        ]
    elif abs(m - 3.0) <= tol:
        T_pairs = [
            (1.5 * mu * w0, "log"),
            (-R * cu * a11, 2.0 / 3.0),
            (-R * w0 * a33, 1.0),
            (-w0 * a35, 4.0 / 3.0),
            (w0 * r**2 * beta, 2.0),
        ]
    else:
        T_pairs.append((-R * w0 * a33, pmid))
        if m > 5.0 / 3.0:
            T_pairs.append((-w0 * a35, 3.0 - 5.0 / m))
        if m > 3.0:
            T_pairs.append((w0 * a13, 1.0 - 3.0 / m))
    T = AsymptoticExpansion(_terms(*T_pairs))
    return TheoremResult((F1, F2), T, CoefficientSet(tuple(entries)))


def force_asymptotic_2d_flat(
    params: ProblemParams, override_flat_hypothesis: bool = False
) -> TheoremResult:
    """Blow-up expansion for a 2D flat-capped profile (cap half-width ``s``).

    Exact up to O(1): half-integer power ladders up to ``eps^-3`` in force
    and torque, plus a logarithmic torque term.  Requires
    ``s < (sqrt(2)-1) r`` unless overridden.
    """
    prof = params.profile
    if prof.dimension != 2 or prof.kind != "flat-capped":
        raise ValueError("requires a 2D flat-capped profile")
    prof.check_flat_hypothesis(override_flat_hypothesis)
    mu, r, R, s = params.mu, prof.r, prof.R, prof.s
    U1, U2 = params.U
    w0 = params.omega

    G11 = gamma_coeff(1, 1, 2)
    G31 = gamma_coeff(3, 1, 2)
    G33 = gamma_coeff(3, 3, 2)
    G35 = gamma_coeff(3, 5, 2)
    cu = U1 + w0 * R

    a_half = 2.0 * mu * cu * G11 + 3.0 * mu * w0 * G33
    a_1 = 2.0 * mu * cu * s + 3.0 * mu * w0 * s
    a_32 = mu * w0 * (3.0 * (r - s) ** 2 * G33 + 3.0 * s**2 * G31)
    a_2 = mu * w0 * (3.0 * s * (r - s) ** 2 + 2.0 * s**3)
    a_52 = 3.0 * mu * w0 * s**2 * (r - s) ** 2 * G31
    a_3 = 2.0 * mu * w0 * s**3 * (r - s) ** 2
    # The squeeze-type force ladder is exactly -12 mu (2 U2 - w0 r) times the
    # expansion of  int_0^r t^2 / h^3 dt  (cap term s^3/(3 eps^3) plus
    # half-integer annulus moments); every beta shares the 2 U2 - w0 r factor.
    b_32 = 6.0 * mu * (2.0 * U2 - w0 * r) * G33
    b_2 = 6.0 * mu * s * (2.0 * U2 - w0 * r)
    b_52 = 6.0 * mu * s**2 * (2.0 * U2 - w0 * r) * G31
    b_3 = 4.0 * mu * s**3 * (2.0 * U2 - w0 * r)
    g_0 = mu * w0 * s * (4.5 - 3.0 * s**2 - 15.0 * R) - mu * cu * s
    g_half = 2.0 * mu * R * cu * G11 + 0.75 * mu * w0 * (
        (16.0 * R - 7.0) * s**2 * G31 + 4.0 * R * G33 + 4.0 * G35
    )
    g_1 = mu * w0 * s * (3.0 * R - s**2 + 6.0) + 2.0 * mu * R * cu * s
    g_32 = 0.25 * mu * w0 * (
        (12.0 * R * (r - s) ** 2 - 3.0 * (r - s) ** 4 - 12.0 * r**2 + 72.0 * s**2) * G33
        + 12.0 * R * s**2 * G31
    )
    g_2 = 0.25 * mu * w0 * (
        8.0 * s**3 * R - 12.0 * s * r**2 + 24.0 * s**3 + 12.0 * R * s * (r - s) ** 2 - 3.0 * s * (r - s) ** 4
    )
    g_52 = (
        0.25
        * mu
        * w0
        * (-12.0 * s**2 * r**2 + 12.0 * s**4 + 12.0 * R * s**2 * (r - s) ** 2 - 3.0 * s**2 * (r - s) ** 4)
        * G31
    )
    g_3 = 0.1 * mu * w0 * (
        -20.0 * r**2 * s**3 + 12.0 * s**5 + 20.0 * R * s**3 * (r - s) ** 2 - 5.0 * s**3 * (r - s) ** 4
    )
    coeffs = CoefficientSet(
        (
            ("alpha_1/2", a_half),
            ("alpha_1", a_1),
            ("alpha_3/2", a_32),
            ("alpha_2", a_2),
            ("alpha_5/2", a_52),
            ("alpha_3", a_3),
            ("beta_3/2", b_32),
            ("beta_2", b_2),
            ("beta_5/2", b_52),
            ("beta_3", b_3),
            ("gamma_0", g_0),
            ("gamma_1/2", g_half),
            ("gamma_1", g_1),
            ("gamma_3/2", g_32),
            ("gamma_2", g_2),
            ("gamma_5/2", g_52),
            ("gamma_3", g_3),
        )
    )
    F1 = AsymptoticExpansion(
        _terms((-a_half, 0.5), (-a_1, 1.0), (-a_32, 1.5), (-a_2, 2.0), (-a_52, 2.5), (-a_3, 3.0))
    )
    F2 = AsymptoticExpansion(
        _terms((-b_32, 1.5), (-b_2, 2.0), (-b_52, 2.5), (-b_3, 3.0))
    )
    # -gamma0 ln(eps) = +gamma0 |ln eps| for eps < 1
    T = AsymptoticExpansion(
        _terms(
            (g_0, "log"),
            (-g_half, 0.5),
            (-g_1, 1.0),
            (-g_32, 1.5),
            (-g_2, 2.0),
            (-g_52, 2.5),
            (-g_3, 3.0),
        )
    )
    return TheoremResult((F1, F2), T, coeffs)


def force_asymptotic(
    params: ProblemParams, override_flat_hypothesis: bool = False
) -> TheoremResult:
    """Dispatch to the expansion matching the profile's dimension and kind."""
    prof = params.profile
    if prof.dimension == 3:
        if prof.kind == "m-convex":
            return force_asymptotic_3d(params)
        return force_asymptotic_3d_flat(params, override_flat_hypothesis)
    if prof.kind == "m-convex":
        return force_asymptotic_2d(params)
    return force_asymptotic_2d_flat(params, override_flat_hypothesis)


def fit_exponent(eps_values, values) -> float:
    """Least-squares blow-up exponent ``p`` with ``|v| ~ C eps^-p``.

    Fits ``log |v|`` against ``-log eps``; a vanishing sequence (any zero
    value) raises ``ValueError``.
    """
    eps_values = np.asarray(eps_values, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps_values.size != values.size or eps_values.size < 2:
        raise ValueError("need matching sequences of at least two samples")
    if np.any(values == 0.0):
        raise ValueError("cannot fit an exponent through zero values")
    slope, _ = np.polyfit(-np.log(eps_values), np.log(np.abs(values)), 1)
    return float(slope)
