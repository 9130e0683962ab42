"""Command-line interface: config-driven computations with stable artifacts.

Subcommands
-----------

``constants``
    Print the two-Gamma coefficient table and the derived per-unit-viscosity
    theorem coefficients for a given convexity exponent ``m``.
``phi``
    Evaluate one gap-moment integral (``phi``, or ``psi`` when a flat radius
    is given) at explicit indices.
``force``
    Compute numeric and/or closed-form forces and torques at the configured
    epsilon (or a ``--eps`` override) and write CSV/JSON reports.
``sweep``
    The same over the config's log-spaced epsilon grid, with fitted blow-up
    exponents.
``verify``
    Run one of the property suites (``bc``, ``div``, ``parity``, ``dual``,
    ``exponents``) and report each check's outcome; any failed check makes
    the exit status 3.

Exit codes: 0 success, 1 configuration error, 2 computation failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import dualcheck
from .asymptotics import fit_exponent, force_asymptotic
from .config import MODES, ConfigError, RunConfig, load_config
from .fields import boundary_target, divergence, eval_field, subflow_indices
from .geometry import FlatHypothesisError, surface_sample
from .quadrature import QuadratureError
from .report import Report, build_report, render_csv, render_json, serialize_ell_report
from .special import TABULATED_PAIRS, ToleranceNotMet, gamma_coeff, phi, psi
from .traction import total_numeric

__all__ = ["main", "cmd_constants", "cmd_force", "cmd_verify", "SUITES"]

SUITES = ("bc", "div", "parity", "dual", "exponents")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_VERIFY = 3


class _UsageError(Exception):
    """Bad command line; reported as a configuration error (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# constants / phi
# ---------------------------------------------------------------------------


def cmd_constants(m: float) -> list[tuple[str, float]]:
    """Coefficient table for exponent ``m``: Gamma pairs plus derived alphas.

    The derived theorem coefficients are reported per unit viscosity
    (``mu = 1``); entries that only exist for part of the ``m`` range (the
    2D torque ladder extras) appear only when defined.
    """
    rows = []
    for i, j in TABULATED_PAIRS:
        try:
            rows.append((f"Gamma({i},{j})", gamma_coeff(i, j, m)))
        except ValueError:
            pass  # pairs below their convergence threshold for this m

    rows.append(("alpha12_3d", 2.0 * np.pi * gamma_coeff(1, 2, m)))
    rows.append(("alpha34_3d", 1.5 * np.pi * gamma_coeff(3, 4, m)))
    rows.append(("alpha11_2d", 2.0 * gamma_coeff(1, 1, m)))
    rows.append(("alpha33_2d", 3.0 * gamma_coeff(3, 3, m)))
    if m > 5.0 / 3.0:
        rows.append(("alpha35_2d", 3.0 * gamma_coeff(3, 5, m)))
    if m > 3.0:
        rows.append(
            (
                "alpha13_2d",
                ((18.0 + 3.0 * m) * gamma_coeff(1, 3, m) + 6.0 * m * gamma_coeff(2, 3, m))
                / (2.0 * m),
            )
        )
    return rows


def _run_constants(args) -> int:
    rows = cmd_constants(args.m)
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value!r}")
    return EXIT_OK


def _run_phi(args) -> int:
    if args.s is not None:
        value = psi(args.i, args.j, args.s, args.r, args.eps)
        label = f"psi({args.i}, {args.j}, s={args.s}, r={args.r}, eps={args.eps})"
    else:
        value = phi(args.i, args.j, args.m, args.r, args.eps)
        label = f"phi({args.i}, {args.j}, m={args.m}, r={args.r}, eps={args.eps})"
    print(f"{label} = {value!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# force / sweep
# ---------------------------------------------------------------------------


def _load_run_config(args, need_sweep: bool = False) -> RunConfig:
    config = load_config(args.config)
    if args.mode is not None:
        config = replace(config, mode=args.mode)
    if args.override_flat_hypothesis:
        config = replace(config, override_flat_hypothesis=True)
    if args.out_csv is not None:
        config = replace(config, csv_path=args.out_csv)
    if args.out_json is not None:
        config = replace(config, json_path=args.out_json)
    if getattr(args, "eps", None) is not None:
        if args.eps <= 0.0:
            raise ConfigError("--eps must be positive", source="<cli>")
        config = replace(
            config,
            problem=replace(
                config.problem, profile=replace(config.problem.profile, eps=args.eps)
            ),
            sweep=None,
        )
    if need_sweep and config.sweep is None:
        raise ConfigError(
            "the sweep command requires a [sweep] section", source=args.config
        )
    return config


def _write_artifacts(config: RunConfig, report: Report) -> None:
    if config.csv_path is not None:
        with open(config.csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_csv(report))
    if config.json_path is not None:
        with open(config.json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_json(report))


def cmd_force(config: RunConfig) -> tuple[Report, int]:
    """Compute the configured report; exit status reflects embedded errors."""
    report = build_report(config)
    _write_artifacts(config, report)
    status = EXIT_COMPUTE if report.errors else EXIT_OK
    return report, status


def _print_report_summary(report: Report) -> None:
    for row in report.rows:
        if row["subflow"] != "total":
            continue
        parts = [f"eps={row['eps']!r}", f"{row['component']}:"]
        if row["numeric"] is not None:
            parts.append(f"numeric={row['numeric']!r} (+-{row['error_est']!r})")
        if row["asymptotic"] is not None:
            parts.append(f"asymptotic={row['asymptotic']!r}")
        if row["ratio"] is not None:
            parts.append(f"ratio={row['ratio']!r}")
        print("  ".join(parts))
    for err in report.errors:
        print(f"eps={err['eps']!r}  ERROR: {err['error']}", file=sys.stderr)


def _run_force(args, need_sweep: bool) -> int:
    config = _load_run_config(args, need_sweep=need_sweep)
    report, status = cmd_force(config)
    _print_report_summary(report)
    if report.exponents:
        for comp, p in report.exponents.items():
            print(f"fitted exponent {comp}: eps^({p!r})")
    return status


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _check(name: str, value: float, tolerance: float) -> dict:
    return {
        "name": name,
        "value": float(value),
        "tolerance": float(tolerance),
        "passed": bool(value <= tolerance),
    }


def _motion_scale(params) -> float:
    vals = np.atleast_1d(params.U).tolist() + np.atleast_1d(params.omega).tolist()
    return max(max(abs(float(v)) for v in vals), 1e-30)


def _suite_bc(config: RunConfig, npoints: int = 200) -> list[dict]:
    """Boundary-condition residuals of every sub-flow on both surfaces."""
    params = config.problem
    prof = params.profile
    rng = np.random.default_rng(20240811)
    scale = _motion_scale(params)
    checks = []
    for k in subflow_indices(prof.dimension):
        worst = 0.0
        for side in ("top", "bottom"):
            for _ in range(npoints):
                if prof.dimension == 3:
                    t = prof.r * np.sqrt(rng.uniform(0.0, 0.9025))
                    th = rng.uniform(0.0, 2.0 * np.pi)
                    xp = (t * np.cos(th), t * np.sin(th))
                else:
                    xp = float(rng.uniform(-0.95, 0.95) * prof.r)
                sp = surface_sample(prof, side, xp)
                x = (*sp.xprime, sp.x3) if prof.dimension == 3 else (sp.xprime, sp.x3)
                u = eval_field(k, params, x).u
                target = boundary_target(k, params, sp)
                worst = max(worst, float(np.max(np.abs(u - target))) / scale)
        checks.append(_check(f"bc-residual-k{k}", worst, 1e-9))
    return checks


def _rigid_mean_divergence(params, x) -> float:
    """Exact divergence of the k=0 rigid-mean field.

    That field carries the surface lever arm in place of the vertical
    coordinate, so its divergence is (omega x grad h)_3 / 4 rather than
    zero; every corrective sub-flow is exactly incompressible.
    """
    prof = params.profile
    if prof.dimension == 3:
        g1, g2 = prof.h_grad(x[0], x[1])
        return 0.25 * (params.omega[1] * float(g1) - params.omega[0] * float(g2))
    return -0.25 * params.omega * float(prof.dh(x[0]))


def _suite_div(config: RunConfig, npoints: int = 100) -> list[dict]:
    """Analytic incompressibility at interior points; dual-tensor row check."""
    params = config.problem
    prof = params.profile
    rng = np.random.default_rng(20240812)
    checks = []
    for k in subflow_indices(prof.dimension):
        worst = 0.0
        for _ in range(npoints):
            if prof.dimension == 3:
                t = 0.9 * prof.r * np.sqrt(rng.uniform())
                th = rng.uniform(0.0, 2.0 * np.pi)
                x1, x2 = t * np.cos(th), t * np.sin(th)
                h = float(prof.h(x1, x2))
                x = (x1, x2, rng.uniform(-0.45, 0.45) * h)
            else:
                x1 = float(rng.uniform(-0.9, 0.9) * prof.r)
                h = float(prof.h(x1))
                x = (x1, rng.uniform(-0.45, 0.45) * h)
            if k == 0:
                div = abs(divergence(k, params, x) - _rigid_mean_divergence(params, x))
                gscale = _motion_scale(params)
            else:
                div = abs(divergence(k, params, x))
                gscale = float(np.max(np.abs(eval_field(k, params, x).grad_u)))
            worst = max(worst, div / max(gscale, 1e-30))
        checks.append(_check(f"divergence-k{k}", worst, 1e-11))
    if prof.dimension == 3 and abs(params.U[2]) > 0.0:
        worst = 0.0
        step = 1e-6 * prof.r
        for _ in range(20):
            t = rng.uniform(0.3, 0.9) * 0.25 * prof.r
            th = rng.uniform(0.0, 2.0 * np.pi)
            x1, x2 = t * np.cos(th), t * np.sin(th)
            h = float(prof.h(x1, x2))
            x3 = rng.uniform(-0.4, 0.4) * h
            rowdiv = np.zeros(3)
            sscale = 0.0
            for axis in range(3):
                dx = np.zeros(3)
                dx[axis] = step
                Sp = dualcheck.dual_tensor(3, params, (x1 + dx[0], x2 + dx[1], x3 + dx[2]))
                Sm = dualcheck.dual_tensor(3, params, (x1 - dx[0], x2 - dx[1], x3 - dx[2]))
                rowdiv += (Sp[axis] - Sm[axis]) / (2.0 * step)
                sscale = max(sscale, float(np.max(np.abs(Sp - Sm))) / (2.0 * step))
            worst = max(worst, float(np.max(np.abs(rowdiv))) / max(sscale, 1e-30))
        checks.append(_check("dual-tensor-div-squeeze", worst, 1e-4))
    return checks


def _suite_parity(config: RunConfig) -> tuple[list[dict], Report]:
    """Vanishing components forced by symmetry, at the configured epsilon."""
    params = config.problem
    report = build_report(replace(config, mode="numeric", sweep=None))
    total = total_numeric(
        params,
        rel_tol=max(config.quadrature.rel_tol, 1e-12),
        max_subdivisions=max(config.quadrature.max_subdivisions, 200),
    )
    checks = []
    if params.profile.dimension == 3:
        # The in-plane spin sub-flow (k=4) exerts a genuine O(1) vertical
        # drag torque; every other sub-flow's vertical torque vanishes
        # exactly by the parity of its traction in the polar angle.
        spin = total.per_subflow[4]
        checks.append(
            _check(
                "vertical-torque-nonspin",
                abs(float(total.T[2]) - float(spin.T[2])),
                10.0 * (float(total.T_err[2]) + float(spin.T_err[2]))
                + 1e-13 * _motion_scale(params),
            )
        )
        shear = total.per_subflow[1]
        for comp, idx in (("F2", 1), ("F3", 2)):
            checks.append(
                _check(
                    f"shear-subflow-{comp}",
                    abs(float(shear.F[idx])),
                    10.0 * float(shear.F_err[idx]) + 1e-13 * _motion_scale(params),
                )
            )
    else:
        squeeze = total.per_subflow[2]
        checks.append(
            _check(
                "squeeze-subflow-torque",
                abs(float(squeeze.T)),
                10.0 * float(squeeze.T_err) + 1e-13 * _motion_scale(params),
            )
        )
    return checks, report


_DUAL_EPS_GRID = (1e-2, 1e-3, 1e-4)


def _suite_dual(config: RunConfig) -> tuple[list[dict], dict]:
    """Dual-form boundedness sweep: slopes and Cauchy-Schwarz."""
    params = config.problem
    if params.profile.dimension != 3:
        raise ConfigError("the dual suite requires a 3D profile", source="<cli>")
    grid = config.sweep.grid() if config.sweep is not None else _DUAL_EPS_GRID
    if len(grid) < 3:
        grid = _DUAL_EPS_GRID
    rep = dualcheck.err_sweep(params, grid)
    checks = []
    for pair in rep.pairs:
        a, b = pair
        slope = rep.slopes[pair]
        if a == b:
            checks.append(
                _check(f"ell-slope-{a}{b}", abs(slope) if slope is not None else 0.0, 0.1)
            )
    cs_worst = 0.0
    for (a, b), vals in rep.values.items():
        if a == b:
            continue
        for v, va, vb in zip(vals, rep.values[(a, a)], rep.values[(b, b)]):
            bound = max(va * vb, 0.0)
            if bound == 0.0:
                continue
            cs_worst = max(cs_worst, v * v / bound)
    checks.append(_check("cauchy-schwarz-max-ratio", cs_worst, 1.0 + 1e-6))
    return checks, serialize_ell_report(rep)


def _suite_exponents(config: RunConfig) -> tuple[list[dict], Report]:
    """Fitted blow-up exponents of the numeric totals vs the expansions."""
    if config.sweep is None:
        raise ConfigError(
            "the exponents suite requires a [sweep] section", source="<cli>"
        )
    report = build_report(replace(config, mode="numeric"))
    theorem = force_asymptotic(config.problem, config.override_flat_hypothesis)
    dim = config.problem.profile.dimension
    from .report import component_names

    names = component_names(dim)
    exps = (*theorem.F, *theorem.T) if dim == 3 else (*theorem.F, theorem.T)
    checks = []
    for name, exp in zip(names, exps):
        if report.exponents is None or name not in report.exponents:
            continue
        powers = [t.power for t in exp.terms if not t.is_log]
        if not powers:
            continue
        predicted = max(powers)
        fitted = -report.exponents[name]
        checks.append(
            _check(
                f"exponent-{name}",
                abs(fitted - predicted),
                max(0.05 * predicted, 0.05),
            )
        )
    return checks, report


def cmd_verify(config: RunConfig, suite: str) -> tuple[Report, int]:
    """Run one property suite; status 3 when any check fails."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {SUITES}", source="<cli>")
    base = build_report(replace(config, mode="asymptotic", sweep=None))
    rows: tuple = ()
    ell_payload = None
    if suite == "bc":
        checks = _suite_bc(config)
    elif suite == "div":
        checks = _suite_div(config)
    elif suite == "parity":
        checks, numeric_report = _suite_parity(config)
        rows = numeric_report.rows
    elif suite == "dual":
        checks, ell_payload = _suite_dual(config)
    else:
        checks, numeric_report = _suite_exponents(config)
        rows = numeric_report.rows
    passed = all(c["passed"] for c in checks)
    report = Report(
        config_echo=base.config_echo,
        mode=config.mode,
        rows=rows,
        expansions=base.expansions,
        coefficients=base.coefficients,
        warnings=base.warnings,
        suite={"name": suite, "passed": passed, "checks": checks},
        ell_report=ell_payload,
    )
    _write_artifacts(config, report)
    return report, EXIT_OK if passed else EXIT_VERIFY


def _run_verify(args) -> int:
    config = _load_run_config(args)
    report, status = cmd_verify(config, args.suite)
    for c in report.suite["checks"]:
        verdict = "ok" if c["passed"] else "FAIL"
        print(f"[{verdict}] {c['name']}: value={c['value']!r} tolerance={c['tolerance']!r}")
    print(f"suite {args.suite}: {'passed' if report.suite['passed'] else 'FAILED'}")
    return status


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_run_flags(sp, with_eps: bool = True) -> None:
    sp.add_argument("--config", required=True, help="path to the run config file")
    sp.add_argument("--mode", choices=MODES, default=None, help="override the run mode")
    if with_eps:
        sp.add_argument(
            "--eps", type=float, default=None, help="override epsilon (single point)"
        )
    sp.add_argument("--out-csv", default=None, help="override the CSV artifact path")
    sp.add_argument("--out-json", default=None, help="override the JSON artifact path")
    sp.add_argument(
        "--override-flat-hypothesis",
        action="store_true",
        help="evaluate flat-cap expansions outside their validity range",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="lubgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="coefficient table for an exponent m")
    sp.add_argument("--m", type=float, default=2.0, help="convexity exponent (> 1)")

    sp = sub.add_parser("phi", help="evaluate one gap-moment integral")
    sp.add_argument("--i", type=float, required=True)
    sp.add_argument("--j", type=float, required=True)
    sp.add_argument("--m", type=float, default=2.0)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--s", type=float, default=None, help="flat radius (psi variant)")

    sp = sub.add_parser("force", help="forces/torques at one epsilon")
    _add_run_flags(sp)

    sp = sub.add_parser("sweep", help="forces/torques over the config's epsilon grid")
    _add_run_flags(sp, with_eps=False)

    sp = sub.add_parser("verify", help="run a property suite")
    sp.add_argument("--suite", choices=SUITES, required=True)
    _add_run_flags(sp)
    return parser


def main(argv=None) -> int:
    """CLI entry point; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "constants":
            return _run_constants(args)
        if args.command == "phi":
            return _run_phi(args)
        if args.command == "force":
            return _run_force(args, need_sweep=False)
        if args.command == "sweep":
            return _run_force(args, need_sweep=True)
        return _run_verify(args)
    except (_UsageError, ConfigError, FlatHypothesisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ToleranceNotMet) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
