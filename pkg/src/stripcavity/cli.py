"""Command-line front end.

Subcommands: ``design`` (closed-form plus oracle design report), ``sweep``
(absorptance/impedance curves over a thickness), ``table2`` (reference-table
regression with pass/fail flags), ``impedance`` (wire-thickness impedance
curves), ``mlc-convergence`` (reflector period study).

Exit codes: 0 success, 2 success with validity warnings, 1 error. Errors are
one line on stderr prefixed with ``error:``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__, tmm
from .design import (
    CurvePoint,
    CurveSet,
    DesignReport,
    DesignSpec,
    mlc_convergence,
    reproduce_table2,
    run_design_flow,
    sweep_curves,
)
from .materials import MaterialRegistry, load_registry
from .stack import load_stack_config

__all__ = ["main"]

_SWEEP_HEADER = ("x_nm", "A_analytic", "A_tmm", "eta_ratio")


class CliError(Exception):
    """Maps to exit code 1 and a single-line error message."""


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for validity-warning-only runs, so argument
    # errors must not use argparse's default SystemExit(2)
    def error(self, message):
        raise CliError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as handle:
            handle.write(text)


def _csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buffer.getvalue()


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError as exc:
        raise CliError(f"cannot parse range {text!r}; expected LO:HI") from exc
    return lo, hi


def _registry_from(args) -> MaterialRegistry:
    try:
        return load_registry(args.materials)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from exc


def _spec_from(args) -> DesignSpec:
    slit = args.slit_nm
    if args.f is not None:
        if slit is not None:
            raise CliError("give either --slit-nm or --f, not both")
        if not 0 < args.f <= 1:
            raise CliError(f"--f must lie in (0, 1], got {args.f}")
        slit = args.line_nm * (1.0 - args.f) / args.f
    if slit is None:
        slit = 80.0
    kwargs = dict(
        cavity=args.cavity,
        wavelength_nm=args.wavelength_nm,
        line_nm=args.line_nm,
        slit_nm=slit,
        mirror=args.mirror,
        periods=args.periods,
    )
    if args.wire_material is not None:
        kwargs["wire_material"] = args.wire_material
    if args.slit_material is not None:
        kwargs["slit_material"] = args.slit_material
    if getattr(args, "c1", None) is not None:
        kwargs["low_index"] = args.c1
    if getattr(args, "c2", None) is not None:
        kwargs["high_index"] = args.c2
    try:
        return DesignSpec(**kwargs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _report_rows(report: DesignReport):
    data = report.as_dict()
    data["warnings"] = "; ".join(report.warnings)
    return [(key, _fmt(value)) for key, value in data.items()]


def _emit(args, as_csv: str, as_json) -> None:
    if args.format == "structured-report":
        _write_text(args.out, json.dumps(as_json, indent=2) + "\n")
    else:
        _write_text(args.out, as_csv)


def _cmd_design(args) -> int:
    registry = _registry_from(args)
    try:
        report = run_design_flow(_spec_from(args), registry)
    except (KeyError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    _emit(args, _csv_text(("key", "value"), _report_rows(report)), report.as_dict())
    return 2 if report.warnings else 0


def _curve_rows(curves: CurveSet):
    return [(p.x_nm, p.A_analytic, p.A_tmm, p.eta_ratio) for p in curves.points]


def _sweep_common(args, registry, variable: str, lo: float, hi: float, step: float) -> CurveSet:
    try:
        return sweep_curves(_spec_from(args), variable, lo, hi, step, registry)
    except (KeyError, ValueError) as exc:
        raise CliError(str(exc)) from exc


def _custom_sweep(args, registry) -> CurveSet:
    try:
        config = load_stack_config(args.stack, registry)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    index = args.layer
    if index is None:
        index = config.wire_layer_index if args.variable == "wire" else config.dielectric_layer_index
    if index is None:
        raise CliError("custom stacks need --layer to pick the swept layer")
    lo, hi = _parse_range(args.range) if args.range else (1.0, 30.0)
    if lo > hi or args.step <= 0:
        raise CliError(f"bad sweep range [{lo}, {hi}] step {args.step}")
    xs = np.arange(lo, hi + 0.5 * args.step, args.step)
    if len(xs) == 0:
        xs = np.array([lo])
    result = tmm.sweep(config.stack, index, xs, config.wavelength_nm)
    n_i = config.stack.input.material.optical_constant.n_re
    ratios = np.abs(result.eta_in) * n_i
    points = tuple(
        CurvePoint(float(x), float("nan"), float(a), float(rho))
        for x, a, rho in zip(xs, result.A, ratios)
    )
    return CurveSet("custom", "nm", points)


def _cmd_sweep(args) -> int:
    registry = _registry_from(args)
    if args.stack is not None:
        curves = _custom_sweep(args, registry)
    else:
        defaults = {"wire": (1.0, 30.0, 0.1), "dielectric": (150.0, 300.0, 0.5)}
        lo, hi, step = defaults[args.variable]
        if args.range:
            lo, hi = _parse_range(args.range)
        if args.step is not None:
            step = args.step
        curves = _sweep_common(args, registry, args.variable, lo, hi, step)
    rows = _curve_rows(curves)
    _emit(
        args,
        _csv_text(_SWEEP_HEADER, rows),
        [dict(zip(_SWEEP_HEADER, row)) for row in rows],
    )
    return 0


def _cmd_impedance(args) -> int:
    registry = _registry_from(args)
    lo, hi = _parse_range(args.range) if args.range else (1.0, 30.0)
    step = args.step if args.step is not None else 0.1
    curves = _sweep_common(args, registry, "wire", lo, hi, step)
    rows = _curve_rows(curves)
    _emit(
        args,
        _csv_text(_SWEEP_HEADER, rows),
        [dict(zip(_SWEEP_HEADER, row)) for row in rows],
    )
    return 0


def _cmd_table2(args) -> int:
    registry = _registry_from(args)
    report = reproduce_table2(registry)
    header = (
        "cavity", "quantity", "slit_nm", "analytic_nm", "oracle_nm",
        "target_nm", "analytic_pass", "oracle_pass", "oracle_rel_dev",
    )
    rows = [
        (
            c.cavity, c.quantity, c.slit_nm, c.analytic_nm, c.oracle_nm,
            c.target_nm, c.analytic_ok, c.oracle_ok, c.oracle_rel_dev,
        )
        for c in report.cells
    ]
    _emit(
        args,
        _csv_text(header, rows),
        [dict(zip(header, row)) for row in rows],
    )
    failed = sum(1 for c in report.cells if not (c.analytic_ok and c.oracle_ok))
    print(f"table cells: {len(report.cells)} total, {len(report.cells) - failed} pass, {failed} fail", file=sys.stderr)
    if failed:
        raise CliError(f"{failed} table cells outside tolerance")
    return 0


def _cmd_mlc_convergence(args) -> int:
    registry = _registry_from(args)
    spec = _spec_from(args)
    if spec.cavity != "mlc":
        raise CliError("mlc-convergence requires --cavity mlc")
    try:
        report = mlc_convergence(spec, args.max_periods, args.wire_nm, registry)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    header = ("periods", "A_tmm", "T_tmm")
    rows = [(r.periods, r.A, r.T) for r in report.rows]
    _emit(args, _csv_text(header, rows), {
        "rows": [dict(zip(header, row)) for row in rows],
        "converged_periods": report.converged_periods,
        "analytic_A": report.analytic_A,
        "d_w_nm": report.d_w_nm,
    })
    label = report.converged_periods if report.converged_periods is not None else "none"
    print(f"converged at periods = {label} (step threshold 1e-4)", file=sys.stderr)
    return 0


def _add_common(parser: argparse.ArgumentParser, cavity_required: bool = True) -> None:
    parser.add_argument("--cavity", choices=("ssc", "dsc", "mlc"), required=cavity_required,
                        default=None if cavity_required else "ssc")
    parser.add_argument("--wavelength-nm", type=float, default=1550.0)
    parser.add_argument("--line-nm", type=float, default=80.0)
    parser.add_argument("--slit-nm", type=float, default=None)
    parser.add_argument("--f", type=float, default=None,
                        help="filling factor; alternative to --slit-nm")
    parser.add_argument("--wire-material", default=None)
    parser.add_argument("--slit-material", default=None)
    parser.add_argument("--c1", default=None, help="reflector layer adjacent to the wire")
    parser.add_argument("--c2", default=None, help="second reflector layer")
    parser.add_argument("--mirror", default="Ag",
                        help="pec | pec-surrogate | material name (default Ag)")
    parser.add_argument("--periods", type=int, default=6)
    parser.add_argument("--materials", default=None, help="material config file")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "structured-report"), default="csv")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="stripcavity",
        description="Design and analyse optical cavities for superconducting strip single-photon detectors.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="closed-form design with oracle refinement")
    _add_common(p)
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("sweep", help="absorptance and impedance curves over a thickness")
    _add_common(p)
    p.add_argument("--variable", choices=("wire", "dielectric"), default="wire")
    p.add_argument("--range", default=None, help="LO:HI in nm")
    p.add_argument("--step", type=float, default=None, help="step in nm")
    p.add_argument("--stack", default=None, help="stack config file (custom cavities)")
    p.add_argument("--layer", type=int, default=None, help="swept layer index for custom stacks")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("impedance", help="wire-thickness impedance-match curves")
    _add_common(p)
    p.add_argument("--range", default=None, help="LO:HI in nm (default 1:30)")
    p.add_argument("--step", type=float, default=None, help="step in nm (default 0.1)")
    p.set_defaults(func=_cmd_impedance)

    p = sub.add_parser("table2", help="reference-table regression with pass/fail flags")
    _add_common(p, cavity_required=False)
    p.set_defaults(func=_cmd_table2)

    p = sub.add_parser("mlc-convergence", help="reflector period-count study")
    _add_common(p)
    p.add_argument("--max-periods", type=int, default=12)
    p.add_argument("--wire-nm", type=float, default=None,
                   help="wire thickness (default: closed-form optimum)")
    p.set_defaults(func=_cmd_mlc_convergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
