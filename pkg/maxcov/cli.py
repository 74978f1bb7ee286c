"""
Command-line front end.

    maxcov check        <scenario> [--frame N|all]   frame-wise constraint residuals
    maxcov covariantize <scenario> [--oracle]        covariant residuals dF, dG - J
    maxcov report       <scenario>                   invariants and flux checks

All commands write CSV with the header ``frame,point_index,t,x,y,z,
quantity,component,value`` to stdout (or ``--out``). Exit codes: 0 pass,
1 residual failure, 2 parse or configuration error.
"""

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from .config import ToleranceControls, setup_logging
from .errors import MaxcovError, ScenarioError
from .forms_core import Point, evaluate
from .frames import FrameFamily, make_frame_family
from .maxwell import (
    EMFieldState,
    INVARIANT_NAMES,
    LeafBox,
    ampere_delta,
    closed_flux,
    constraint_residuals,
    covariantize,
    direct_residuals,
    faraday_delta,
    frame_fields,
    gauss_delta,
    invariant_checks,
    stokes_delta,
    state_residual_evaluator,
)
from .reconstruction import COMPONENT_NAMES_3
from .sampling import RationalSampler
from .scenario import ScenarioConfig, build_state, load_scenario

logger = logging.getLogger(__name__)

CSV_HEADER = ("frame", "point_index", "t", "x", "y", "z", "quantity", "component", "value")

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_CONFIG = 2

Row = Tuple[str, ...]


def format_value(value) -> str:
    """Rationals as ``p/q``, floats in shortest round-trip form"""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, sp.Rational):
        return str(value)
    return repr(float(value))


def _row(frame, index, point: Optional[Sequence], quantity: str, component: str, value) -> Row:
    coords = tuple(format_value(c) for c in point) if point is not None else ("", "", "", "")
    return (str(frame), str(index), *coords, quantity, component, format_value(value))


class RunContext:
    """Everything a command needs, resolved with CLI flags over scenario values"""

    def __init__(self, config: ScenarioConfig, args: argparse.Namespace):
        self.config = config
        self.family: FrameFamily = make_frame_family(config.beta)
        self.state: EMFieldState = build_state(config)
        count = args.points if args.points is not None else config.sample_points.count
        if count < 1:
            raise ValueError(f"--points must be at least 1, got {count}")
        seed = args.seed if args.seed is not None else config.sample_points.seed
        self.points: List[Point] = RationalSampler(seed).random_points(count)
        if args.tol is not None:
            self.tol = args.tol
            self.flux_tol = args.tol
        else:
            # an irrational gamma puts floats into every frame
            self.tol = ToleranceControls.for_backend(config.backend) if self.family.is_exact else ToleranceControls.JET
            self.flux_tol = ToleranceControls.FLUX
        logger.info(
            f"Scenario {config.name or '<unnamed>'}: beta={self.family.beta}, backend={config.backend}, "
            f"source={config.source_mode}, points={count}, seed={seed}, tol={self.tol}"
        )

    def exceeds(self, value, tol: Optional[float] = None) -> bool:
        tol = self.tol if tol is None else tol
        # sympy comparisons return BooleanAtom, which does not add to ints
        return bool(abs(value) > tol)


def _frame_labels(selection: str) -> List[int]:
    if selection == "all":
        return [0, 1, 2, 3]
    label = int(selection)
    if label not in (0, 1, 2, 3):
        raise ValueError(f"--frame must be 0, 1, 2, 3 or all, got {selection}")
    return [label]


def cmd_check_constraints(ctx: RunContext, frame: str = "all") -> Tuple[List[Row], int]:
    """Magnetic and Gauss residuals on each selected frame's spatial basis"""
    rows, failures = [], 0
    for label in _frame_labels(frame):
        ref = ctx.family[label]
        residuals = constraint_residuals(ref, ctx.state)
        basis = list(ref.spatial_basis)
        for index, p in enumerate(ctx.points):
            for quantity, form in (("magnetic", residuals.magnetic), ("gauss", residuals.gauss)):
                value = evaluate(form, basis, p)
                if ctx.exceeds(value):
                    failures += 1
                rows.append(_row(label, index, p, quantity, "X1X2X3", value))
    return rows, failures


def _covariant_rows(results, suffix: str = "") -> Iterable[Tuple[Row, object]]:
    for index, result in enumerate(results):
        for quantity, rec in (("dF", result.dF), ("dG-J", result.dG_minus_J)):
            for component, value in zip(COMPONENT_NAMES_3, rec.as_tuple()):
                yield _row(0, index, result.point, quantity + suffix, component, value), value


def cmd_covariantize(ctx: RunContext, oracle: bool = False) -> Tuple[List[Row], int]:
    """Covariant residuals rebuilt from the four frames, optionally next to direct ones"""
    rows, failures = [], 0
    results = covariantize(ctx.family, state_residual_evaluator(ctx.state), ctx.points)
    for row, value in _covariant_rows(results):
        if ctx.exceeds(value):
            failures += 1
        rows.append(row)
    if oracle:
        direct = direct_residuals(ctx.state, ctx.family.fiducial, ctx.points)
        for row, value in _covariant_rows(direct, suffix="_direct"):
            if ctx.exceeds(value):
                failures += 1
            rows.append(row)
    return rows, failures


def cmd_report(ctx: RunContext) -> Tuple[List[Row], int]:
    """Invariant coefficients per point, then closed-box and per-face integral law deltas per frame"""
    rows, failures = [], 0
    checks = invariant_checks(ctx.state, ctx.points, tol=ctx.tol)
    for index, check in enumerate(checks):
        for name in INVARIANT_NAMES:
            rows.append(_row(0, index, check.point, "invariant", name, check.values[name]))
        if ctx.config.checks_convection and not check.passed:
            failures += 1
            logger.warning(f"Convection invariants violated at point {index}: G^G={check.values['G^G']}, G^*G={check.values['G^*G']}")

    box_model = ctx.config.flux_box
    box = LeafBox(tuple(float(sp.Rational(v)) for v in box_model.lower), tuple(float(sp.Rational(v)) for v in box_model.upper))
    leaf_time = sp.Rational(box_model.leaf_time)
    order = ctx.config.quadrature_order
    for ref in ctx.family:
        fields = frame_fields(ref, ctx.state, leaf_time)
        deltas = [
            ("stokes_B", "closed", stokes_delta(fields.B, box, order)),
            ("stokes_D", "closed", stokes_delta(fields.D, box, order)),
            ("magnetic_flux", "closed", closed_flux(fields.B, box, order)),
            ("gauss_D", "closed", gauss_delta(fields.D, fields.rho, box, order)),
        ]
        for name, face in box.named_faces():
            deltas.append(("faraday", name, faraday_delta(fields.B_rate, fields.E, face, order)))
            deltas.append(("ampere", name, ampere_delta(fields.D_rate, fields.H, fields.j, face, order)))
        for quantity, component, delta in deltas:
            if ctx.exceeds(delta, ctx.flux_tol):
                failures += 1
                logger.warning(f"Frame {ref.label}: {quantity} {component} delta {delta!r} exceeds {ctx.flux_tol}")
            rows.append((str(ref.label), "box", format_value(leaf_time), "", "", "", quantity, component, format_value(delta)))
    return rows, failures


def render_csv(rows: Iterable[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return buffer.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxcov",
        description="Covariantize Maxwell constraint equations over a boosted frame family",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub):
        sub.add_argument("scenario", help="Path to a scenario JSON file")
        sub.add_argument("--points", type=int, default=None, help="Number of sample points (overrides scenario)")
        sub.add_argument("--seed", type=int, default=None, help="64-bit sampling seed (overrides scenario)")
        sub.add_argument("--out", default=None, help="Write CSV here instead of stdout")
        sub.add_argument("--tol", type=float, default=None, help="Pass/fail tolerance override")
        sub.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    check = subparsers.add_parser("check", help="Frame-wise magnetic and Gauss constraint residuals")
    add_common(check)
    check.add_argument("--frame", default="all", help="Frame label 0-3 or 'all'")

    cov = subparsers.add_parser("covariantize", help="Covariant residuals dF and dG - J")
    add_common(cov)
    cov.add_argument("--oracle", action="store_true", help="Also emit directly evaluated residuals")

    report = subparsers.add_parser("report", help="Field invariants and flux checks")
    add_common(report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(verbose=args.verbose)

    try:
        config = load_scenario(args.scenario)
        ctx = RunContext(config, args)
        if args.command == "check":
            rows, failures = cmd_check_constraints(ctx, args.frame)
        elif args.command == "covariantize":
            rows, failures = cmd_covariantize(ctx, args.oracle)
        else:
            rows, failures = cmd_report(ctx)
    except ScenarioError as e:
        logger.error(f"❌ Scenario error: {e}")
        return EXIT_CONFIG
    except (MaxcovError, ValueError) as e:
        logger.error(f"❌ Configuration error: {e}")
        return EXIT_CONFIG

    output = render_csv(rows)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
        logger.info(f"Wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(output)

    if failures:
        logger.warning(f"⚠️ {args.command}: {failures} value(s) outside tolerance")
        return EXIT_RESIDUAL
    logger.info(f"✅ {args.command}: all {len(rows)} values within tolerance")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
