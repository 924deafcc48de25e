"""
Command line interface.

Subcommands:
    mesh         generate a mesh and print its counts or write it to a file
    validate     check a mesh file against a shape-regularity constant
    solve        smallest eigenvalues of one case on one mesh
    convergence  run a study from a JSON config and write CSV/SVG artifacts
    compare      SFVEM against SVEM on the same meshes
"""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from .assembly import Scheme, assemble, export_pair
from .config import get_settings
from .eigensolve import Strategy, solve_gevp
from .exceptions import SfvemError
from .log import configure_logger, get_component_logger
from .mesh import (
    FamilyTag,
    MeshFamily,
    generate_mesh,
    mesh_size,
    read_mesh,
    validate_mesh,
    write_mesh,
)
from .models.study import CaseName, ConvergenceReport, StudyConfig
from .study import emit_outputs, run_comparison, run_study
from .study.cases import exact_reference, expand_reference, get_case

logger = get_component_logger("sfvem.cli")

DEFAULT_CT = 0.05


def _family(value: str) -> FamilyTag:
    try:
        return FamilyTag(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"unknown mesh family {value!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfvem",
        description="Stabilization-free virtual elements on polygonal meshes",
    )
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    parser.add_argument(
        "--log-format", choices=["text", "json"], default=None, help="Log format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mesh = sub.add_parser("mesh", help="Generate a mesh of the unit square")
    mesh.add_argument("family", type=_family, help="quad, pentagon or octagon (t1-t3)")
    mesh.add_argument("n", type=int, help="Grid subdivisions per side")
    mesh.add_argument("--delta", type=float, default=None, help="Shape parameter")
    mesh.add_argument("--out", type=Path, default=None, help="Write the mesh here")

    validate = sub.add_parser("validate", help="Validate a mesh file")
    validate.add_argument("meshfile", type=Path)
    validate.add_argument("--ct", type=float, default=DEFAULT_CT, help="Ratio c_T")

    solve = sub.add_parser("solve", help="Solve one eigenvalue problem")
    solve.add_argument("--case", required=True, choices=[c.value for c in CaseName])
    solve.add_argument("--family", required=True, type=_family)
    solve.add_argument("--n", required=True, type=int)
    solve.add_argument("--k", type=int, default=2)
    solve.add_argument("--ell", type=int, default=None)
    solve.add_argument(
        "--scheme", choices=[s.value for s in Scheme], default=Scheme.SFVEM.value
    )
    solve.add_argument("--nev", type=int, default=5)
    solve.add_argument("--delta", type=float, default=None)
    solve.add_argument(
        "--strategy", choices=[s.value for s in Strategy], default=Strategy.AUTO.value
    )
    solve.add_argument("--export", type=Path, default=None, help="Write A.txt, M.txt")

    convergence = sub.add_parser("convergence", help="Run a convergence study")
    convergence.add_argument("--config", required=True, type=Path)
    convergence.add_argument("--out-dir", type=Path, default=None)

    compare = sub.add_parser("compare", help="Compare SFVEM with SVEM")
    compare.add_argument(
        "--case", choices=[c.value for c in CaseName], default=CaseName.CASE3.value
    )
    compare.add_argument("--k", type=int, default=2)
    compare.add_argument("--levels", type=int, nargs="+", required=True)
    compare.add_argument(
        "--families",
        type=_family,
        nargs="+",
        default=[FamilyTag.QUAD, FamilyTag.PENTAGON, FamilyTag.OCTAGON],
    )
    compare.add_argument("--nev", type=int, default=1)
    compare.add_argument("--delta", type=float, default=None, help="Shape parameter")
    compare.add_argument("--out-dir", type=Path, default=None)
    return parser


def _cmd_mesh(args: argparse.Namespace) -> int:
    family = MeshFamily(tag=args.family, delta=args.delta)
    mesh = generate_mesh(family, args.n)
    if args.out is not None:
        write_mesh(mesh, args.out)
        print(f"wrote {args.out}")
    print(
        f"{family.tag.value} n={args.n} delta={family.shape_delta}: "
        f"{mesh.n_vertices} vertices, {mesh.n_edges} edges, {mesh.n_cells} cells, "
        f"h={mesh_size(mesh):.6e}"
    )
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    report = validate_mesh(read_mesh(args.meshfile), args.ct)
    print(report.model_dump_json(indent=2))
    return 0 if report.passed else 1


def _cmd_solve(args: argparse.Namespace) -> int:
    spec = get_case(args.case).problem_spec(args.k, args.scheme, args.ell)
    mesh = generate_mesh(MeshFamily(tag=args.family, delta=args.delta), args.n)
    pair, _ = assemble(mesh, spec)
    if args.export is not None:
        export_pair(pair, args.export)
    result = solve_gevp(pair, min(args.nev, pair.size), strategy=args.strategy)
    reference = expand_reference(exact_reference(args.case, len(result.eigenvalues)))

    print(f"{args.case} {args.family.value} n={args.n} k={args.k} {args.scheme}")
    print(f"free DOFs {pair.size}, strategy {result.strategy.value}")
    print(f"{'j':>3} {'Re':>20} {'Im':>12} {'|error|':>12} {'residual':>10}")
    for j, value in enumerate(result.eigenvalues):
        error = abs(complex(value) - reference[j][1].value)
        print(
            f"{j + 1:>3} {value.real:>20.12f} {value.imag:>12.3e} "
            f"{error:>12.4e} {result.residuals[j]:>10.2e}"
        )
    return 0


def _emit(reports: list[ConvergenceReport], out_dir: Path) -> int:
    status = 0
    for report in reports:
        print(report.summary())
        if not report.is_empty:
            for path in emit_outputs(report, out_dir).values():
                print(f"wrote {path}")
        if report.failed:
            status = 1
    return status


def _cmd_convergence(args: argparse.Namespace) -> int:
    config = StudyConfig.from_file(args.config)
    out_dir = args.out_dir if args.out_dir is not None else config.output_dir
    return _emit(run_study(config), out_dir)


def _cmd_compare(args: argparse.Namespace) -> int:
    reports = run_comparison(
        args.case, args.families, args.k, args.levels, args.nev, args.delta
    )
    out_dir = args.out_dir if args.out_dir is not None else get_settings().out_dir
    status = _emit(reports, out_dir)

    print(f"{'family':>10} {'sfvem':>12} {'svem':>12}")
    by_family: dict[FamilyTag, dict[Scheme, float]] = {}
    for report in reports:
        errors = report.errors(1)
        if errors:
            by_family.setdefault(report.family, {})[report.scheme] = errors[-1]
    for family, errors in by_family.items():
        sfvem = errors.get(Scheme.SFVEM, float("nan"))
        svem = errors.get(Scheme.SVEM, float("nan"))
        print(f"{family.value:>10} {sfvem:>12.4e} {svem:>12.4e}")
    return status


COMMANDS = {
    "mesh": _cmd_mesh,
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "convergence": _cmd_convergence,
    "compare": _cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Entry point of the ``sfvem`` command.

    Returns:
        0 on success, 1 on a library error or failed check, 2 on an invalid
        configuration
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level is not None or args.log_format is not None:
        configure_logger(level=args.log_level, fmt=args.log_format)

    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        print(f"sfvem: invalid configuration: {e}", file=sys.stderr)
        return 2
    except SfvemError as e:
        logger.error("Command failed", command=args.command, error=str(e))
        print(f"sfvem: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
