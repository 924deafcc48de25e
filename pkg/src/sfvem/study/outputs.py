"""
CSV and SVG artifacts of a convergence report.

Floats are written with repr so identical reports give byte-identical CSV;
the SVG uses a fixed hash salt and no date stamp for the same reason.
"""

import csv
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from ..exceptions import OutputError
from ..log import get_component_logger
from ..models.study import ConvergenceReport
from .convergence import fitted_slope

logger = get_component_logger("sfvem.study")

EIGEN_HEADER = (
    "level",
    "h",
    "ndof",
    "eig_index",
    "lambda_re",
    "lambda_im",
    "abs_error",
    "rate",
)
SOURCE_HEADER = (
    "level",
    "h",
    "ndof",
    "l2_error",
    "l2_rate",
    "energy_error",
    "energy_rate",
)
EIGFUN_HEADER = ("level", "h", "ndof", "eig_index", "l2_error", "energy_error")
SVG_SALT = "sfvem"


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(
    path: Path, header: tuple[str, ...], rows: list[tuple[object, ...]]
) -> None:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(v) for v in row] for row in rows)


def write_csv(report: ConvergenceReport, path: str | Path) -> Path:
    """Eigenvalue or source-problem table of ``report``."""
    path = Path(path)
    if report.source_rows:
        rows = [
            (r.level, r.h, r.ndof, r.l2_error, r.l2_rate, r.energy_error, r.energy_rate)
            for r in report.source_rows
        ]
        _write_rows(path, SOURCE_HEADER, rows)
    else:
        rows = [
            (
                r.level,
                r.h,
                r.ndof,
                r.eig_index,
                r.lambda_re,
                r.lambda_im,
                r.abs_error,
                r.rate,
            )
            for r in report.rows
        ]
        _write_rows(path, EIGEN_HEADER, rows)
    return path


def write_eigfun_csv(report: ConvergenceReport, path: str | Path) -> Path:
    path = Path(path)
    rows = [
        (r.level, r.h, r.ndof, r.eig_index, r.l2_error, r.energy_error)
        for r in report.eigfun_rows
    ]
    _write_rows(path, EIGFUN_HEADER, rows)
    return path


def _series(
    report: ConvergenceReport,
) -> list[tuple[str, list[float], list[float], int]]:
    """(label, h, errors, reference slope) per curve."""
    if report.source_rows:
        hs = [r.h for r in report.source_rows]
        return [
            ("L2", hs, [r.l2_error for r in report.source_rows], report.k + 1),
            ("energy", hs, [r.energy_error for r in report.source_rows], report.k),
        ]
    indices = sorted({r.eig_index for r in report.rows})
    series = []
    for index in indices:
        rows = [r for r in report.rows if r.eig_index == index]
        series.append(
            (
                f"lambda_{index}",
                [r.h for r in rows],
                [r.abs_error for r in rows],
                2 * report.k,
            )
        )
    return series


def plot_convergence(report: ConvergenceReport, path: str | Path) -> Path:
    """Log-log error curves with reference slope guides."""
    path = Path(path)
    fig = Figure(figsize=(6, 5))
    ax = fig.subplots()
    guides_drawn = set()
    for label, hs, errors, slope in _series(report):
        positive = [(h, e) for h, e in zip(hs, errors, strict=True) if e > 0]
        if not positive:
            continue
        h_pos, e_pos = zip(*positive, strict=True)
        if len(positive) >= 2:
            label = f"{label} (slope {fitted_slope(h_pos, e_pos, last=2):.2f})"
        ax.loglog(h_pos, e_pos, "o-", label=label)
        if slope not in guides_drawn:
            anchor_h, anchor_e = h_pos[-1], e_pos[-1]
            guide = [anchor_e * (h / anchor_h) ** slope for h in h_pos]
            ax.loglog(h_pos, guide, "k:", label=f"O(h^{slope})")
            guides_drawn.add(slope)
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.set_title(report.stem)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def emit_outputs(
    report: ConvergenceReport, out_dir: str | Path | None = None
) -> dict[str, Path]:
    """
    Write ``<stem>.csv``, ``<stem>.svg`` and, when present, ``<stem>_eigfun.csv``.

    Args:
        report: Non-empty convergence report
        out_dir: Output directory (created if missing)

    Returns:
        Mapping of artifact kind to path

    Raises:
        OutputError: empty report or unwritable directory
    """
    if report.is_empty:
        raise OutputError(f"report {report.stem} has no rows to write")
    directory = Path(out_dir) if out_dir is not None else Path(".")
    try:
        directory.mkdir(parents=True, exist_ok=True)
        paths = {
            "csv": write_csv(report, directory / f"{report.stem}.csv"),
            "svg": plot_convergence(report, directory / f"{report.stem}.svg"),
        }
        if report.eigfun_rows:
            paths["eigfun"] = write_eigfun_csv(
                report, directory / f"{report.stem}_eigfun.csv"
            )
    except OSError as e:
        raise OutputError(f"cannot write outputs to {directory}: {e}") from e
    logger.info("Outputs written", **{kind: str(p) for kind, p in paths.items()})
    return paths
