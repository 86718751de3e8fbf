"""Command line interface: ``sweepchi chi|census|validate|catalog``."""

import csv
import io
import logging
from collections.abc import Callable
from typing import Annotated, TypeVar

import typer
from pydantic import ValidationError

from sweepchi.core.config import get_settings
from sweepchi.core.errors import (
    GenericityExhausted,
    NonIntegralResult,
    ResolutionTooCoarse,
    SceneError,
    UnsupportedSurface,
)
from sweepchi.models.schemas import (
    CensusReport,
    ChiReport,
    EventRecord,
    Method,
    OutputFormat,
    RunConfig,
    ValidationReport,
)
from sweepchi.services import runner

T = TypeVar("T")

EXIT_CONFIG = 1
EXIT_EXHAUSTED = 2
EXIT_NON_INTEGRAL = 3
EXIT_DISAGREEMENT = 4

CSV_COLUMNS = [
    "lambda",
    "kind",
    "s",
    "t",
    "curve",
    "tau",
    "quantity",
    "sign",
    "running_chi_contribution",
]

app = typer.Typer(
    name="sweepchi",
    help="Euler characteristic of surface domains from sweeping-plane tangencies.",
    no_args_is_help=True,
)

Scene = Annotated[str, typer.Option("--scene", help="Catalog name or path to a scene file.")]
Direction = Annotated[
    str, typer.Option("--direction", help="Comma-separated components, or 'random'.")
]
Seed = Annotated[int, typer.Option("--seed", help="Seed of the random generator.")]
Format = Annotated[OutputFormat, typer.Option("--format", help="Output format.")]
Grid = Annotated[int | None, typer.Option("--grid", help="Newton seed grid per axis.")]
Samples = Annotated[int | None, typer.Option("--samples", help="Samples per boundary curve.")]
TolK = Annotated[float | None, typer.Option("--tol-k", help="Threshold on |K|.")]
TolKg = Annotated[float | None, typer.Option("--tol-kg", help="Threshold on |k_g - k_g^u|.")]
Retries = Annotated[int | None, typer.Option("--retries", help="Perturbation retries.")]
Verbose = Annotated[bool, typer.Option("--verbose", "-v", help="Log at DEBUG level.")]


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else get_settings().log_level
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _config(direction: str, **fields) -> RunConfig:
    """Build the run config, exiting with status 1 on invalid input."""
    try:
        parsed = "random" if direction.strip() == "random" else [
            float(x) for x in direction.split(",")
        ]
        return RunConfig(direction=parsed, **fields)
    except ValueError as exc:
        # pydantic's ValidationError is a ValueError
        message = (
            "; ".join(e["msg"] for e in exc.errors())
            if isinstance(exc, ValidationError)
            else f"invalid direction {direction!r}"
        )
        typer.echo(f"error: {message}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc


def _run(fn: Callable[[], T]) -> T:
    """Call a runner, mapping sweepchi errors to exit statuses."""
    try:
        return fn()
    except GenericityExhausted as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_EXHAUSTED) from exc
    except NonIntegralResult as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_NON_INTEGRAL) from exc
    except (SceneError, UnsupportedSurface, ResolutionTooCoarse, ValueError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc


def _csv(events: list[EventRecord], footer: str | None = None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for e in events:
        writer.writerow(
            [
                _fmt(e.level),
                e.kind.value,
                _fmt(e.s),
                _fmt(e.t),
                _fmt(e.curve),
                _fmt(e.tau),
                _fmt(e.quantity),
                "+" if e.index > 0 else "-",
                _fmt(e.running_chi),
            ]
        )
    if footer:
        buffer.write(footer + "\n")
    return buffer.getvalue()


def _validation_csv(report: ValidationReport) -> str:
    methods = sorted({m for row in report.directions for m in row.special})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["index", "ux", "uy", "uz", "sweep", "census", *methods, "retries", "agrees", "error"]
    )
    for row in report.directions:
        direction = row.accepted or row.requested
        writer.writerow(
            [
                row.index,
                *(_fmt(x) for x in direction),
                _fmt(row.sweep),
                _fmt(row.census),
                *(_fmt(row.special.get(m)) for m in methods),
                row.retries,
                "true" if row.agrees else "false",
                row.error or "",
            ]
        )
    buffer.write(
        f"# reference {_fmt(report.reference_chi)}, cell complex {report.cell_complex},"
        f" gauss-bonnet {_fmt(report.gauss_bonnet)}\n"
    )
    return buffer.getvalue()


def _event_lines(events: list[EventRecord]) -> list[str]:
    lines = []
    for e in events:
        where = (
            f"s={e.s:.6f} t={e.t:.6f}"
            if e.curve is None
            else f"curve {e.curve} tau={e.tau:.6f}"
        )
        label = "K" if e.curve is None else "k_g - k_g^u"
        lines.append(
            f"  {e.level:+.6f}  {e.classification.value:<8} {where}  "
            f"{label}={e.quantity:+.6g}  sign {'+' if e.index > 0 else '-'}"
        )
    return lines


def _direction_text(direction: list[float]) -> str:
    return "(" + ", ".join(f"{x:.12g}" for x in direction) + ")"


def _print_chi(report: ChiReport, fmt: OutputFormat) -> None:
    if fmt is OutputFormat.JSON:
        typer.echo(report.model_dump_json(indent=2))
        return
    if fmt is OutputFormat.CSV:
        typer.echo(_csv(report.events), nl=False)
        return
    lines = [f"{report.scene}: chi = {report.chi} ({report.method.value})"]
    if report.reference_chi is not None:
        lines.append(f"reference chi = {report.reference_chi}")
    lines.append(f"direction {_direction_text(report.direction)}")
    lines.append(f"{len(report.events)} events:")
    lines.extend(_event_lines(report.events))
    lines.append(f"retries: {report.genericity.retries}")
    lines.extend(f"  {reason}" for reason in report.genericity.reasons)
    typer.echo("\n".join(lines))


def _print_census(report: CensusReport, fmt: OutputFormat) -> None:
    tally = f"i2={report.i2} b2={report.b2} i1={report.i1} b1={report.b1} chi={report.chi}"
    if fmt is OutputFormat.JSON:
        typer.echo(report.model_dump_json(indent=2))
        return
    if fmt is OutputFormat.CSV:
        typer.echo(_csv(report.events, footer=f"# {tally}"), nl=False)
        return
    lines = [f"{report.scene} along {_direction_text(report.direction)}"]
    lines.extend(_event_lines(report.events))
    lines.append(tally)
    typer.echo("\n".join(lines))


def _print_validation(report: ValidationReport, fmt: OutputFormat) -> None:
    if fmt is OutputFormat.JSON:
        typer.echo(report.model_dump_json(indent=2))
        return
    if fmt is OutputFormat.CSV:
        typer.echo(_validation_csv(report), nl=False)
        return
    methods = sorted({m for row in report.directions for m in row.special})
    lines = [
        f"{report.scene}: reference chi = {report.reference_chi}",
        f"cell complex (R={report.cell_resolution}): {report.cell_complex}",
        f"Gauss-Bonnet: {report.gauss_bonnet:.12g} (residual {report.gauss_bonnet_residual:.3g})",
        "  ".join(["index", "sweep", "census", *methods, "retries", "agree"]),
    ]
    for row in report.directions:
        if row.error:
            lines.append(f"{row.index:>5}  {row.error}  direction {_direction_text(row.requested)}")
            continue
        cells = [row.index, row.sweep, row.census, *(row.special.get(m) for m in methods)]
        cells += [row.retries, "yes" if row.agrees else "NO"]
        lines.append("  ".join(str(c) for c in cells))
        if not row.agrees:
            lines.append(f"       direction {_direction_text(row.accepted or row.requested)}")
    lines.append(f"retries: max {report.max_retries_used}, mean {report.mean_retries:.3g}")
    lines.append("all agree" if report.all_agree else "DISAGREEMENT")
    typer.echo("\n".join(lines))


@app.command()
def chi(
    scene: Scene,
    direction: Direction = "random",
    seed: Seed = 0,
    fmt: Format = OutputFormat.HUMAN,
    method: Annotated[Method, typer.Option("--method", help="Counting formula.")] = Method.SWEEP,
    grid: Grid = None,
    samples: Samples = None,
    tol_k: TolK = None,
    tol_kg: TolKg = None,
    retries: Retries = None,
    verbose: Verbose = False,
) -> None:
    """Euler characteristic of a scene from the tangencies along one direction."""
    _configure_logging(verbose)
    config = _config(
        direction,
        scene=scene,
        seed=seed,
        format=fmt,
        method=method,
        grid=grid,
        samples=samples,
        tol_k=tol_k,
        tol_kg=tol_kg,
        retries=retries,
    )
    _print_chi(_run(lambda: runner.run_chi(config)), fmt)


@app.command()
def census(
    scene: Scene,
    direction: Direction = "random",
    seed: Seed = 0,
    fmt: Format = OutputFormat.CSV,
    grid: Grid = None,
    samples: Samples = None,
    tol_k: TolK = None,
    tol_kg: TolKg = None,
    retries: Retries = None,
    verbose: Verbose = False,
) -> None:
    """Sweep timeline with islands, bridges and the running tangency sum."""
    _configure_logging(verbose)
    config = _config(
        direction,
        scene=scene,
        seed=seed,
        format=fmt,
        grid=grid,
        samples=samples,
        tol_k=tol_k,
        tol_kg=tol_kg,
        retries=retries,
    )
    _print_census(_run(lambda: runner.run_census(config)), fmt)


@app.command()
def validate(
    scene: Scene,
    n: Annotated[int, typer.Option("-n", min=1, help="Number of random directions.")] = 20,
    seed: Seed = 0,
    fmt: Format = OutputFormat.HUMAN,
    workers: Annotated[int, typer.Option("--workers", min=1, help="Parallel directions.")] = 1,
    grid: Grid = None,
    samples: Samples = None,
    tol_k: TolK = None,
    tol_kg: TolKg = None,
    retries: Retries = None,
    verbose: Verbose = False,
) -> None:
    """Compare sweep, census and special counts with the cell-complex and Gauss-Bonnet oracles."""
    _configure_logging(verbose)
    config = _config(
        "random",
        scene=scene,
        seed=seed,
        format=fmt,
        grid=grid,
        samples=samples,
        tol_k=tol_k,
        tol_kg=tol_kg,
        retries=retries,
    )
    report = _run(lambda: runner.run_validate(config, n, workers))
    _print_validation(report, fmt)
    if not report.all_agree:
        raise typer.Exit(EXIT_DISAGREEMENT)


@app.command("catalog")
def catalog_command() -> None:
    """List the built-in scenes."""
    for entry in runner.list_catalog():
        chi = "?" if entry.reference_chi is None else entry.reference_chi
        typer.echo(f"{entry.name:<18} {entry.surface:<10} chi={chi!s:<3} {entry.description}")


def main() -> None:
    app()


if __name__ == "__main__":
    main()
