"""Command-line interface for bath-separability calculations."""

import json
import logging
import sys

import click
import numpy as np
import pandas as pd
from dotenv import load_dotenv

from .config import (
    get_log_level,
    get_workers,
    load_json,
    load_operator,
    parse_bath,
    parse_greens,
    parse_heatmap,
    parse_siam,
)
from .database.db import record_run
from .database.models import RunKind
from .entanglement import entropy_bound, reduce_state, schmidt_bound, von_neumann
from .errors import DegenerateKernelError, InvalidInputError, NumericError
from .hilbert.basis import diagonalize
from .projection.blocks import project
from .renorm import find_fixed_points, kernel_build, kernel_quadratic_form, trace_curves
from .renorm.fixed_points import universe_vector
from .sweep import (
    DEFAULT_AXES,
    OutputFormat,
    bath_phi_sweep,
    heatmap,
    persist,
    scan_all_states,
    write_frame,
    write_json,
)
from .weakcoupling import compare_to_lorentzian, greens_frame, siam_for_width, siam_report

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 400
RANGE_PADDING = 0.1


def _emit_json(data, out: str | None) -> None:
    if out:
        write_json(data, out)
    else:
        click.echo(json.dumps(data, indent=2, default=_plain))


def _emit_frame(frame: pd.DataFrame, out: str | None, fmt: str) -> None:
    if out:
        write_frame(frame, out, fmt)
    elif fmt == "json":
        click.echo(json.dumps(frame.to_dict(orient="records"), indent=2, default=_plain))
    else:
        click.echo(frame.to_csv(index=False, float_format="%.12g"), nl=False)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _parse_axis(text: str) -> tuple[float, float, float]:
    try:
        axis = np.array([float(x) for x in text.split(",")])
    except ValueError as e:
        raise InvalidInputError(f"axis must be three comma-separated numbers, got {text!r}") from e
    if axis.shape != (3,) or not np.linalg.norm(axis) > 0:
        raise InvalidInputError(f"axis must be a non-zero 3-vector, got {text!r}")
    return tuple(axis / np.linalg.norm(axis))


def _omega_range(H, omega_min: float | None, omega_max: float | None) -> tuple[float, float]:
    values = H.eigenvalues
    pad = RANGE_PADDING * max(float(values[-1] - values[0]), 1.0)
    lo = float(values[0] - pad) if omega_min is None else omega_min
    hi = float(values[-1] + pad) if omega_max is None else omega_max
    return lo, hi


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False),
    help="JSON configuration file",
)
out_option = click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout)")
table_format_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", help="Table format"
)
bath_option = click.option(
    "--bath", default="0up", help="Bath state: 0up, xup, a level index or a JSON file"
)
epsilon_option = click.option(
    "--epsilon", type=float, default=1.0, show_default=True, help="Coupling scale in [0, 1]"
)
range_options = [
    click.option("--omega-min", type=float, help="Lower frequency (default: spectrum - 10%)"),
    click.option("--omega-max", type=float, help="Upper frequency (default: spectrum + 10%)"),
    click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True),
]


def _with_range(command):
    for option in reversed(range_options):
        command = option(command)
    return command


@click.group()
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option("--record", is_flag=True, help="Store heatmap and bath-sweep runs in the database")
@click.pass_context
def main(ctx: click.Context, debug: bool, record: bool):
    """Separability of many-body eigenstates under fixed bath states."""
    logging.getLogger().setLevel(logging.DEBUG if debug else get_log_level())
    ctx.ensure_object(dict)
    ctx.obj["record"] = record


@main.command()
@config_option
@out_option
def spectrum(config_path: str, out: str | None):
    """Eigenvalues of the universe Hamiltonian."""
    H, _ = load_operator(config_path)
    eigen = diagonalize(H)
    if eigen.degenerate:
        click.echo("Warning: degenerate spectrum, non-degeneracy assumption violated", err=True)
    _emit_json(eigen.values.tolist(), out)


@main.command()
@config_option
@bath_option
@epsilon_option
@_with_range
@out_option
@table_format_option
def curves(config_path, bath, epsilon, omega_min, omega_max, samples, out, fmt):
    """Branch-tracked interaction curves ω_R(ω)."""
    H, _ = load_operator(config_path)
    blocks = project(H, parse_bath(bath, H.basis.bath_dim), epsilon)
    lo, hi = _omega_range(H, omega_min, omega_max)
    traced = trace_curves(blocks, lo, hi, samples)
    if not traced.tracking_ok:
        click.echo("Warning: branch tracking fell below the overlap threshold", err=True)
    _emit_frame(traced.to_frame(), out, fmt)


def _record_rows(H, blocks, records) -> list[dict]:
    try:
        kernel = kernel_build(blocks)
    except DegenerateKernelError:
        kernel = None
    rows = []
    for record in records:
        row = record.to_dict()
        vector = blocks.to_original(universe_vector(blocks, record.omega_lambda, record.eigenvector))
        row["entropy_exact"] = von_neumann(reduce_state(H.basis, vector))
        row["entropy_bound"] = entropy_bound(record.Z)
        row["kernel_estimate"] = None
        row["kernel_discrepancy"] = None
        if kernel is not None and not kernel.rank_deficient:
            estimate = kernel_quadratic_form(blocks, kernel, record)
            row["kernel_estimate"] = estimate.kernel_value
            row["kernel_discrepancy"] = estimate.discrepancy
        rows.append(row)
    return rows


@main.command("fixed-points")
@config_option
@bath_option
@epsilon_option
@_with_range
@out_option
def fixed_points(config_path, bath, epsilon, omega_min, omega_max, samples, out):
    """Fixed points ω_R(ω) = ω with separability, weights and entropies."""
    H, _ = load_operator(config_path)
    blocks = project(H, parse_bath(bath, H.basis.bath_dim), epsilon)
    lo, hi = _omega_range(H, omega_min, omega_max)
    records = find_fixed_points(trace_curves(blocks, lo, hi, samples), blocks)
    _emit_json(_record_rows(H, blocks, records), out)


@main.command("bath-sweep")
@config_option
@bath_option
@click.option("--axis", "axes", multiple=True, help="Rotation axis x,y,z (repeatable)")
@click.option("--phi-steps", type=int, default=129, show_default=True)
@click.option("--optimize", is_flag=True, help="Also report the maximum Z over all bath states")
@out_option
@table_format_option
@click.pass_context
def bath_sweep(ctx, config_path, bath, axes, phi_steps, optimize, out, fmt):
    """Z(φ) of every eigenstate while the bath state is rotated."""
    H, _ = load_operator(config_path)
    base = parse_bath(bath, H.basis.bath_dim)
    axes = [_parse_axis(a) for a in axes] or list(DEFAULT_AXES)
    config = {"config": str(config_path), "bath": bath, "axes": axes, "phi_steps": phi_steps}

    def _sweep():
        eigen = diagonalize(H)
        frames = []
        for k, axis in enumerate(axes):
            frame = bath_phi_sweep(H, base, axis, phi_steps, eigen=eigen).to_frame()
            frames.append(frame.assign(axis=k))
        _emit_frame(pd.concat(frames, ignore_index=True), out, fmt)
        if optimize:
            for optimum in scan_all_states(H, base_bath=base, eigen=eigen):
                summary = {
                    "state": optimum.eig_index,
                    "Z_max": optimum.Z_max,
                    "schmidt_bound": schmidt_bound(H, optimum.eig_index, eigen),
                    "axis": list(optimum.rotation.axis),
                    "angle": optimum.rotation.angle,
                }
                click.echo(json.dumps(summary))

    if ctx.obj["record"]:
        with record_run(RunKind.BATH_SWEEP, config, out):
            _sweep()
    else:
        _sweep()


@main.command("heatmap")
@config_option
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output file")
@click.option(
    "--format", "fmt", type=click.Choice([f.value for f in OutputFormat]), default="csv"
)
@click.option("--workers", type=int, help="Worker processes (default: config, then environment)")
@click.pass_context
def heatmap_command(ctx, config_path, out, fmt, workers):
    """Maximum separability of the four eigenstates over (J0x, V0x)."""
    data = load_json(config_path)
    params, grid, config_workers = parse_heatmap(data)
    workers = workers or config_workers or get_workers()

    if ctx.obj["record"]:
        with record_run(RunKind.HEATMAP, data, out):
            result = heatmap(params, grid, workers)
            persist(result, out, fmt)
    else:
        result = heatmap(params, grid, workers)
        persist(result, out, fmt)
    click.echo(f"{len(result)} grid point(s) written to {out}")


@main.command()
@config_option
@out_option
def siam(config_path, out):
    """Impurity spectral weights against the analytic Lorentzian."""
    config = parse_siam(load_json(config_path))
    model = siam_for_width(
        config.omega_s,
        config.delta0,
        config.bandwidth,
        config.modes,
        config.width_convention,
        config.edge_compensation,
    )
    comparison = compare_to_lorentzian(model)
    _emit_json(siam_report(model, comparison, config.delta0), out)


@main.command()
@config_option
@out_option
@table_format_option
@click.option("--no-numeric", is_flag=True, help="Skip the quadrature cross-check column")
def greens(config_path, out, fmt, no_numeric):
    """Time-domain impurity Green's function and the two-level propagators."""
    config = parse_greens(load_json(config_path))
    frame = greens_frame(config.omega_s, config.delta0, config.t_grid(), numeric=not no_numeric)
    _emit_frame(frame, out, fmt)


def run(argv: list[str] | None = None) -> int:
    """Run the CLI and map failures to exit codes.

    Returns:
        0 on success, 1 for invalid input or usage errors, 2 for numeric failures.
    """
    try:
        main.main(args=argv, prog_name="separability", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    except (NumericError, np.linalg.LinAlgError) as e:
        click.echo(f"Numeric error: {e}", err=True)
        return 2
    except (InvalidInputError, ValueError, OSError) as e:
        click.echo(f"Invalid input: {e}", err=True)
        return 1
    return 0


def entrypoint() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entrypoint()
