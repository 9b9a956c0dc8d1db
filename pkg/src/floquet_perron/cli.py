"""Command-line front end.

Exit statuses: 0 success, 1 error, 2 inequality violated beyond tolerance
(``eigen``), 3 violations in a default-scheme (``paper``) sweep (``sweep``).
"""
import contextlib
import os
import sys

import click

from . import __version__, config, kernels
from .cellcycle import (
    CellCycleModel,
    averaged_perron_rate,
    artificial_loss,
    check_assumptions,
    simulate_growth,
)
from .coefficients import SCHEMES, PeriodicMatrix, average_matrix_discrete, average_matrix_ode
from .comparison import Comparison
from .errors import InvalidInputError
from .floquet_discrete import eigen_orbit, floquet_discrete
from .floquet_ode import floquet_eigenfunction, integrate_fundamental
from .lab import run_sweep
from .schema import SCHEMA_VERSION, load_model, load_sweep_config, model_kind, sweep_config_to_dict, write_summary, write_table
from .spectral import perron_metzler, perron_nonneg

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION, EXIT_SWEEP_VIOLATION = 0, 1, 2, 3


def _provenance():
    """Defaults and environment overrides echoed into every report."""
    return {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "backend": kernels.BACKEND,
        "default.steps": config.ODE_STEPS,
        "default.dx_per_period": 1.0 / config.PDE_STEPS_PER_PERIOD,
        "default.periods_warmup": config.PDE_WARMUP_PERIODS,
        "default.periods_measure": config.PDE_MEASURE_PERIODS,
        "default.tol_ode": config.TOL_COMPARE,
        "default.tol_discrete": config.TOL_COMPARE_DISCRETE,
        "default.tol_pde": config.TOL_COMPARE_PDE,
        "env.tol_var": config.TOL_ENV_VAR,
        "env.tol_value": os.environ.get(config.TOL_ENV_VAR, ""),
        "env.tol_pde_var": config.TOL_PDE_ENV_VAR,
        "env.tol_pde_value": os.environ.get(config.TOL_PDE_ENV_VAR, ""),
    }


@contextlib.contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _eigen_ode(model, steps, tol, scheme):
    res = integrate_fundamental(model, steps)
    lam_s = perron_metzler(average_matrix_ode(model, scheme))
    tol = config.compare_tolerance() if tol is None else tol
    cmp = Comparison.of(res.floquet_eigenvalue, lam_s.eigenvalue, tol)
    ef = floquet_eigenfunction(model, res)
    diag = {
        "steps": res.steps,
        "rk4_steps": res.n_steps,
        "step_size": res.step_size,
        "monodromy_min_entry": res.min_entry,
        "perron_residual": res.perron.residual,
        "averaged_residual": lam_s.residual,
        "periodicity_residual": ef.periodicity_residual,
    }
    header = ["t"] + [f"x{i}" for i in range(model.dim)]
    rows = [[float(t), *map(float, v)] for t, v in zip(ef.times, ef.values)]
    return cmp, diag, header, rows


def _eigen_discrete(model, tol, scheme):
    rep = floquet_discrete(model)
    lam_s = perron_nonneg(average_matrix_discrete(model, scheme))
    tol = config.compare_tolerance(config.TOL_COMPARE_DISCRETE) if tol is None else tol
    cmp = Comparison.of(rep.eigenvalue, lam_s.eigenvalue, tol)
    orbit = eigen_orbit(model, rep)
    diag = {"perron_residual": rep.residual, "averaged_residual": lam_s.residual, "iterations": rep.iterations}
    header = ["k"] + [f"x{i}" for i in range(model.dim)]
    rows = [[k, *map(float, v)] for k, v in enumerate(orbit)]
    return cmp, diag, header, rows


def _eigen_cellcycle(model, dx, warmup, measure, tol, scheme):
    dx = model.period / config.PDE_STEPS_PER_PERIOD if dx is None else dx
    chk = check_assumptions(model)
    if not chk.passed:
        raise InvalidInputError(
            f"cell-cycle assumptions fail: as2_value = {chk.as2_value:.6g} must exceed 1/2 (bounded = {chk.bounded})"
        )
    run = simulate_growth(model, dx, warmup, measure)
    lam_s = averaged_perron_rate(model, dx, scheme)
    tol = config.compare_tolerance_pde() if tol is None else tol
    cmp = Comparison.of(run.report.eigenvalue, lam_s.eigenvalue, tol)
    diag = {
        "dx": dx,
        "x_max": model.x_max,
        "periods_warmup": warmup,
        "periods_measure": measure,
        "as2_value": chk.as2_value,
        "period_map_residual": run.report.residual,
        "characteristic_residual": lam_s.residual,
        "artificial_loss": float(max(artificial_loss(model))),
    }
    rows = [[float(t), float(v)] for t, v in zip(run.times, run.log_mass)]
    return cmp, diag, ["t", "log_mass"], rows


@click.group()
@click.version_option(__version__)
def cli():
    """Floquet versus averaged Perron eigenvalues for periodic positive systems."""


@cli.command()
@click.argument("model_file", type=click.Path(dir_okay=False))
@click.option("--steps", type=int, default=config.ODE_STEPS, show_default=True, help="RK4 steps per period (ode).")
@click.option("--dx", type=float, default=None, help="Age/time step (cellcycle); default period/200.")
@click.option("--warmup", type=int, default=config.PDE_WARMUP_PERIODS, show_default=True)
@click.option("--measure", type=int, default=config.PDE_MEASURE_PERIODS, show_default=True)
@click.option("--tol", type=float, default=None, help="Comparison tolerance (overrides the environment).")
@click.option("--scheme", type=click.Choice(SCHEMES), default="paper", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Summary file (default stdout).")
@click.option("--series", type=click.Path(dir_okay=False), default=None, help="CSV of eigenfunction samples or growth curve.")
def eigen(model_file, steps, dx, warmup, measure, tol, scheme, output, series):
    """Compare lambda_per with lambda_s for MODEL_FILE."""
    model = load_model(model_file)
    kind = model_kind(model)
    if kind == "ode":
        cmp, diag, header, rows = _eigen_ode(model, steps, tol, scheme)
    elif kind == "discrete":
        cmp, diag, header, rows = _eigen_discrete(model, tol, scheme)
    else:
        cmp, diag, header, rows = _eigen_cellcycle(model, dx, warmup, measure, tol, scheme)
    summary = {
        "model": model_file,
        "kind": kind,
        "scheme": scheme,
        "lambda_per": cmp.lambda_per,
        "lambda_s": cmp.lambda_s,
        "gap": cmp.gap,
        "pass": cmp.passed,
        "tolerance": cmp.tolerance,
    }
    summary.update({f"diag.{k}": v for k, v in diag.items()})
    summary.update(_provenance())
    with _sink(output) as fh:
        write_summary(fh, summary)
    if series is not None:
        meta = {"model": model_file, "kind": kind, "lambda_per": cmp.lambda_per, **_provenance()}
        with _sink(series) as fh:
            write_table(fh, header, rows, meta)
    return EXIT_OK if cmp.passed else EXIT_VIOLATION


@cli.command()
@click.argument("config_file", type=click.Path(dir_okay=False))
@click.option("--jobs", "-j", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Report file (default stdout).")
def sweep(config_file, jobs, output):
    """Run the random comparison sweep described by CONFIG_FILE."""
    cfg = load_sweep_config(config_file)
    result = run_sweep(cfg, jobs)
    meta = {f"config.{k}": v for k, v in sweep_config_to_dict(cfg).items()}
    meta["config.resolved_tolerance"] = cfg.default_tolerance()
    meta.update(_provenance())
    s = result.summary
    trailer = {
        "summary.trials": s.trials,
        "summary.completed": s.completed,
        "summary.errors": s.errors,
        "summary.min_gap": s.min_gap,
        "summary.mean_gap": s.mean_gap,
        "summary.violations": s.violations,
        "summary.violating_digests": " ".join(s.violating_digests),
    }
    header = ["trial", "digest", "lambda_per", "lambda_s", "gap", "pass", "error"]
    rows = [[r.trial, r.digest, r.lambda_per, r.lambda_s, r.gap, r.passed, r.error] for r in result.records]
    with _sink(output) as fh:
        write_table(fh, header, rows, meta, trailer)
    if output is not None:
        click.echo(f"trials = {s.trials}  errors = {s.errors}  min_gap = {s.min_gap!r}  violations = {s.violations}")
    if s.violations and cfg.scheme == "paper":
        return EXIT_SWEEP_VIOLATION
    return EXIT_OK


@cli.command()
@click.argument("model_file", type=click.Path(dir_okay=False))
def validate(model_file):
    """Check MODEL_FILE against the schema and, for cell-cycle models, the assumptions."""
    model = load_model(model_file)
    kind = model_kind(model)
    click.echo(f"kind = {kind}")
    if isinstance(model, PeriodicMatrix):
        click.echo(f"dim = {model.dim}")
    if isinstance(model, CellCycleModel):
        chk = check_assumptions(model)
        click.echo(f"bounded = {str(chk.bounded).lower()}")
        click.echo(f"as2_value = {chk.as2_value!r}")
        if not chk.passed:
            why = "coefficients unbounded or negative" if not chk.bounded else ""
            if chk.as2_value <= 0.5:
                why = f"product bound as2_value = {chk.as2_value:.6g} must exceed 1/2"
            raise InvalidInputError(f"assumptions fail: {why}")
    click.echo("valid = true")
    return EXIT_OK


def run(argv=None):
    """Run the CLI and return the exit status instead of exiting."""
    try:
        rv = cli.main(args=argv, prog_name="floquet-perron", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


def main():
    sys.exit(run())
