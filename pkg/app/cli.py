"""Command line for the fiber lattice lab.

    python -m app.cli validate --config config.json
    python -m app.cli converge-sigma --config config.json --out artifacts/

Every subcommand reads an experiment config (JSON, defaults when omitted), writes its
artifacts into `--out` (default: the config's output directory) and prints a JSON summary
on stdout. Logs go to stderr. Exit codes: 0 success, 1 invalid parameters or config,
2 runtime failure or usage error.
"""
import os
import sys
import json
import logging
from typing import Any, Dict, Optional, Sequence

import click
from pydantic import ValidationError

from app.utils import load_config, setup_logging, write_json
from app.ops.experiment_ops import (
    check_config,
    energy_run,
    limit_run,
    minimize_run,
    pick_eps,
    sample_run,
    study_run,
)
from app.schemas import (
    FiberSampleSchema,
    SolveReportSchema,
    ValidationSchema,
    breakdown_schema,
)
from lattice_model.core import InvalidParameters, LatticeModelError
from lattice_model.experiments import ExperimentConfig


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


class ConfigError(click.ClickException):
    """The config file could not be read or does not describe an experiment."""
    exit_code = EXIT_INVALID


def _emit(payload: Dict[str, Any]) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _config(config_path: Optional[str], seed: Optional[int] = None,
            symmetric: Optional[bool] = None, sampler: Optional[str] = None,
            workers: Optional[int] = None) -> ExperimentConfig:
    try:
        cfg = load_config(config_path)
    except (ValidationError, ValueError) as e:
        raise ConfigError(f"Invalid config {config_path}: {e}")
    changes: Dict[str, Any] = {}
    if seed is not None:
        changes["seeds"] = tuple(seed + s for s in cfg.seeds)
    if symmetric is not None:
        changes["symmetric"] = symmetric
    if sampler is not None:
        changes["sampler"] = sampler
    if workers is not None:
        changes["workers"] = workers
    return cfg.with_changes(**changes) if changes else cfg


def _out(cfg: ExperimentConfig, out: Optional[str]) -> str:
    return out or cfg.output


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="Experiment config (JSON). Defaults apply when omitted.")
out_option = click.option(
    "--out", type=click.Path(file_okay=False), default=None,
    help="Artifact directory. Defaults to the config's output directory.")
eps_option = click.option(
    "--eps", type=float, default=None, help="Grid size. Defaults to the coarsest of the config.")
symmetric_option = click.option(
    "--symmetric/--no-symmetric", default=None, help="Override the config's symmetric flag.")


def run_options(func):
    """Options of the single-run subcommands."""
    for option in reversed([config_option, eps_option,
                            click.option("--seed", type=int, default=0, show_default=True,
                                         help="Fiber seed."),
                            out_option, symmetric_option]):
        func = option(func)
    return func


def study_options(func):
    for option in reversed([config_option,
                            click.option("--seed", type=int, default=None,
                                         help="Shift every seed of the config by this value."),
                            out_option, symmetric_option,
                            click.option("--sampler", type=click.Choice(["shells", "naive"]),
                                         default=None),
                            click.option("--workers", type=click.IntRange(min=1), default=None)]):
        func = option(func)
    return func


@click.group()
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL.")
def main(log_level):
    setup_logging(log_level)


@main.command()
@config_option
def validate(config_path):
    """Check a config and print the derived exponents."""
    cfg = _config(config_path)
    violations, params = check_config(cfg)
    report = ValidationSchema.build(violations, params)
    _emit(report.model_dump())
    for violation in violations:
        click.echo(f"Violated: {violation}", err=True)
    return EXIT_OK if report.valid else EXIT_INVALID


@main.command("sample-fibers")
@run_options
def sample_fibers(config_path, eps, seed, out, symmetric):
    """Sample the fibers of one run and dump them as CSV (i, j, weight)."""
    cfg = _config(config_path, symmetric=symmetric)
    fibers, expected = sample_run(cfg, eps, seed)
    path = os.path.join(_out(cfg, out), "fibers.csv")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fibers.to_csv(path)
    summary = FiberSampleSchema.from_fibers(fibers, pick_eps(cfg, eps), expected).model_dump(
        exclude={"edges"})
    _emit({**summary, "path": path})
    return EXIT_OK


@main.command()
@run_options
def energy(config_path, eps, seed, out, symmetric):
    """Discrete energy of the displacement preset for one run."""
    cfg = _config(config_path, symmetric=symmetric)
    breakdown, fibers = energy_run(cfg, eps, seed)
    payload = {"eps": pick_eps(cfg, eps), "seed": seed, "nodes": fibers.grid.size,
               "edges": len(fibers), "energy": breakdown_schema(breakdown).model_dump()}
    write_json(payload, os.path.join(_out(cfg, out), "energy.json"))
    _emit(payload)
    return EXIT_OK


@main.command("minimize")
@run_options
@click.option("--tol", type=float, default=None,
              help="Gradient tolerance relative to 1 + |eps^d f|.")
@click.option("--maxiter", type=int, default=None)
def minimize_command(config_path, eps, seed, out, symmetric, tol, maxiter):
    """Minimize the discrete energy under the force preset for one run."""
    cfg = _config(config_path, symmetric=symmetric)
    report = minimize_run(cfg, eps, seed, tol, maxiter)
    directory = _out(cfg, out)
    os.makedirs(directory, exist_ok=True)
    report.minimizer.to_csv(os.path.join(directory, "minimizer.csv"))
    payload = SolveReportSchema.from_report(report, pick_eps(cfg, eps), seed).model_dump()
    write_json(payload, os.path.join(directory, "minimize.json"))
    _emit(payload)
    return EXIT_OK


@main.command("limit-energy")
@config_option
@out_option
@click.option("--resolution", type=click.IntRange(min=1), default=32, show_default=True,
              help="Panels per axis for the local and work terms.")
@click.option("--nonlocal-resolution", type=click.IntRange(min=1), default=4, show_default=True,
              help="Starting panels per axis for the nonlocal term.")
@click.option("--rtol", type=float, default=1e-4, show_default=True)
def limit_energy(config_path, out, resolution, nonlocal_resolution, rtol):
    """Limit functional at the displacement preset."""
    cfg = _config(config_path)
    breakdown = limit_run(cfg, resolution, nonlocal_resolution, rtol)
    payload = breakdown_schema(breakdown).model_dump()
    write_json(payload, os.path.join(_out(cfg, out), "limit.json"))
    _emit(payload)
    return EXIT_OK


def _study(study: str):
    @study_options
    def command(config_path, seed, out, symmetric, sampler, workers):
        cfg = _config(config_path, seed, symmetric, sampler, workers)
        rows, summary, paths = study_run(cfg, study, _out(cfg, out))
        logger.info(f"{study}: {len(rows)} rows written to {paths[0]}")
        _emit(summary)
        return EXIT_OK
    command.__doc__ = f"Run the {study} study and write {study}.csv and {study}.json."
    return main.command(study)(command)


converge_sigma = _study("converge-sigma")
converge_recovery = _study("converge-recovery")
converge_minimizers = _study("converge-minimizers")


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code instead of exiting."""
    try:
        result = main.main(args=list(argv) if argv is not None else None,
                           prog_name="fiberlat", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_FAILURE
    except InvalidParameters as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_INVALID
    except (LatticeModelError, ValueError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        return EXIT_FAILURE
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run_cli())
