import shlex
import subprocess
import sys
import tempfile
from pathlib import Path

import click
from hydra import compose, initialize_config_dir
from hydra.core.global_hydra import GlobalHydra
from hydra.errors import HydraException
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from src.config import SCHEMAS, load_config
from src.exception import ConfigError
from src.io_util import read_json

CONF_DIR = Path(__file__).resolve().parent / "run" / "conf"
EXIT_CONFIG = 2

FIGURES = {
    "fig1": "deflate",
    "fig2": "spectrum",
    "fig3": "solve",
    "fig4": "spectrum",
    "fig5": "solve",
    "fig6": "improve",
    "fig7": "estimate",
    "fig8": "estimate",
    "fig9": "solve",
}


def snapshot_config(manifest_path: Path, command: str) -> Path:
    """Write the config recorded in a run manifest as a standalone hydra config."""
    manifest = read_json(manifest_path)
    if manifest["command"] != command:
        raise click.UsageError(f"{manifest_path} records a `{manifest['command']}` run, not `{command}`")
    config = dict(manifest["config"])
    config["hydra"] = {"run": {"dir": "${env.output_dir}"}, "job": {"chdir": True}}
    path = Path(tempfile.mkdtemp(prefix="rerun-")) / f"{command}.yaml"
    OmegaConf.save(OmegaConf.create(config), path)
    return path


def resolve_config(command: str, config: str | None, default_name: str) -> tuple[Path | None, str]:
    """(extra config dir or None, config name) for a --config value."""
    if config is None:
        return None, default_name
    path = Path(config).resolve()
    if not path.exists():
        raise click.BadParameter(f"no such config file: {config}", param_hint="--config")
    if path.suffix == ".json":
        path = snapshot_config(path, command)
    return path.parent, path.stem


def flag_overrides(seed, jobs, out, full, svg) -> list[str]:
    overrides = []
    if seed is not None:
        overrides.append(f"seed={seed}")
    if jobs is not None:
        overrides.append(f"env.num_workers={jobs}")
    if out is not None:
        overrides.append(f"env.output_dir={Path(out).resolve()}")
    if full:
        overrides.append("scale=full")
    if svg:
        overrides.append("svg=true")
    return overrides


def check_config(command: str, config_dir: Path | None, config_name: str, overrides: list[str]):
    """Compose the config the way the entry point will and validate it against its schema."""
    if GlobalHydra.instance().is_initialized():
        GlobalHydra.instance().clear()

    search = [] if config_dir is None else [f"hydra.searchpath=[file://{CONF_DIR}]"]
    with initialize_config_dir(config_dir=str(config_dir or CONF_DIR), version_base="1.2"):
        cfg = compose(config_name=config_name, overrides=search + overrides)
    load_config(cfg, SCHEMAS[command])
    return cfg


def launch(command, config_name, config, seed, jobs, out, full, svg, dry_run, overrides):
    config_dir, config_name = resolve_config(command, config, config_name)
    overrides = flag_overrides(seed, jobs, out, full, svg) + list(overrides)
    try:
        cfg = check_config(command, config_dir, config_name, overrides)
    except (ConfigError, HydraException, OmegaConfBaseException) as e:
        click.echo(f"[ERROR] invalid config: {e}", err=True)
        sys.exit(EXIT_CONFIG)

    cmd = [sys.executable, "-m", f"run.{command}", f"--config-name={config_name}"]
    if config_dir is not None:
        cmd.append(f"--config-dir={config_dir}")
    cmd += overrides
    print(shlex.join(cmd))
    if dry_run:
        print(OmegaConf.to_yaml(cfg, resolve=True))
        return
    result = subprocess.run(cmd, cwd=CONF_DIR.parent.parent)
    sys.exit(result.returncode)


def common_options(fn):
    options = [
        click.option("--config", type=click.Path(dir_okay=False), default=None, help="config YAML or a run manifest.json"),
        click.option("--seed", type=int, default=None, help="base seed; trial t uses seed + t"),
        click.option("--jobs", type=int, default=None, help="worker processes"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="output directory"),
        click.option("--full", is_flag=True, help="full-scale trial counts"),
        click.option("--svg", is_flag=True, help="also render SVG charts"),
        click.option("--dry_run", is_flag=True, help="print the command and resolved config only"),
        click.argument("overrides", nargs=-1),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@click.group()
def cli():
    """Experiments on orthogonalized deflation of rank-two spiked tensors.

    Extra arguments are hydra overrides (key=value) and win over every file
    and flag. Exit codes: 0 success, 2 config error, 3 numeric failure.
    """


@cli.command()
@common_options
def spectrum(**kwargs):
    """Spectrum of the contraction matrices of one realization.

    \b
    spectrum_N.csv, spectrum_M.csv: index, eigenvalue
    histogram_N.csv, histogram_M.csv: bin_center, density
    density_N.csv (semicircle), density_M.csv (law at the solved tau): x, density
    spectrum.json: run record with ks_N, sup_deviation_N, tau, ks_M, ...
    """
    launch("spectrum", "spectrum", **kwargs)


@cli.command()
@common_options
def deflate(**kwargs):
    """Seeded two-step deflation trials.

    \b
    trials.csv: beta1, beta2, alpha, trial, seed, gamma, lambda1_hat, lambda2_hat,
      n_iter1, n_iter2, rho11_hat, rho12_hat, theta21_hat, theta22_hat, rho21_hat,
      rho22_hat, kappa_hat, eta_hat, spread_rho1, spread_rho2, spread_eta,
      mode_spread, rho1_matched, rho2_matched, status
    summary.csv: beta1, beta2, alpha, gamma, num_trials, <value>_mean, <value>_std, num_ok
    deflate.json: the trial rows, written for single-seed runs
    """
    launch("deflate", "deflate", **kwargs)


@cli.command()
@common_options
def solve(**kwargs):
    """Asymptotic alignments over an SNR or gamma grid.

    \b
    asymptotics.csv: beta1, beta2, alpha, gamma, lambda1, rho11, rho12,
      first_residual, lambda2, theta21, theta22, rho21, rho22, kappa, eta, tau,
      second_residual, theta2_max, rho2_max, status, init
    simulations.csv: deflation trial rows at every grid point (num_trials > 0)
    summary.csv: simulated means/stds joined with the asymptotic columns
    """
    launch("solve", "solve", **kwargs)


@cli.command()
@common_options
def estimate(**kwargs):
    """Model-parameter estimation from gamma = 1 deflations.

    \b
    trials.csv: beta1, beta2, alpha, trial, seed, lambda1_hat, lambda2_hat, eta_hat,
      beta1_hat, beta2_hat, alpha_hat, alpha_reported, residual_norm, out_of_model,
      <alignment>_tilde (estimated), <alignment>_hat (simulated),
      beta1_error, beta2_error, alpha_error, status
    summary.csv: per (beta1, beta2, alpha) means/stds, roundtrip_error, roundtrip_status
    """
    launch("estimate", "estimate", **kwargs)


@cli.command()
@common_options
def improve(**kwargs):
    """Improved deflation (gamma tuned from the asymptotics) against gamma = 1.

    \b
    trials.csv: beta1, beta2, alpha, trial, seed, gamma_star, baseline_rho1,
      baseline_rho2, improved_rho1, improved_rho2, gain_rho2, beta1_hat, beta2_hat,
      alpha_hat, sweep_length, status
    summary.csv: per alpha means/stds over ok, boundary and estimation_failed rows
    sweep_traces.csv: alpha, trial, gamma, tracked, rho21, rho22, lambda2, kappa, eta
    improve.json: full run records, written for single-seed runs
    """
    launch("improve", "improve", **kwargs)


@cli.command()
@click.argument("name", type=click.Choice(sorted(FIGURES)))
@common_options
def figure(name, **kwargs):
    """Run a figure preset (run/conf/<name>.yaml) with its command."""
    launch(FIGURES[name], name, **kwargs)


if __name__ == "__main__":
    cli()
