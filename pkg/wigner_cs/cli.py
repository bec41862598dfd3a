"""Command-line interface and main entry point."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from wigner_cs import __version__, constants as C
from wigner_cs.cache import (
    RunStore,
    ensure_directories,
    matrix_to_json,
    read_complex_csv,
    read_samples_csv,
    write_complex_csv,
    write_formatted_json,
    write_matrix_csv,
    write_rows_csv,
    write_samples_csv,
    write_two_column,
)
from wigner_cs.config import COMMANDS, RunConfig, resolve_config
from wigner_cs.constants import ModeKind, Sampler, SmcModel, Stream
from wigner_cs.exceptions import ConfigError, FormatError, WignerCSError
from wigner_cs.harness import (
    NormalizedSolver,
    PhaseGridConfig,
    coherence_benchmark,
    farfield_demo,
    lp_sweep,
    phase_transition,
    run_optimizer,
    synthetic_smc,
)
from wigner_cs.modes import mode_count, mode_table
from wigner_cs.sampling import apply_chi, equiangular, hammersley, random_uniform, spiral
from wigner_cs.seeds import derive_rng
from wigner_cs.sensing import build_matrix, coherence

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    cfg = parent.add_argument_group("configuration")
    cfg.add_argument("--config", metavar="PATH", help="TOML config file ([common] and per-command tables)")
    cfg.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", dest="sets",
                     help="override any config key (value parsed as TOML); repeatable")
    cfg.add_argument("--seed", type=int, metavar="N", help="64-bit run seed (default: 0)")
    cfg.add_argument("--output-dir", metavar="DIR", help=f"output directory (default: {C.DIR_OUTPUT})")
    cfg.add_argument("--jobs", type=int, metavar="N", help="worker threads (default: CPU count)")
    cfg.add_argument("--ignore-cache", action="store_true", default=None,
                     help="discard cached optimizer runs before starting")
    cfg.add_argument("-v", "--verbose", action="store_true", default=None, help="enable verbose output")
    cfg.add_argument("--log-file", metavar="PATH",
                     help="write log output to this file in addition to the terminal")
    return parent


def _problem_args(parser: argparse.ArgumentParser, k: bool = True) -> None:
    grp = parser.add_argument_group("problem")
    grp.add_argument("--kind", choices=[str(m) for m in ModeKind], help="sensing-matrix family")
    grp.add_argument("--n", type=int, dest="N", metavar="N", help="truncation degree")
    if k:
        grp.add_argument("--k", type=int, dest="K", metavar="K", help="number of samples")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wigner_cs",
        description="Design low-coherence Wigner/spherical-harmonic sensing matrices and test sparse recovery.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""examples:
  python -m wigner_cs sample --sampler spiral --k 100
  python -m wigner_cs coherence --kind sh --n 9 --samples output/samples.csv
  python -m wigner_cs optimize --algo alm --config configs/sh_n9.toml
  python -m wigner_cs phase --config configs/phase_sh.toml --jobs 8
  python -m wigner_cs farfield --config configs/farfield_snf.toml""",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parent = _common_parent()
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("sample", parents=[parent], help="generate a baseline sampling set")
    _problem_args(p)
    p.add_argument("--sampler", choices=["spiral", "hammersley", "random", "equiangular"])
    p.add_argument("--chi-policy", metavar="POLICY", help="even | alternate | free | fixed:RAD")
    p.add_argument("--step-deg", type=float, metavar="DEG", help="equiangular step (must divide 180)")
    p.add_argument("--out", metavar="PATH", help="CSV path (default: <output-dir>/samples.csv)")

    p = sub.add_parser("coherence", parents=[parent], help="mutual coherence of a sampling file")
    _problem_args(p, k=False)
    p.add_argument("--samples", dest="samples_file", metavar="PATH", help="sampling CSV")
    p.add_argument("--export-matrix", choices=["csv", "json"], help="also write the sensing matrix")

    p = sub.add_parser("optimize", parents=[parent], help="optimize sampling points")
    _problem_args(p)
    p.add_argument("--algo", choices=[str(Sampler.OPTIMIZED_GD), str(Sampler.OPTIMIZED_ALM)])
    p.add_argument("--T", type=int, dest="T", metavar="N", help="iterations")
    p.add_argument("--restarts", type=int, metavar="N")
    p.add_argument("--p", type=float, dest="p", metavar="P", help="ℓp smoothing exponent (gd)")
    p.add_argument("--eta", type=float, metavar="STEP", help="step size (gd)")
    p.add_argument("--tau", type=float, metavar="TAU", help="penalty (alm)")
    p.add_argument("--lambda-reg", type=float, metavar="LAMBDA", help="regularization (alm)")
    p.add_argument("--dual-update", choices=["standard", "literal"], help="multiplier update (alm)")

    p = sub.add_parser("recover", parents=[parent], help="basis-pursuit recovery from a sampling file")
    _problem_args(p, k=False)
    p.add_argument("--samples", dest="samples_file", metavar="PATH", help="sampling CSV")
    p.add_argument("--measurements", dest="measurements_file", metavar="PATH",
                   help="re,im CSV (default: synthetic coefficients)")
    p.add_argument("--sparsity", type=int, metavar="S")
    p.add_argument("--smc-model", choices=[str(m) for m in SmcModel])

    p = sub.add_parser("phase", parents=[parent], help="phase-transition grid")
    _problem_args(p, k=False)
    p.add_argument("--sampler", choices=[str(s) for s in Sampler])
    p.add_argument("--trials", type=int, metavar="N")

    p = sub.add_parser("farfield", parents=[parent], help="synthetic far-field reconstruction")
    p.add_argument("--n", type=int, dest="N", metavar="N", help="truncation degree")
    p.add_argument("--sampler", choices=[str(s) for s in Sampler])
    p.add_argument("--k-list", metavar="K,K,...", help="comma-separated sample counts")
    p.add_argument("--smc-model", choices=[str(m) for m in SmcModel])
    p.add_argument("--sparsity", type=int, metavar="S")

    p = sub.add_parser("benchmark", parents=[parent], help="coherence versus K per sampler")
    _problem_args(p, k=False)
    p.add_argument("--k-list", metavar="K,K,...", help="comma-separated sample counts")
    p.add_argument("--samplers", metavar="NAME,...", help="comma-separated samplers")
    p.add_argument("--restarts", type=int, metavar="N")
    p.add_argument("--p-values", metavar="P,P,...", help="also run the ℓp exponent sweep at the first K")

    return parser


_FLAG_KEYS = (
    "seed", "output_dir", "jobs", "ignore_cache", "verbose", "log_file", "kind", "N", "K", "sampler",
    "chi_policy", "step_deg", "out", "samples_file", "export_matrix", "algo", "T", "restarts", "p", "eta",
    "tau", "lambda_reg", "dual_update", "measurements_file", "sparsity", "smc_model", "trials", "k_list",
    "samplers", "p_values",
)


def _build_config(ns: argparse.Namespace) -> RunConfig:
    """Convert parsed arguments into a :class:`RunConfig` instance."""
    flags = {key: getattr(ns, key) for key in _FLAG_KEYS if getattr(ns, key, None) is not None}
    if ns.command not in COMMANDS:
        raise ConfigError(f"unknown command {ns.command!r}")
    return resolve_config(ns.command, ns.config, flags, ns.sets)


# ---------------------------------------------------------------------------
# Logging setup
# ---------------------------------------------------------------------------

class _ColouredFormatter(logging.Formatter):
    _COLOURS = {
        logging.WARNING: "\033[1;33m",
        logging.ERROR: "\033[1;31m",
        logging.CRITICAL: "\033[1;31m",
    }
    _RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        colour = self._COLOURS.get(record.levelno, self._RESET)
        copy = logging.makeLogRecord(record.__dict__)
        copy.msg = f"{colour}{record.msg}{self._RESET}"
        return super().format(copy)


def _setup_logging(verbose: bool, log_file: str | None = None) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    fmt = "%(asctime)s [%(levelname)s] %(message)s"
    datefmt = "%Y-%m-%d %H:%M:%S"

    root = logging.getLogger()
    root.setLevel(level)
    # Repeated main() calls in one process must not stack handlers
    for handler in [h for h in root.handlers if getattr(h, "_wigner_cs", False)]:
        root.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(_ColouredFormatter(fmt, datefmt=datefmt))
    console._wigner_cs = True  # type: ignore[attr-defined]
    root.addHandler(console)

    # Optional file handler (plain text, no ANSI codes)
    if log_file:
        fh = logging.FileHandler(log_file, encoding="utf-8")
        fh.setLevel(level)
        fh.setFormatter(logging.Formatter(fmt, datefmt=datefmt))
        fh._wigner_cs = True  # type: ignore[attr-defined]
        root.addHandler(fh)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _out(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.output_dir, name)


def _store(cfg: RunConfig) -> RunStore:
    store = RunStore(_out(cfg, C.FILE_RUN_STORE))
    if cfg.ignore_cache:
        store.clear()
    return store


def _experiment_sampler(cfg: RunConfig) -> Sampler:
    if cfg.sampler not in {str(s) for s in Sampler}:
        raise ConfigError(f"sampler {cfg.sampler!r} is not available for experiments")
    return Sampler(cfg.sampler)


def _require(value: str | None, flag: str) -> str:
    if not value:
        raise ConfigError(f"{flag} is required for this command")
    return value


def cmd_sample(cfg: RunConfig) -> None:
    sampler = cfg.sampler
    if sampler == "equiangular":
        samples = equiangular(cfg.step_deg if cfg.step_deg is not None else 10.0)
    elif sampler == str(Sampler.SPIRAL):
        samples = spiral(cfg.K)
    elif sampler == str(Sampler.HAMMERSLEY):
        samples = hammersley(cfg.K)
    elif sampler == str(Sampler.RANDOM):
        samples = random_uniform(cfg.K, cfg.seed)
    else:
        raise ConfigError(f"sample supports spiral, hammersley, random and equiangular (got {sampler!r})")

    policy = cfg.chi()
    if policy is not None:
        samples = apply_chi(samples, policy)

    path = cfg.out or _out(cfg, C.FILE_SAMPLES_CSV)
    write_samples_csv(samples, path, meta={"sampler": sampler, "seed": cfg.seed, "chi_policy": cfg.chi_policy})
    logger.info("Wrote %d samples → %s", samples.K, path)


def cmd_coherence(cfg: RunConfig) -> None:
    samples = read_samples_csv(_require(cfg.samples_file, "--samples"))
    rounded = np.round(samples.stacked(), 12)
    distinct = np.unique(rounded, axis=0).shape[0]
    if distinct < samples.K:
        logger.warning("%d of %d samples are repeated; the matrix has duplicate rows.", samples.K - distinct, samples.K)

    matrix = build_matrix(cfg.mode_kind, cfg.N, samples)
    report = coherence(matrix)
    data = {"kind": cfg.kind, "N": cfg.N, **report.to_json()}
    write_formatted_json(data, _out(cfg, C.FILE_COHERENCE_JSON))
    write_formatted_json(mode_table(cfg.mode_kind, cfg.N).to_json(), _out(cfg, C.FILE_MODES_JSON))
    if cfg.export_matrix == "csv":
        write_matrix_csv(matrix, _out(cfg, C.FILE_MATRIX_CSV))
    elif cfg.export_matrix == "json":
        write_formatted_json(matrix_to_json(matrix), _out(cfg, C.FILE_MATRIX_JSON))

    print(json.dumps(data, indent=4))
    logger.info("Coherence %.6f (Welch bound %.6f) at pair %s", report.mu, report.welch, report.argmax_pair)


def cmd_optimize(cfg: RunConfig) -> None:
    store = _store(cfg)
    try:
        run = run_optimizer(Sampler(cfg.algo), cfg.mode_kind, cfg.N, cfg.K, cfg.seed, cfg.sampler_settings(), store)
    finally:
        store.close()

    write_formatted_json(run.to_json(), _out(cfg, C.FILE_RUN_JSON))
    write_samples_csv(run.best_angles, _out(cfg, C.FILE_SAMPLES_CSV),
                      meta={"sampler": cfg.algo, "seed": cfg.seed, "best_mu": run.best_mu})
    write_two_column(_out(cfg, C.FILE_RHO_TRACE), range(len(run.rho_trace)), run.rho_trace)
    logger.info("Best coherence %.6f (restart %d)", run.best_mu, run.best_restart)


def cmd_recover(cfg: RunConfig) -> None:
    samples = read_samples_csv(_require(cfg.samples_file, "--samples"))
    kind = cfg.mode_kind
    A = build_matrix(kind, cfg.N, samples).data
    truth = None
    if cfg.measurements_file:
        y = read_complex_csv(cfg.measurements_file)
    else:
        L = mode_count(kind, cfg.N)
        smc = synthetic_smc(L, min(cfg.sparsity, L), derive_rng(cfg.seed, Stream.SMC),
                            SmcModel(cfg.smc_model), cfg.decay_rate)
        truth = smc.coeffs
        y = A @ truth
        write_complex_csv(y, _out(cfg, C.FILE_MEASUREMENTS_CSV))

    if y.shape != (samples.K,):
        raise FormatError(f"{y.size} measurements for {samples.K} samples", path=cfg.measurements_file)
    result = NormalizedSolver(A, cfg.recovery_settings()).solve(y)

    data = {"kind": cfg.kind, "N": cfg.N, "K": samples.K, **result.to_json(),
            "settings": cfg.recovery_settings().to_json()}
    if truth is not None:
        data["relative_error"] = float(np.linalg.norm(result.x_hat - truth) / np.linalg.norm(truth))
    write_formatted_json(data, _out(cfg, C.FILE_RECOVERY_JSON))
    write_complex_csv(result.x_hat, _out(cfg, C.FILE_COEFFS_CSV))
    logger.info("Recovery %s after %d iterations, residual %.3g",
                "converged" if result.converged else "did not converge", result.iterations, result.residual_norm)


def cmd_phase(cfg: RunConfig) -> None:
    grid = PhaseGridConfig(
        kind=cfg.mode_kind, N=cfg.N, k_over_l_values=cfg.k_over_l, s_over_k_values=cfg.s_over_k,
        trials=cfg.trials, sampler=_experiment_sampler(cfg), seed=cfg.seed, rel_tol=cfg.rel_tol,
        recovery=cfg.recovery_settings(), sampler_settings=cfg.sampler_settings(), jobs=cfg.jobs,
    )
    store = _store(cfg)
    try:
        result = phase_transition(grid, store)
    finally:
        store.close()

    write_rows_csv(result.rows(), _out(cfg, C.FILE_PHASE_CSV), ["k_over_l", "s_over_k", "K", "s", "success_rate"])
    write_formatted_json(result.to_json(), _out(cfg, C.FILE_PHASE_JSON))
    write_two_column(_out(cfg, C.FILE_CONTOUR), result.k_over_l_values, result.contour50)
    logger.info("Phase grid written to %s", cfg.output_dir)


def cmd_farfield(cfg: RunConfig) -> None:
    store = _store(cfg)
    try:
        report = farfield_demo(
            cfg.N, cfg.k_list, _experiment_sampler(cfg), SmcModel(cfg.smc_model), cfg.seed,
            sparsity=cfg.sparsity, decay_rate=cfg.decay_rate, settings=cfg.sampler_settings(),
            recovery=cfg.recovery_settings(), store=store,
            theta_grid=np.linspace(0.0, math.pi, cfg.theta_points), phi_cut=cfg.phi_cut,
            reference_step_deg=cfg.reference_step_deg,
        )
    finally:
        store.close()

    write_rows_csv(report.rows, _out(cfg, C.FILE_FARFIELD_CSV),
                   ["method", "K", "max_db", "mean_db", "rel_error", "converged"])
    write_formatted_json(report.to_json(), _out(cfg, C.FILE_FARFIELD_JSON))
    write_rows_csv(report.truth_cut.rows(), _out(cfg, "cut_truth.csv"), ["theta", "magnitude_db"])
    for label, cut in report.cuts.items():
        write_rows_csv(cut.rows(), _out(cfg, f"cut_{label}.csv"), ["theta", "magnitude_db"])


def cmd_benchmark(cfg: RunConfig) -> None:
    store = _store(cfg)
    try:
        rows = coherence_benchmark(cfg.mode_kind, cfg.N, cfg.k_list, [Sampler(s) for s in cfg.samplers],
                                   cfg.restarts, cfg.seed, cfg.sampler_settings(), store)
    finally:
        store.close()

    write_rows_csv(rows, _out(cfg, C.FILE_BENCHMARK_CSV), ["sampler", "K", "L", "mean", "std", "best", "welch", "draws"])
    for sampler in cfg.samplers:
        mine = [r for r in rows if r["sampler"] == sampler]
        write_two_column(_out(cfg, f"coherence_{sampler}.dat"), [r["K"] for r in mine], [r["mean"] for r in mine])

    if cfg.p_values:
        sweep = lp_sweep(cfg.mode_kind, cfg.N, cfg.k_list[0], cfg.p_values, cfg.seed, cfg.sampler_settings())
        write_rows_csv(sweep, _out(cfg, C.FILE_LP_SWEEP_CSV), ["p", "best_mu", "mean_mu"])


_COMMANDS = {
    "sample": cmd_sample,
    "coherence": cmd_coherence,
    "optimize": cmd_optimize,
    "recover": cmd_recover,
    "phase": cmd_phase,
    "farfield": cmd_farfield,
    "benchmark": cmd_benchmark,
}


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    """CLI entry point; returns the process exit code."""
    parser = _build_parser()
    ns = parser.parse_args(argv)

    try:
        cfg = _build_config(ns)
    except ConfigError as exc:
        parser.error(str(exc))

    _setup_logging(cfg.verbose, cfg.log_file)
    logger.info("wigner_cs %s: %s", __version__, ns.command)

    try:
        ensure_directories([cfg.output_dir])
        write_formatted_json(cfg.to_json(), _out(cfg, C.FILE_RESOLVED_CONFIG), sort_keys=True)
        _COMMANDS[ns.command](cfg)
    except (ConfigError, FormatError) as exc:
        where = f" ({exc.path})" if isinstance(exc, FormatError) and exc.path else ""
        logger.error("%s%s", exc, where)
        return EXIT_USAGE
    except (WignerCSError, np.linalg.LinAlgError):
        logger.exception("Run failed.")
        return EXIT_RUNTIME
    return EXIT_OK
