"""Runtime configuration: an injectable dataclass resolved from defaults, TOML, environment and flags.

Precedence, lowest first: dataclass defaults, config file, environment
(``WIGNER_CS_OUTPUT_DIR``, ``WIGNER_CS_JOBS``), explicit flags, ``--set``.
A config file may hold top-level keys, a ``[common]`` table and one table
per command; only the running command's table is merged.
"""

from __future__ import annotations

import logging
import os
import tomllib
import types
import typing
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from wigner_cs import constants as C
from wigner_cs.constants import DualUpdate, ModeKind, Sampler, SmcModel
from wigner_cs.exceptions import ConfigError, DomainError
from wigner_cs.harness import RecoverySettings, SamplerSettings
from wigner_cs.runner import default_jobs
from wigner_cs.sampling import ChiPolicy

logger = logging.getLogger(__name__)

COMMANDS = ("sample", "coherence", "optimize", "recover", "phase", "farfield", "benchmark")

_DEFAULT_GRID = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0]


@dataclass
class RunConfig:
    """Central, injectable configuration for one command run."""

    # --- Run ----------------------------------------------------------------
    seed: int = 0
    output_dir: str = C.DIR_OUTPUT
    jobs: int = field(default_factory=default_jobs)
    verbose: bool = False
    log_file: str | None = None
    ignore_cache: bool = False

    # --- Problem ------------------------------------------------------------
    kind: str = str(ModeKind.SPHERICAL_HARMONICS)
    N: int = 9
    K: int = 97

    # --- Sampling -----------------------------------------------------------
    sampler: str = str(Sampler.SPIRAL)
    chi_policy: str | None = None
    step_deg: float | None = None
    samples_file: str | None = None
    out: str | None = None

    # --- Gradient descent ---------------------------------------------------
    algo: str = str(Sampler.OPTIMIZED_GD)
    p: float = C.DEFAULT_P
    eta: float = C.DEFAULT_ETA
    T: int = C.DEFAULT_T
    restarts: int = C.DEFAULT_RESTARTS

    # --- Augmented Lagrangian -----------------------------------------------
    tau: float = C.DEFAULT_TAU
    lambda_reg: float = C.DEFAULT_LAMBDA_REG
    eta_z: float = C.DEFAULT_ETA_Z
    eta_inner: float = C.DEFAULT_ETA_INNER
    inner_iters: int = C.DEFAULT_INNER_ITERS
    dual_update: str = str(DualUpdate.STANDARD)

    # --- Recovery -----------------------------------------------------------
    tol_primal: float = C.DEFAULT_TOL_PRIMAL
    tol_dual: float = C.DEFAULT_TOL_DUAL
    max_iters: int = C.DEFAULT_MAX_ITERS
    rel_tol: float = C.DEFAULT_REL_TOL
    measurements_file: str | None = None
    sparsity: int = 10
    smc_model: str = str(SmcModel.EXACT_SPARSE)
    decay_rate: float = C.DEFAULT_DECAY_RATE

    # --- Phase transition ---------------------------------------------------
    k_over_l: list[float] = field(default_factory=lambda: list(_DEFAULT_GRID))
    s_over_k: list[float] = field(default_factory=lambda: list(_DEFAULT_GRID))
    trials: int = C.DEFAULT_TRIALS

    # --- Far field / benchmark ----------------------------------------------
    k_list: list[int] = field(default_factory=lambda: [96, 128])
    samplers: list[str] = field(default_factory=lambda: [str(Sampler.SPIRAL), str(Sampler.HAMMERSLEY)])
    p_values: list[float] = field(default_factory=list)
    phi_cut: float = 0.0
    theta_points: int = 181
    reference_step_deg: float | None = 10.0

    # --- Export -------------------------------------------------------------
    export_matrix: str | None = None

    # --- Validation ---------------------------------------------------------
    def validate(self) -> None:
        """Check enum-valued and ranged fields; raise :class:`ConfigError`."""
        _check_enum("kind", self.kind, ModeKind)
        _check_enum("sampler", self.sampler, Sampler, extra=("equiangular",))
        _check_enum("algo", self.algo, Sampler, allowed=(Sampler.OPTIMIZED_GD, Sampler.OPTIMIZED_ALM))
        _check_enum("dual_update", self.dual_update, DualUpdate)
        _check_enum("smc_model", self.smc_model, SmcModel)
        for s in self.samplers:
            _check_enum("samplers", s, Sampler)
        if self.export_matrix not in (None, "csv", "json"):
            raise ConfigError(f"export_matrix must be 'csv' or 'json' (got {self.export_matrix!r})")
        if self.chi_policy is not None:
            try:
                ChiPolicy.parse(self.chi_policy)
            except DomainError as exc:
                raise ConfigError(str(exc)) from exc
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        for name in ("N", "K", "T", "restarts", "trials", "max_iters", "theta_points", "sparsity"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")

    # --- Convenience --------------------------------------------------------
    @property
    def mode_kind(self) -> ModeKind:
        return ModeKind(self.kind)

    def chi(self) -> ChiPolicy | None:
        return None if self.chi_policy is None else ChiPolicy.parse(self.chi_policy)

    def sampler_settings(self) -> SamplerSettings:
        return SamplerSettings(
            p=self.p, eta=self.eta, tau=self.tau, lambda_reg=self.lambda_reg, eta_z=self.eta_z,
            eta_inner=self.eta_inner, inner_iters=self.inner_iters, dual_update=DualUpdate(self.dual_update),
            T=self.T, restarts=self.restarts, jobs=self.jobs,
        )

    def recovery_settings(self) -> RecoverySettings:
        return RecoverySettings(self.tol_primal, self.tol_dual, self.max_iters, self.rel_tol)

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def _check_enum(name: str, value: str, enum: type, allowed: tuple = (), extra: tuple = ()) -> None:
    valid = [str(v) for v in (allowed or list(enum))] + list(extra)
    if str(value) not in valid:
        raise ConfigError(f"{name} must be one of {', '.join(valid)} (got {value!r})")


# ---------------------------------------------------------------------------
# Coercion
# ---------------------------------------------------------------------------

_HINTS: dict[str, Any] = typing.get_type_hints(RunConfig)
FIELD_NAMES = frozenset(f.name for f in fields(RunConfig))


def _coerce(name: str, value: Any) -> Any:
    if name not in FIELD_NAMES:
        raise ConfigError(f"Unknown configuration key '{name}'")
    hint = _HINTS[name]
    args = typing.get_args(hint)
    optional = isinstance(hint, types.UnionType) and type(None) in args
    if optional:
        if value is None or value == "":
            return None
        hint = next(a for a in args if a is not type(None))

    try:
        if typing.get_origin(hint) is list:
            (item,) = typing.get_args(hint)
            if not isinstance(value, (list, tuple)):
                value = [v for v in str(value).split(",") if v.strip()]
            return [item(v) if item is not str else str(v).strip() for v in value]
        if hint is bool:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if hint is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if hint is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for '{name}': {value!r}") from None


def apply_overrides(cfg: RunConfig, values: dict[str, Any], source: str) -> None:
    """Set every key of *values* on *cfg* after type coercion."""
    for key, value in values.items():
        setattr(cfg, key, _coerce(key, value))
        logger.debug("config %s = %r (%s)", key, getattr(cfg, key), source)


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------

def load_config_file(path: str, command: str) -> dict[str, Any]:
    """Flatten a TOML file for *command*: top level, then ``[common]``, then ``[command]``."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Malformed config file {path}: {exc}") from exc

    flat: dict[str, Any] = {}
    tables: dict[str, dict[str, Any]] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            if key != "common" and key not in COMMANDS:
                raise ConfigError(f"Unknown table [{key}] in {path}")
            tables[key] = value
        else:
            flat[key] = value

    for name in ("common", command):
        flat.update(tables.get(name, {}))
    # validate keys of every table, not just the merged ones
    for table in tables.values():
        for key in table:
            if key not in FIELD_NAMES:
                raise ConfigError(f"Unknown configuration key '{key}' in {path}")
    return flat


def env_overrides(environ: dict[str, str] | None = None) -> dict[str, Any]:
    environ = os.environ if environ is None else environ
    out: dict[str, Any] = {}
    if environ.get(C.ENV_OUTPUT_DIR):
        out["output_dir"] = environ[C.ENV_OUTPUT_DIR]
    if environ.get(C.ENV_JOBS):
        out["jobs"] = environ[C.ENV_JOBS]
    return out


def parse_set(text: str) -> tuple[str, Any]:
    """Parse ``key=value``; the value is read as a TOML literal, else kept as a string."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"--set expects key=value (got {text!r})")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key, value


def resolve_config(
    command: str,
    config_file: str | None = None,
    flags: dict[str, Any] | None = None,
    sets: list[str] | None = None,
    environ: dict[str, str] | None = None,
) -> RunConfig:
    """Build the :class:`RunConfig` for *command* from every source."""
    cfg = RunConfig()
    if config_file:
        apply_overrides(cfg, load_config_file(config_file, command), "file")
    apply_overrides(cfg, env_overrides(environ), "environment")
    apply_overrides(cfg, {k: v for k, v in (flags or {}).items() if v is not None}, "flag")
    apply_overrides(cfg, dict(parse_set(s) for s in (sets or [])), "--set")
    cfg.validate()
    return cfg

