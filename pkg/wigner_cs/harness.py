"""Experiment drivers: coherence benchmarks, phase transitions, far-field reconstruction.

Every random draw comes from :func:`wigner_cs.seeds.derive_rng` keyed by
the job's coordinates (cell, trial, K ...), so results are identical
whatever the thread count.  Basis pursuit always runs on the
column-normalized matrix; solutions are rescaled back afterwards.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from wigner_cs import constants as C
from wigner_cs.cache import RunStore, config_digest
from wigner_cs.constants import DualUpdate, ModeKind, Sampler, SmcModel, Stream
from wigner_cs.exceptions import DimensionError, DomainError
from wigner_cs.modes import mode_count
from wigner_cs.optim import AlmConfig, GdConfig, OptimizerRun, alm_optimize, gd_optimize
from wigner_cs.recovery import BpSolver, RecoveryResult, support_recovery_success
from wigner_cs.runner import JobRunner
from wigner_cs.sampling import (
    ChiPolicy,
    apply_chi,
    duplicate_pairwise,
    equiangular,
    hammersley,
    random_uniform,
    spiral,
)
from wigner_cs.seeds import derive_rng
from wigner_cs.sensing import SamplingSet, build_matrix, coherence, evaluate_basis, normalize_columns, welch_bound

logger = logging.getLogger(__name__)

OPTIMIZED_SAMPLERS = (Sampler.OPTIMIZED_GD, Sampler.OPTIMIZED_ALM)


# ---------------------------------------------------------------------------
# Sampler selection
# ---------------------------------------------------------------------------

@dataclass
class SamplerSettings:
    """Optimizer parameters used when a sampler is one of the optimizers."""

    # --- Gradient descent ---------------------------------------------------
    p: float = C.DEFAULT_P
    eta: float = C.DEFAULT_ETA

    # --- Augmented Lagrangian -----------------------------------------------
    tau: float = C.DEFAULT_TAU
    lambda_reg: float = C.DEFAULT_LAMBDA_REG
    eta_z: float = C.DEFAULT_ETA_Z
    eta_inner: float = C.DEFAULT_ETA_INNER
    inner_iters: int = C.DEFAULT_INNER_ITERS
    dual_update: DualUpdate = DualUpdate.STANDARD

    # --- Shared -------------------------------------------------------------
    T: int = C.DEFAULT_T
    restarts: int = C.DEFAULT_RESTARTS
    jobs: int = 1

    def gd_config(self, kind: ModeKind, N: int, K: int, seed: int) -> GdConfig:
        return GdConfig(
            kind=kind, N=N, K=K, p=self.p, eta=self.eta, T=self.T, restarts=self.restarts,
            seed=seed, chi_mode=optimizer_chi_mode(kind), jobs=self.jobs,
        )

    def alm_config(self, kind: ModeKind, N: int, K: int, seed: int) -> AlmConfig:
        return AlmConfig(
            kind=kind, N=N, K=K, tau=self.tau, lambda_reg=self.lambda_reg, eta_z=self.eta_z,
            eta_inner=self.eta_inner, T=self.T, inner_iters=self.inner_iters, restarts=self.restarts,
            seed=seed, chi_mode=optimizer_chi_mode(kind), dual_update=self.dual_update, jobs=self.jobs,
        )


def optimizer_chi_mode(kind: ModeKind) -> ChiPolicy:
    """μ = ±1 measurements keep the alternating 0 / π/2 polarization; other kinds optimize χ."""
    if ModeKind(kind) == ModeKind.SNF_MU_PM1:
        return ChiPolicy.alternate_pair()
    return ChiPolicy.free()


def run_optimizer(
    sampler: Sampler,
    kind: ModeKind,
    N: int,
    K: int,
    seed: int,
    settings: SamplerSettings,
    store: RunStore | None = None,
) -> OptimizerRun:
    """Run (or fetch from *store*) the optimizer behind *sampler*."""
    sampler = Sampler(sampler)
    if sampler == Sampler.OPTIMIZED_GD:
        config: GdConfig | AlmConfig = settings.gd_config(kind, N, K, seed)
    elif sampler == Sampler.OPTIMIZED_ALM:
        config = settings.alm_config(kind, N, K, seed)
    else:
        raise DomainError(f"{sampler} is not an optimizer")

    key = config_digest(config.to_json())
    if store is not None:
        cached = store.get(key)
        if cached is not None:
            logger.info("Using cached %s run for %s N=%d K=%d.", sampler, kind, N, K)
            return OptimizerRun.from_json(cached)

    logger.info("Optimizing %s N=%d K=%d with %s …", kind, N, K, sampler)
    run = gd_optimize(config) if sampler == Sampler.OPTIMIZED_GD else alm_optimize(config)  # type: ignore[arg-type]
    if store is not None:
        store.put(key, run.to_json())
    return run


def _baseline(sampler: Sampler, K: int) -> SamplingSet:
    return spiral(K) if sampler == Sampler.SPIRAL else hammersley(K)


def draw_samples(
    sampler: Sampler,
    kind: ModeKind,
    N: int,
    K: int,
    seed: int,
    settings: SamplerSettings | None = None,
    store: RunStore | None = None,
    draw: int = 0,
) -> SamplingSet:
    """Produce K sampling points for *kind* with the kind's χ policy.

    * general Wigner: spiral/Hammersley get evenly spread χ; random and
      optimized points carry their own χ.
    * spherical harmonics: χ = 0.
    * μ = ±1: spiral/Hammersley use K/2 locations, each measured at χ = 0
      and χ = π/2; optimized points alternate χ; random points draw χ.

    *draw* selects an independent random draw for the random sampler.
    """
    sampler, kind = Sampler(sampler), ModeKind(kind)
    if kind == ModeKind.SNF_MU_PM1 and K % 2 and sampler != Sampler.RANDOM:
        raise DomainError(f"μ = ±1 sampling with {sampler} needs an even K (got {K})")

    if sampler in OPTIMIZED_SAMPLERS:
        return run_optimizer(sampler, kind, N, K, seed, settings or SamplerSettings(), store).best_angles

    if sampler == Sampler.RANDOM:
        samples = random_uniform(K, derive_rng(seed, Stream.RANDOM_SAMPLER, K, draw))
        if kind == ModeKind.SPHERICAL_HARMONICS:
            samples = apply_chi(samples, ChiPolicy.fixed(0.0))
        return samples

    if kind == ModeKind.WIGNER_GENERAL:
        return apply_chi(_baseline(sampler, K), ChiPolicy.even_spread())
    if kind == ModeKind.SPHERICAL_HARMONICS:
        return _baseline(sampler, K)
    return apply_chi(duplicate_pairwise(_baseline(sampler, K // 2)), ChiPolicy.alternate_pair())


def _snf_even(kind: ModeKind, K: int) -> int:
    if ModeKind(kind) == ModeKind.SNF_MU_PM1 and K % 2:
        return K + 1
    return K


# ---------------------------------------------------------------------------
# Coherence benchmark
# ---------------------------------------------------------------------------

def coherence_benchmark(
    kind: ModeKind,
    N: int,
    k_values: list[int],
    samplers: list[Sampler],
    restarts: int,
    seed: int,
    settings: SamplerSettings | None = None,
    store: RunStore | None = None,
) -> list[dict[str, Any]]:
    """Coherence per (sampler, K): mean and std over draws/restarts, best value, Welch bound.

    Deterministic samplers contribute one value; random sampling uses
    *restarts* independent draws; optimizers report over their restarts.
    """
    settings = settings or SamplerSettings(restarts=restarts)
    L = mode_count(kind, N)
    rows: list[dict[str, Any]] = []

    for sampler in map(Sampler, samplers):
        for K in k_values:
            if sampler in OPTIMIZED_SAMPLERS:
                run = run_optimizer(sampler, kind, N, K, seed, settings, store)
                values = [r.best_mu for r in run.restarts]
            elif sampler == Sampler.RANDOM:
                values = [
                    coherence(build_matrix(kind, N, draw_samples(sampler, kind, N, K, seed, draw=d))).mu
                    for d in range(restarts)
                ]
            else:
                values = [coherence(build_matrix(kind, N, draw_samples(sampler, kind, N, K, seed))).mu]

            arr = np.asarray(values)
            rows.append({
                "sampler": str(sampler),
                "K": K,
                "L": L,
                "mean": float(arr.mean()),
                "std": float(arr.std()),
                "best": float(arr.min()),
                "welch": welch_bound(K, L),
                "draws": len(values),
            })
            logger.info("%s K=%d: coherence %.6f ± %.6f", sampler, K, rows[-1]["mean"], rows[-1]["std"])
    return rows


def lp_sweep(
    kind: ModeKind,
    N: int,
    K: int,
    p_values: list[float],
    seed: int,
    settings: SamplerSettings | None = None,
) -> list[dict[str, Any]]:
    """Final GD coherence for each smoothing exponent p."""
    base = settings or SamplerSettings()
    rows = []
    for p in p_values:
        run = gd_optimize(
            GdConfig(
                kind=kind, N=N, K=K, p=float(p), eta=base.eta, T=base.T, restarts=base.restarts,
                seed=seed, chi_mode=optimizer_chi_mode(kind), jobs=base.jobs,
            )
        )
        mus = np.array([r.best_mu for r in run.restarts])
        rows.append({"p": float(p), "best_mu": run.best_mu, "mean_mu": float(mus.mean())})
        logger.info("p=%g: best coherence %.6f", p, run.best_mu)
    return rows


# ---------------------------------------------------------------------------
# Synthetic coefficients and forward model
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SyntheticSmc:
    coeffs: np.ndarray
    sparsity: int
    seed: int | None
    model: SmcModel
    decay_rate: float | None = None


def synthetic_smc(
    L: int,
    sparsity: int,
    rng: int | np.random.Generator,
    model: SmcModel = SmcModel.EXACT_SPARSE,
    decay_rate: float = C.DEFAULT_DECAY_RATE,
) -> SyntheticSmc:
    """Random mode coefficients.

    EXACT_SPARSE: *sparsity* complex Gaussian entries (unit variance) on a
    uniformly random support.  COMPRESSIBLE: magnitudes j^(−decay_rate) in
    random order with random phases; every entry is nonzero.
    """
    model = SmcModel(model)
    seed = None if isinstance(rng, np.random.Generator) else int(rng)
    gen = rng if isinstance(rng, np.random.Generator) else derive_rng(int(rng), Stream.SMC)
    coeffs = np.zeros(L, dtype=complex)

    if model == SmcModel.EXACT_SPARSE:
        if not 1 <= sparsity <= L:
            raise DomainError(f"sparsity must lie in [1, {L}] (got {sparsity})")
        support = gen.choice(L, size=sparsity, replace=False)
        coeffs[support] = (gen.standard_normal(sparsity) + 1j * gen.standard_normal(sparsity)) / math.sqrt(2.0)
        return SyntheticSmc(coeffs, sparsity, seed, model)

    if decay_rate <= 0:
        raise DomainError(f"decay rate must be > 0 (got {decay_rate})")
    order = gen.permutation(L)
    magnitudes = np.arange(1, L + 1, dtype=float) ** (-decay_rate)
    phases = gen.uniform(0.0, C.TWO_PI, L)
    coeffs[order] = magnitudes * np.exp(1j * phases)
    return SyntheticSmc(coeffs, L, seed, model, decay_rate)


def synth_forward(kind: ModeKind, N: int, samples: SamplingSet, smc: SyntheticSmc | np.ndarray) -> np.ndarray:
    """Noise-free measurements y = A·coeffs."""
    coeffs = smc.coeffs if isinstance(smc, SyntheticSmc) else np.asarray(smc, dtype=complex)
    L = mode_count(kind, N)
    if coeffs.shape != (L,):
        raise DimensionError(f"{kind} at N={N} needs {L} coefficients (got shape {coeffs.shape})")
    return build_matrix(kind, N, samples).data @ coeffs


@dataclass
class RecoverySettings:
    tol_primal: float = C.DEFAULT_TOL_PRIMAL
    tol_dual: float = C.DEFAULT_TOL_DUAL
    max_iters: int = C.DEFAULT_MAX_ITERS
    rel_tol: float = C.DEFAULT_REL_TOL

    def to_json(self) -> dict[str, Any]:
        return {
            "tol_primal": self.tol_primal,
            "tol_dual": self.tol_dual,
            "max_iters": self.max_iters,
            "rel_tol": self.rel_tol,
        }


class NormalizedSolver:
    """Basis pursuit on the column-normalized matrix, rescaled to the original columns."""

    def __init__(self, A: np.ndarray, settings: RecoverySettings) -> None:
        self._norms = np.linalg.norm(A, axis=0)
        self._solver = BpSolver(normalize_columns(A, self._norms))
        self._settings = settings

    def solve(self, y: np.ndarray) -> RecoveryResult:
        s = self._settings
        result = self._solver.solve(y, s.tol_primal, s.tol_dual, s.max_iters)
        x = result.x_hat / self._norms
        return RecoveryResult(x, result.residual_norm, float(np.sum(np.abs(x))), result.iterations, result.converged)


# ---------------------------------------------------------------------------
# Phase transitions
# ---------------------------------------------------------------------------

@dataclass
class PhaseGridConfig:
    kind: ModeKind
    N: int
    k_over_l_values: list[float]
    s_over_k_values: list[float]
    trials: int = C.DEFAULT_TRIALS
    sampler: Sampler = Sampler.RANDOM
    seed: int = 0
    rel_tol: float = C.DEFAULT_REL_TOL
    recovery: RecoverySettings = field(default_factory=RecoverySettings)
    sampler_settings: SamplerSettings = field(default_factory=SamplerSettings)
    jobs: int = 1

    def validate(self) -> None:
        self.kind = ModeKind(self.kind)
        self.sampler = Sampler(self.sampler)
        if not self.k_over_l_values or not self.s_over_k_values:
            raise DomainError("phase grid needs at least one K/L and one s/K value")
        for name in ("k_over_l_values", "s_over_k_values"):
            values = [float(v) for v in getattr(self, name)]
            if any(not 0.0 < v <= 1.0 for v in values):
                raise DomainError(f"{name} must lie in (0, 1]")
            setattr(self, name, sorted(values))
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1 (got {self.trials})")
        if self.rel_tol <= 0:
            raise DomainError(f"rel_tol must be > 0 (got {self.rel_tol})")
        self.recovery.rel_tol = self.rel_tol


@dataclass(eq=False)
class PhaseGridResult:
    k_over_l_values: list[float]
    s_over_k_values: list[float]
    K_values: list[int]
    s_values: list[list[int]]
    success_rate: np.ndarray  # shape (len(K/L), len(s/K))
    contour50: list[float | None]
    metadata: dict[str, Any]

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for ki, kl in enumerate(self.k_over_l_values):
            for si, sk in enumerate(self.s_over_k_values):
                out.append({
                    "k_over_l": kl,
                    "s_over_k": sk,
                    "K": self.K_values[ki],
                    "s": self.s_values[ki][si],
                    "success_rate": float(self.success_rate[ki, si]),
                })
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "metadata": self.metadata,
            "k_over_l_values": self.k_over_l_values,
            "s_over_k_values": self.s_over_k_values,
            "K_values": self.K_values,
            "success_rate": self.success_rate.tolist(),
            "contour50": self.contour50,
        }


def contour_crossing(s_values: list[float], rates: np.ndarray, level: float = 0.5) -> float | None:
    """First s/K where the success rate drops through *level*, by linear interpolation.

    None when the column never crosses (all above or starts below).
    """
    if rates[0] < level:
        return None
    for j in range(len(rates) - 1):
        r0, r1 = float(rates[j]), float(rates[j + 1])
        if r0 >= level > r1:
            s0, s1 = s_values[j], s_values[j + 1]
            return s0 + (r0 - level) * (s1 - s0) / (r0 - r1)
    return None


def _trial_success(
    L: int,
    s: int,
    solver: NormalizedSolver,
    A: np.ndarray,
    rng: np.random.Generator,
    rel_tol: float,
) -> bool:
    x = synthetic_smc(L, s, rng).coeffs
    y = A @ x
    result = solver.solve(y)
    return support_recovery_success(result.x_hat, x, rel_tol)


def phase_transition(config: PhaseGridConfig, store: RunStore | None = None) -> PhaseGridResult:
    """Success-rate grid over (K/L, s/K) with the 50% contour per K/L column."""
    config.validate()
    kind, N = config.kind, config.N
    L = mode_count(kind, N)
    K_values = [_snf_even(kind, max(1, round(kl * L))) for kl in config.k_over_l_values]
    s_values = [[max(1, round(sk * K)) for sk in config.s_over_k_values] for K in K_values]
    logger.info(
        "Phase grid: %s N=%d L=%d, %d×%d cells, %d trials, sampler %s",
        kind, N, L, len(K_values), len(config.s_over_k_values), config.trials, config.sampler,
    )

    # Fixed samplers: one matrix and factorization per K, shared read-only by all cells
    shared: dict[int, tuple[np.ndarray, NormalizedSolver]] = {}
    if config.sampler != Sampler.RANDOM:
        for K in sorted(set(K_values)):
            samples = draw_samples(config.sampler, kind, N, K, config.seed, config.sampler_settings, store)
            A = build_matrix(kind, N, samples).data
            shared[K] = (A, NormalizedSolver(A, config.recovery))

    def run_cell(cell: tuple[int, int]) -> float:
        ki, si = cell
        K, s = K_values[ki], s_values[ki][si]
        successes = 0
        for t in range(config.trials):
            rng = derive_rng(config.seed, Stream.TRIAL, ki, si, t)
            if config.sampler == Sampler.RANDOM:
                samples = random_uniform(K, rng)
                if kind == ModeKind.SPHERICAL_HARMONICS:
                    samples = samples.with_chi(np.zeros(K))
                A = build_matrix(kind, N, samples).data
                solver = NormalizedSolver(A, config.recovery)
            else:
                A, solver = shared[K]
            if _trial_success(L, s, solver, A, rng, config.recovery.rel_tol):
                successes += 1
        rate = successes / config.trials
        logger.info("Cell K=%d s=%d: success rate %.3f", K, s, rate)
        return rate

    cells = [(ki, si) for ki in range(len(K_values)) for si in range(len(config.s_over_k_values))]
    rates = JobRunner(run_cell, jobs=config.jobs, label="phase cell").run(cells)
    success = np.asarray(rates, dtype=float).reshape(len(K_values), len(config.s_over_k_values))
    contour = [contour_crossing(config.s_over_k_values, success[ki]) for ki in range(len(K_values))]

    metadata = {
        "kind": str(kind),
        "N": N,
        "L": L,
        "sampler": str(config.sampler),
        "seed": config.seed,
        "trials": config.trials,
        "recovery": config.recovery.to_json(),
    }
    return PhaseGridResult(
        k_over_l_values=list(config.k_over_l_values),
        s_over_k_values=list(config.s_over_k_values),
        K_values=K_values,
        s_values=s_values,
        success_rate=success,
        contour50=contour,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Far-field reconstruction
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PatternCut:
    phi_cut: float
    theta_grid: np.ndarray
    magnitude_db: np.ndarray

    def rows(self) -> list[dict[str, float]]:
        return [
            {"theta": float(t), "magnitude_db": float(m)}
            for t, m in zip(self.theta_grid, self.magnitude_db)
        ]


def farfield_cut(
    coeffs: np.ndarray, kind: ModeKind, N: int, phi_cut: float, theta_grid: np.ndarray
) -> PatternCut:
    """Peak-normalized dB magnitude of the mode expansion along φ = *phi_cut* (χ = 0)."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.size == 0:
        raise DimensionError("theta grid is empty")
    coeffs = np.asarray(coeffs, dtype=complex)
    L = mode_count(kind, N)
    if coeffs.shape != (L,):
        raise DimensionError(f"{kind} at N={N} needs {L} coefficients (got shape {coeffs.shape})")

    phi = np.full(theta_grid.size, float(phi_cut))
    basis = evaluate_basis(kind, N, theta_grid, phi, np.zeros(theta_grid.size))
    magnitude = np.abs(basis.A @ coeffs)
    peak = float(magnitude.max())
    if peak == 0.0:
        raise DomainError("field vanishes along the whole cut")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(magnitude / peak)
    return PatternCut(float(phi_cut), theta_grid, np.maximum(db, C.DB_CLIP))


def farfield_error(recon: PatternCut, truth: PatternCut) -> tuple[float, float]:
    """Max and mean |recon − truth| in dB over grid points where truth ≥ −60 dB."""
    if recon.theta_grid.shape != truth.theta_grid.shape or not np.allclose(recon.theta_grid, truth.theta_grid):
        raise DimensionError("pattern cuts use different θ grids")
    if not math.isclose(recon.phi_cut, truth.phi_cut):
        raise DimensionError("pattern cuts lie on different φ planes")
    mask = truth.magnitude_db >= C.FARFIELD_FLOOR_DB
    diff = np.abs(recon.magnitude_db[mask] - truth.magnitude_db[mask])
    return float(diff.max()), float(diff.mean())


@dataclass(eq=False)
class FarfieldReport:
    rows: list[dict[str, Any]]
    truth_cut: PatternCut
    cuts: dict[str, PatternCut]
    metadata: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {"metadata": self.metadata, "rows": self.rows}


def farfield_demo(
    N: int,
    K_list: list[int],
    sampler: Sampler,
    smc_model: SmcModel,
    seed: int,
    sparsity: int = 20,
    decay_rate: float = C.DEFAULT_DECAY_RATE,
    settings: SamplerSettings | None = None,
    recovery: RecoverySettings | None = None,
    store: RunStore | None = None,
    theta_grid: np.ndarray | None = None,
    phi_cut: float = 0.0,
    reference_step_deg: float | None = 10.0,
) -> FarfieldReport:
    """Synthetic near-field to far-field pipeline for μ = ±1 measurements.

    Truth coefficients → measurements at the sampler's points → basis
    pursuit → φ-cut pattern → dB error against the truth cut.  A
    least-squares solve on an equiangular grid measured at both
    polarizations provides the conventional reference row.
    """
    kind = ModeKind.SNF_MU_PM1
    sampler = Sampler(sampler)
    settings = settings or SamplerSettings()
    recovery = recovery or RecoverySettings()
    L = mode_count(kind, N)
    theta_grid = np.linspace(0.0, math.pi, 181) if theta_grid is None else np.asarray(theta_grid, dtype=float)

    truth = synthetic_smc(L, sparsity, derive_rng(seed, Stream.SMC), smc_model, decay_rate)
    truth_cut = farfield_cut(truth.coeffs, kind, N, phi_cut, theta_grid)

    rows: list[dict[str, Any]] = []
    cuts: dict[str, PatternCut] = {}
    for K in K_list:
        if K >= L:
            logger.warning("K=%d is not below the %d unknowns; the system is not compressed.", K, L)
        samples = draw_samples(sampler, kind, N, K, seed, settings, store)
        A = build_matrix(kind, N, samples).data
        y = A @ truth.coeffs
        result = NormalizedSolver(A, recovery).solve(y)
        cut = farfield_cut(result.x_hat, kind, N, phi_cut, theta_grid)
        max_db, mean_db = farfield_error(cut, truth_cut)
        rel = float(np.linalg.norm(result.x_hat - truth.coeffs) / np.linalg.norm(truth.coeffs))
        rows.append({
            "method": str(sampler),
            "K": K,
            "max_db": max_db,
            "mean_db": mean_db,
            "rel_error": rel,
            "converged": result.converged,
        })
        cuts[f"{sampler}_K{K}"] = cut
        logger.info("K=%d: max error %.4f dB, mean error %.4f dB", K, max_db, mean_db)

    if reference_step_deg is not None:
        ref = apply_chi(duplicate_pairwise(equiangular(reference_step_deg)), ChiPolicy.alternate_pair())
        A_ref = build_matrix(kind, N, ref).data
        x_ls = np.linalg.lstsq(A_ref, A_ref @ truth.coeffs, rcond=None)[0]
        cut = farfield_cut(x_ls, kind, N, phi_cut, theta_grid)
        max_db, mean_db = farfield_error(cut, truth_cut)
        rel = float(np.linalg.norm(x_ls - truth.coeffs) / np.linalg.norm(truth.coeffs))
        rows.append({
            "method": "equiangular_ls",
            "K": ref.K,
            "max_db": max_db,
            "mean_db": mean_db,
            "rel_error": rel,
            "converged": True,
        })
        cuts[f"equiangular_K{ref.K}"] = cut

    metadata = {
        "kind": str(kind),
        "N": N,
        "L": L,
        "sampler": str(sampler),
        "smc_model": str(SmcModel(smc_model)),
        "sparsity": truth.sparsity,
        "seed": seed,
        "phi_cut": phi_cut,
        "floor_db": C.FARFIELD_FLOOR_DB,
        "recovery": recovery.to_json(),
    }
    return FarfieldReport(rows, truth_cut, cuts, metadata)
