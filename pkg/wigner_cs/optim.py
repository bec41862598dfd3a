"""Coherence minimization over sampling angles.

Two optimizers share the same machinery:

* :func:`gd_optimize` runs gradient descent on the ℓp smoothing
  F = (Σ_{q>r} |g_qr|^p)^{1/p} of the mutual coherence.
* :func:`alm_optimize` runs an augmented Lagrangian scheme that splits the
  pair correlations into an auxiliary vector z, takes one ℓ∞ proximal
  step on z, a few gradient steps on the angles, then a dual update.

Pair vectors (z, u, g) are ordered like ``np.tril_indices(L, -1)``,
i.e. ``(q, r)`` with ``q > r`` in lexicographic order.

Gradients
---------
For a Hermitian weight matrix W with zero diagonal,
Σ_{q>r} Re(W_qr ∂g_qr/∂x_i) reduces to

    Re Σ_q B'_iq P_iq − Σ_q ρ_iq (Σ_r V_qr)

with B the column-normalized matrix, B' = ∂A/∂x / ‖a‖, P = conj(B) Wᵀ,
ρ = Re(conj(B) ∘ B') and V = Re(W ∘ G).  Both objectives supply their W.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from wigner_cs import constants as C
from wigner_cs.constants import ChiPolicyKind, DualUpdate, ModeKind, Provenance, Sampler, Stream
from wigner_cs.exceptions import DegenerateColumnError, DimensionError, DomainError
from wigner_cs.modes import mode_count
from wigner_cs.runner import JobRunner
from wigner_cs.sampling import ChiPolicy, apply_chi
from wigner_cs.seeds import derive_rng
from wigner_cs.sensing import SamplingSet, evaluate_basis, normalize_columns

logger = logging.getLogger(__name__)

Angles = tuple[np.ndarray, np.ndarray, np.ndarray]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class GdConfig:
    """Gradient descent on the ℓp objective."""

    kind: ModeKind
    N: int
    K: int
    p: float = C.DEFAULT_P
    eta: float = C.DEFAULT_ETA
    T: int = C.DEFAULT_T
    restarts: int = C.DEFAULT_RESTARTS
    seed: int = 0
    chi_mode: ChiPolicy = field(default_factory=ChiPolicy.free)
    jobs: int = 1

    def validate(self) -> None:
        self.kind = ModeKind(self.kind)
        _validate_common(self.N, self.K, self.T, self.restarts, self.seed)
        if self.p < 2:
            raise DomainError(f"smoothing exponent p must be >= 2 (got {self.p})")
        if self.eta < 0:
            raise DomainError(f"step size eta must be >= 0 (got {self.eta})")

    def to_json(self) -> dict[str, Any]:
        return {
            "algorithm": str(Sampler.OPTIMIZED_GD),
            "kind": str(self.kind),
            "N": self.N,
            "K": self.K,
            "p": self.p,
            "eta": self.eta,
            "T": self.T,
            "restarts": self.restarts,
            "seed": self.seed,
            "chi_mode": str(self.chi_mode),
        }


@dataclass
class AlmConfig:
    """Augmented Lagrangian coherence minimization."""

    kind: ModeKind
    N: int
    K: int
    tau: float = C.DEFAULT_TAU
    lambda_reg: float = C.DEFAULT_LAMBDA_REG
    eta_z: float = C.DEFAULT_ETA_Z
    eta_inner: float = C.DEFAULT_ETA_INNER
    T: int = C.DEFAULT_T
    inner_iters: int = C.DEFAULT_INNER_ITERS
    restarts: int = C.DEFAULT_RESTARTS
    seed: int = 0
    chi_mode: ChiPolicy = field(default_factory=ChiPolicy.free)
    dual_update: DualUpdate = DualUpdate.STANDARD
    jobs: int = 1

    def validate(self) -> None:
        self.kind = ModeKind(self.kind)
        self.dual_update = DualUpdate(self.dual_update)
        _validate_common(self.N, self.K, self.T, self.restarts, self.seed)
        for name in ("tau", "lambda_reg", "eta_z", "eta_inner"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0 (got {getattr(self, name)})")
        if self.inner_iters < 1:
            raise DomainError(f"inner_iters must be >= 1 (got {self.inner_iters})")

    def to_json(self) -> dict[str, Any]:
        return {
            "algorithm": str(Sampler.OPTIMIZED_ALM),
            "kind": str(self.kind),
            "N": self.N,
            "K": self.K,
            "tau": self.tau,
            "lambda_reg": self.lambda_reg,
            "eta_z": self.eta_z,
            "eta_inner": self.eta_inner,
            "T": self.T,
            "inner_iters": self.inner_iters,
            "restarts": self.restarts,
            "seed": self.seed,
            "chi_mode": str(self.chi_mode),
            "dual_update": str(self.dual_update),
        }


def _validate_common(N: int, K: int, T: int, restarts: int, seed: int) -> None:
    if N < 1:
        raise DomainError(f"N must be >= 1 (got {N})")
    if K < 1:
        raise DomainError(f"K must be >= 1 (got {K})")
    if T < 1:
        raise DomainError(f"T must be >= 1 (got {T})")
    if restarts < 1:
        raise DomainError(f"restarts must be >= 1 (got {restarts})")
    if seed < 0:
        raise DomainError(f"seed must be non-negative (got {seed})")


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class AlmState:
    z: np.ndarray
    u: np.ndarray
    angles: SamplingSet


@dataclass(eq=False)
class RestartRecord:
    index: int
    best_mu: float
    rho_trace: list[float]
    residual_trace: list[float] | None = None

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"index": self.index, "best_mu": self.best_mu, "rho_trace": self.rho_trace}
        if self.residual_trace is not None:
            data["residual_trace"] = self.residual_trace
        return data


@dataclass(eq=False)
class OptimizerRun:
    """Best sampling set found across restarts, with its best-so-far coherence trace."""

    algorithm: Sampler
    best_angles: SamplingSet
    rho_trace: list[float]
    best_mu: float
    iterations_used: int
    config: dict[str, Any]
    best_restart: int = 0
    restarts: list[RestartRecord] = field(default_factory=list)
    residual_trace: list[float] | None = None

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "algorithm": str(self.algorithm),
            "config": self.config,
            "best_mu": self.best_mu,
            "best_restart": self.best_restart,
            "iterations_used": self.iterations_used,
            "rho_trace": self.rho_trace,
            "restarts": [r.to_json() for r in self.restarts],
            "best_angles": self.best_angles.to_json(),
        }
        if self.residual_trace is not None:
            data["residual_trace"] = self.residual_trace
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> OptimizerRun:
        angles = data["best_angles"]
        return cls(
            algorithm=Sampler(data["algorithm"]),
            best_angles=SamplingSet(angles["theta"], angles["phi"], angles["chi"], angles["provenance"]),
            rho_trace=list(data["rho_trace"]),
            best_mu=float(data["best_mu"]),
            iterations_used=int(data["iterations_used"]),
            config=dict(data["config"]),
            best_restart=int(data.get("best_restart", 0)),
            restarts=[
                RestartRecord(r["index"], r["best_mu"], list(r["rho_trace"]), r.get("residual_trace"))
                for r in data.get("restarts", [])
            ],
            residual_trace=data.get("residual_trace"),
        )


# ---------------------------------------------------------------------------
# Pair correlations and their derivatives
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class _Correlations:
    B: np.ndarray
    G: np.ndarray
    dB: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    def pairs(self) -> np.ndarray:
        rows, cols = np.tril_indices(self.G.shape[0], -1)
        return self.G[rows, cols]

    def mu(self) -> float:
        return float(np.max(np.abs(self.pairs())))


def _correlations(kind: ModeKind, N: int, angles: Angles, derivatives: bool = False) -> _Correlations:
    theta, phi, chi = angles
    basis = evaluate_basis(kind, N, theta, phi, chi, derivatives)
    norms = np.linalg.norm(basis.A, axis=0)
    B = normalize_columns(basis.A, norms)
    G = B.T @ B.conj()
    if not derivatives:
        return _Correlations(B, G)
    dB = tuple(d / norms[None, :] for d in (basis.dtheta, basis.dphi, basis.dchi))
    return _Correlations(B, G, dB)  # type: ignore[arg-type]


def _pair_gradient(corr: _Correlations, W: np.ndarray) -> Angles:
    """Σ_{q>r} Re(W_qr ∂g_qr) with respect to every θ_i, φ_i, χ_i."""
    V = np.real(W * corr.G).sum(axis=1)
    P = corr.B.conj() @ W.T
    out = []
    for dB in corr.dB:  # type: ignore[union-attr]
        rho = np.real(corr.B.conj() * dB)
        out.append(np.real(np.sum(dB * P, axis=1)) - rho @ V)
    return out[0], out[1], out[2]


def _lp_value(G: np.ndarray, p: float) -> float:
    rows, cols = np.tril_indices(G.shape[0], -1)
    mags = np.abs(G[rows, cols])
    top = float(mags.max()) if mags.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.sum((mags / top) ** p)) ** (1.0 / p)


def _lp_weights(G: np.ndarray, p: float, value: float) -> np.ndarray:
    W = (np.abs(G) / value) ** (p - 2.0) * G.conj() / value
    np.fill_diagonal(W, 0.0)
    return W


def _as_angles(angles: SamplingSet | Angles) -> Angles:
    if isinstance(angles, SamplingSet):
        return angles.theta, angles.phi, angles.chi
    theta, phi, chi = (np.asarray(a, dtype=float) for a in angles)
    return theta, phi, chi


def _check_p(p: float) -> None:
    if p < 2:
        raise DomainError(f"smoothing exponent p must be >= 2 (got {p})")


def lp_objective(angles: SamplingSet, kind: ModeKind, N: int, p: float) -> float:
    """ℓp smoothing (Σ_{q>r} |g_qr|^p)^{1/p} of the coherence.

    Raises :class:`DegenerateColumnError` for a zero-norm column.
    """
    _check_p(p)
    corr = _correlations(ModeKind(kind), N, _as_angles(angles))
    return _lp_value(corr.G, p)


def lp_gradient(angles: SamplingSet, kind: ModeKind, N: int, p: float) -> Angles:
    """Analytic gradient of :func:`lp_objective` as ``(dθ, dφ, dχ)``."""
    _check_p(p)
    corr = _correlations(ModeKind(kind), N, _as_angles(angles), derivatives=True)
    value = _lp_value(corr.G, p)
    if value == 0.0:
        K = corr.B.shape[0]
        return np.zeros(K), np.zeros(K), np.zeros(K)
    return _pair_gradient(corr, _lp_weights(corr.G, p, value))


def _coupling_residual(corr: _Correlations, z: np.ndarray, u: np.ndarray) -> np.ndarray:
    g = corr.pairs()
    if z.shape != g.shape or u.shape != g.shape:
        raise DimensionError(f"z and u must have {g.size} pair entries (got {z.shape}, {u.shape})")
    return z - g + u


def coupling_objective(
    angles: SamplingSet, kind: ModeKind, N: int, z: np.ndarray, u: np.ndarray, tau: float
) -> float:
    """Quadratic coupling f = τ/2 · Σ_j |z_j − g_j + u_j|²."""
    corr = _correlations(ModeKind(kind), N, _as_angles(angles))
    R = _coupling_residual(corr, np.asarray(z, dtype=complex), np.asarray(u, dtype=complex))
    return 0.5 * tau * float(np.sum(np.abs(R) ** 2))


def coupling_gradient(
    angles: SamplingSet, kind: ModeKind, N: int, z: np.ndarray, u: np.ndarray, tau: float
) -> Angles:
    """Exact angle gradient of :func:`coupling_objective`."""
    corr = _correlations(ModeKind(kind), N, _as_angles(angles), derivatives=True)
    return _coupling_gradient_from(corr, np.asarray(z, dtype=complex), np.asarray(u, dtype=complex), tau)


def _coupling_gradient_from(corr: _Correlations, z: np.ndarray, u: np.ndarray, tau: float) -> Angles:
    R = _coupling_residual(corr, z, u)
    L = corr.G.shape[0]
    rows, cols = np.tril_indices(L, -1)
    W = np.zeros((L, L), dtype=complex)
    W[rows, cols] = R.conj()
    W[cols, rows] = R
    d_theta, d_phi, d_chi = _pair_gradient(corr, W)
    return -tau * d_theta, -tau * d_phi, -tau * d_chi


# ---------------------------------------------------------------------------
# ℓ1 projection and ℓ∞ proximal operator
# ---------------------------------------------------------------------------

def project_l1(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the ℓ1 ball of *radius*.

    Sorted-magnitude waterfilling; complex entries keep their phase.
    """
    if radius <= 0:
        raise DomainError(f"radius must be > 0 (got {radius})")
    v = np.asarray(v)
    mags = np.abs(v)
    if mags.sum() <= radius:
        return v.copy()

    s = np.sort(mags.ravel())[::-1]
    cssv = np.cumsum(s) - radius
    ind = np.arange(1, s.size + 1)
    rho = int(np.nonzero(s - cssv / ind > 0)[0][-1])
    threshold = cssv[rho] / (rho + 1)

    shrink = np.divide(
        np.maximum(mags - threshold, 0.0), mags, out=np.zeros_like(mags, dtype=float), where=mags > 0
    )
    return v * shrink


def prox_linf(v: np.ndarray, scale: float) -> np.ndarray:
    """Proximal operator of ``scale·‖·‖∞`` through the Moreau decomposition."""
    if scale <= 0:
        raise DomainError(f"scale must be > 0 (got {scale})")
    v = np.asarray(v)
    return v - scale * project_l1(v / scale, 1.0)


# ---------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------

def _wrap_2pi(x: np.ndarray) -> np.ndarray:
    out = np.mod(x, C.TWO_PI)
    return np.where(out >= C.TWO_PI, 0.0, out)


def wrap_angles(angles: SamplingSet, shift_chi: bool = False) -> SamplingSet:
    """Map angles to canonical domains.

    θ is reduced mod 2π and reflected into [0, π]; a reflected point gets
    φ += π (and χ += π when *shift_chi*, which keeps a general Wigner row
    unchanged).  φ and χ are then wrapped into [0, 2π).
    """
    theta = np.mod(angles.theta, C.TWO_PI)
    reflect = theta > math.pi
    theta = np.where(reflect, C.TWO_PI - theta, theta)
    phi = np.where(reflect, angles.phi + math.pi, angles.phi)
    chi = np.where(reflect, angles.chi + math.pi, angles.chi) if shift_chi else angles.chi
    return SamplingSet(theta, _wrap_2pi(phi), _wrap_2pi(chi), angles.provenance)


def _chi_is_free(kind: ModeKind, chi_mode: ChiPolicy) -> bool:
    return kind != ModeKind.SPHERICAL_HARMONICS and chi_mode.kind == ChiPolicyKind.FREE


def initial_angles(kind: ModeKind, K: int, chi_mode: ChiPolicy, rng: np.random.Generator) -> SamplingSet:
    """Uniform random start: θ on [0, π], φ and χ on [0, 2π).

    A fixed χ policy replaces the random χ; spherical harmonics use χ = 0.
    """
    theta = rng.uniform(0.0, math.pi, K)
    phi = rng.uniform(0.0, C.TWO_PI, K)
    chi = rng.uniform(0.0, C.TWO_PI, K)
    samples = SamplingSet(theta, phi, chi, Provenance.RANDOM)
    if ModeKind(kind) == ModeKind.SPHERICAL_HARMONICS:
        return samples.with_chi(np.zeros(K))
    if chi_mode.kind != ChiPolicyKind.FREE:
        return apply_chi(samples, chi_mode)
    return samples


class _Problem:
    """Evaluation context of one restart: kind, degree and whether χ moves."""

    def __init__(self, kind: ModeKind, N: int, chi_mode: ChiPolicy) -> None:
        self.kind = ModeKind(kind)
        self.N = N
        self.chi_free = _chi_is_free(self.kind, chi_mode)
        self.shift_chi = self.kind == ModeKind.WIGNER_GENERAL and self.chi_free

    def wrap(self, theta: np.ndarray, phi: np.ndarray, chi: np.ndarray) -> Angles:
        s = wrap_angles(SamplingSet(theta, phi, chi), shift_chi=self.shift_chi)
        return s.theta, s.phi, s.chi

    def correlations(self, angles: Angles, derivatives: bool = False) -> _Correlations:
        return _correlations(self.kind, self.N, angles, derivatives)

    def step(self, angles: Angles, grad: Angles, size: float) -> Angles:
        theta, phi, chi = angles
        d_theta, d_phi, d_chi = grad
        new_chi = chi - size * d_chi if self.chi_free else chi
        return self.wrap(theta - size * d_theta, phi - size * d_phi, new_chi)

    def safe_start(self, angles: Angles, rng: np.random.Generator, index: int) -> tuple[Angles, _Correlations]:
        """Re-perturb a start whose matrix has a zero-norm column."""
        for attempt in range(C.MAX_REPERTURB + 1):
            try:
                return angles, self.correlations(angles)
            except DegenerateColumnError as exc:
                if attempt == C.MAX_REPERTURB:
                    raise
                logger.warning("Restart %d: %s; re-perturbing the start (attempt %d).", index, exc, attempt + 1)
                theta, phi, chi = angles
                K = theta.size
                noise = C.REPERTURB_NOISE
                new_chi = chi + noise * rng.standard_normal(K) if self.chi_free else chi
                angles = self.wrap(
                    theta + noise * rng.standard_normal(K), phi + noise * rng.standard_normal(K), new_chi
                )
        raise DegenerateColumnError("start stayed degenerate after re-perturbation")


def _backtrack(
    problem: _Problem,
    angles: Angles,
    value: float,
    grad: Angles,
    eta: float,
    evaluate: Callable[[Angles], tuple[float, _Correlations]],
) -> tuple[Angles, float, _Correlations | None]:
    """Fixed step with halving on objective increase; stay put if nothing improves."""
    size = eta
    for _ in range(C.MAX_HALVINGS + 1):
        candidate = problem.step(angles, grad, size)
        try:
            cand_value, cand_corr = evaluate(candidate)
        except DegenerateColumnError:
            cand_value, cand_corr = math.inf, None
        if cand_value <= value:
            return candidate, cand_value, cand_corr
        size *= 0.5
    return angles, value, None


def _to_samples(angles: Angles, provenance: Provenance) -> SamplingSet:
    theta, phi, chi = angles
    return SamplingSet(theta, phi, chi, provenance)


# ---------------------------------------------------------------------------
# Gradient descent
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class _RestartOutcome:
    record: RestartRecord
    best_angles: Angles


def _gd_restart(config: GdConfig, index: int) -> _RestartOutcome:
    problem = _Problem(config.kind, config.N, config.chi_mode)
    rng = derive_rng(config.seed, Stream.OPTIMIZER_INIT, index)
    start = initial_angles(config.kind, config.K, config.chi_mode, rng)
    angles, corr = problem.safe_start((start.theta, start.phi, start.chi), rng, index)

    mu = corr.mu()
    best_mu, best_angles = mu, angles
    trace = [best_mu]
    logger.info("GD restart %d: initial coherence %.6f", index, mu)

    def evaluate(candidate: Angles) -> tuple[float, _Correlations]:
        c = problem.correlations(candidate)
        return _lp_value(c.G, config.p), c

    for it in range(1, config.T + 1):
        corr = problem.correlations(angles, derivatives=True)
        value = _lp_value(corr.G, config.p)
        if value > 0.0:
            grad = _pair_gradient(corr, _lp_weights(corr.G, config.p, value))
            angles, value, new_corr = _backtrack(problem, angles, value, grad, config.eta, evaluate)
            if new_corr is not None:
                corr = new_corr
        mu = corr.mu()
        if mu < best_mu:
            best_mu, best_angles = mu, angles
        trace.append(best_mu)
        logger.debug("GD restart %d iteration %d: F=%.6f mu=%.6f best=%.6f", index, it, value, mu, best_mu)

    logger.info("GD restart %d: best coherence %.6f", index, best_mu)
    return _RestartOutcome(RestartRecord(index, best_mu, trace), best_angles)


def gd_optimize(config: GdConfig) -> OptimizerRun:
    """Minimize the ℓp-smoothed coherence by gradient descent from random starts."""
    config.validate()
    runner = JobRunner(lambda i: _gd_restart(config, i), jobs=config.jobs, label="GD restart")
    outcomes = runner.run(list(range(config.restarts)))
    return _collect(Sampler.OPTIMIZED_GD, Provenance.OPTIMIZED_GD, outcomes, config.T, config.to_json())


def _collect(
    algorithm: Sampler,
    provenance: Provenance,
    outcomes: list[_RestartOutcome],
    iterations: int,
    config_echo: dict[str, Any],
) -> OptimizerRun:
    best = min(outcomes, key=lambda o: (o.record.best_mu, o.record.index))
    return OptimizerRun(
        algorithm=algorithm,
        best_angles=_to_samples(best.best_angles, provenance),
        rho_trace=list(best.record.rho_trace),
        best_mu=best.record.best_mu,
        iterations_used=iterations,
        config=config_echo,
        best_restart=best.record.index,
        restarts=[o.record for o in outcomes],
        residual_trace=best.record.residual_trace,
    )


# ---------------------------------------------------------------------------
# Augmented Lagrangian
# ---------------------------------------------------------------------------

def _alm_restart(config: AlmConfig, index: int) -> _RestartOutcome:
    problem = _Problem(config.kind, config.N, config.chi_mode)
    rng = derive_rng(config.seed, Stream.OPTIMIZER_INIT, index)
    start = initial_angles(config.kind, config.K, config.chi_mode, rng)
    angles, corr = problem.safe_start((start.theta, start.phi, start.chi), rng, index)

    g = corr.pairs()
    # z starts at the ℓ∞ prox of g, off the constraint z = g
    z0 = prox_linf(g, config.lambda_reg * config.eta_z)
    state = AlmState(z=z0, u=np.zeros_like(g), angles=_to_samples(angles, Provenance.OPTIMIZED_ALM))
    mu = float(np.max(np.abs(g)))
    best_mu, best_angles = mu, angles
    trace = [best_mu]
    residuals = [float(np.sum(np.abs(state.z - g)))]
    tau = config.tau
    logger.info("ALM restart %d: initial coherence %.6f", index, mu)

    def coupling(candidate: Angles) -> tuple[float, _Correlations]:
        c = problem.correlations(candidate)
        R = _coupling_residual(c, state.z, state.u)
        return 0.5 * tau * float(np.sum(np.abs(R) ** 2)), c

    for it in range(1, config.T + 1):
        # z: one proximal-gradient step on λ‖z‖∞ + τ/2‖z − g + u‖²
        z_hat = state.z - config.eta_z * tau * (state.z - g + state.u)
        state.z = prox_linf(z_hat, config.lambda_reg * config.eta_z)

        # angles: gradient steps on the coupling term
        for _ in range(config.inner_iters):
            corr = problem.correlations(angles, derivatives=True)
            R = _coupling_residual(corr, state.z, state.u)
            value = 0.5 * tau * float(np.sum(np.abs(R) ** 2))
            grad = _coupling_gradient_from(corr, state.z, state.u, tau)
            angles, value, new_corr = _backtrack(problem, angles, value, grad, config.eta_inner, coupling)
            if new_corr is not None:
                corr = new_corr
        g = corr.pairs()
        state.angles = _to_samples(angles, Provenance.OPTIMIZED_ALM)

        if config.dual_update == DualUpdate.STANDARD:
            state.u = state.u + tau * (state.z - g)
        else:
            state.u = state.u + tau * (state.z - g + state.u)

        mu = float(np.max(np.abs(g)))
        if mu < best_mu:
            best_mu, best_angles = mu, angles
        trace.append(best_mu)
        residuals.append(float(np.sum(np.abs(state.z - g))))
        logger.debug(
            "ALM restart %d iteration %d: mu=%.6f best=%.6f residual=%.6g", index, it, mu, best_mu, residuals[-1]
        )

    logger.info("ALM restart %d: best coherence %.6f", index, best_mu)
    return _RestartOutcome(RestartRecord(index, best_mu, trace, residuals), best_angles)


def alm_optimize(config: AlmConfig) -> OptimizerRun:
    """Minimize the coherence with the augmented Lagrangian / ℓ∞-proximal scheme."""
    config.validate()
    L = mode_count(config.kind, config.N)
    logger.info("ALM: %s N=%d K=%d, %d pair constraints", config.kind, config.N, config.K, L * (L - 1) // 2)
    runner = JobRunner(lambda i: _alm_restart(config, i), jobs=config.jobs, label="ALM restart")
    outcomes = runner.run(list(range(config.restarts)))
    return _collect(Sampler.OPTIMIZED_ALM, Provenance.OPTIMIZED_ALM, outcomes, config.T, config.to_json())
