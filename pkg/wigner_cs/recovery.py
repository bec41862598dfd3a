"""Complex basis pursuit: minimize ‖x‖₁ subject to A x = y.

Solved with ADMM on the split ``x = z``: x is projected onto the affine set
{A x = y}, z is complex soft-thresholded, and the scaled dual w collects
the disagreement.  The projection uses a Cholesky factorization of A Aᴴ
cached in :class:`BpSolver`, so many right-hand sides can share one A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg

from wigner_cs import constants as C
from wigner_cs.exceptions import DimensionError, DomainError
from wigner_cs.sensing import SensingMatrix

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class RecoveryProblem:
    A: SensingMatrix | np.ndarray
    y: np.ndarray
    tol_primal: float = C.DEFAULT_TOL_PRIMAL
    tol_dual: float = C.DEFAULT_TOL_DUAL
    max_iters: int = C.DEFAULT_MAX_ITERS

    def __post_init__(self) -> None:
        self.y = np.asarray(self.y, dtype=complex)
        A = _matrix_data(self.A)
        if self.y.ndim != 1 or self.y.size != A.shape[0]:
            raise DimensionError(f"y has shape {self.y.shape}, A has {A.shape[0]} rows")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise DomainError("solver tolerances must be > 0")
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1 (got {self.max_iters})")


@dataclass(eq=False)
class RecoveryResult:
    x_hat: np.ndarray
    residual_norm: float
    l1_value: float
    iterations: int
    converged: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "residual_norm": self.residual_norm,
            "l1_value": self.l1_value,
            "iterations": self.iterations,
            "converged": self.converged,
            "x_hat": {"re": self.x_hat.real.tolist(), "im": self.x_hat.imag.tolist()},
        }


def _matrix_data(A: SensingMatrix | np.ndarray) -> np.ndarray:
    data = A.data if isinstance(A, SensingMatrix) else np.asarray(A, dtype=complex)
    if data.ndim != 2:
        raise DimensionError(f"A must be 2-D (got shape {data.shape})")
    return data


def shrink(v: np.ndarray, kappa: float) -> np.ndarray:
    """Complex soft-threshold ``v · max(1 − κ/|v|, 0)``."""
    mags = np.abs(v)
    scale = np.divide(np.maximum(mags - kappa, 0.0), mags, out=np.zeros_like(mags), where=mags > 0)
    return v * scale


class BpSolver:
    """Basis-pursuit solver bound to one matrix.

    The row-space factorization is computed once; the solver is immutable
    afterwards and may be shared between threads.
    """

    def __init__(self, A: SensingMatrix | np.ndarray, rho: float = C.DEFAULT_RHO_ADMM) -> None:
        if rho <= 0:
            raise DomainError(f"ADMM penalty must be > 0 (got {rho})")
        self._A = _matrix_data(A)
        self._rho0 = float(rho)
        K, L = self._A.shape
        self._chol = None
        self._svd = None

        if K < L:
            try:
                chol = linalg.cho_factor(self._A @ self._A.conj().T, lower=True)
                pivots = np.abs(np.diag(chol[0])) ** 2
                if pivots.min() > C.RANK_RTOL * pivots.max():
                    self._chol = chol
            except linalg.LinAlgError:
                pass
            if self._chol is None:
                logger.debug("A Aᴴ is singular; using the SVD row-space solve.")
        if self._chol is None:
            U, s, Vh = linalg.svd(self._A, full_matrices=False)
            rank = int(np.sum(s > C.RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
            self._svd = (U[:, :rank], s[:rank], Vh[:rank].conj().T)

    @property
    def shape(self) -> tuple[int, int]:
        return self._A.shape  # type: ignore[return-value]

    def project(self, v: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Euclidean projection of *v* onto {x : A x = y} (least-squares sense if inconsistent)."""
        if self._chol is not None:
            correction = linalg.cho_solve(self._chol, self._A @ v - y)
            return v - self._A.conj().T @ correction
        U, s, V = self._svd  # type: ignore[misc]
        return v - V @ (V.conj().T @ v) + V @ ((U.conj().T @ y) / s)

    def solve(
        self,
        y: np.ndarray,
        tol_primal: float = C.DEFAULT_TOL_PRIMAL,
        tol_dual: float = C.DEFAULT_TOL_DUAL,
        max_iters: int = C.DEFAULT_MAX_ITERS,
    ) -> RecoveryResult:
        y = np.asarray(y, dtype=complex)
        K, L = self._A.shape
        if y.shape != (K,):
            raise DimensionError(f"y must have {K} entries (got shape {y.shape})")
        if not np.any(y):
            return RecoveryResult(np.zeros(L, dtype=complex), 0.0, 0.0, 0, True)

        rho = self._rho0
        x = np.zeros(L, dtype=complex)
        z = np.zeros(L, dtype=complex)
        w = np.zeros(L, dtype=complex)
        converged = False
        it = 0

        for it in range(1, max_iters + 1):
            x = self.project(z - w, y)
            z_old = z
            z = shrink(x + w, 1.0 / rho)
            w = w + x - z

            r_norm = float(np.linalg.norm(x - z))
            s_norm = rho * float(np.linalg.norm(z - z_old))
            eps_primal = tol_primal * max(float(np.linalg.norm(x)), float(np.linalg.norm(z)))
            eps_dual = tol_dual * rho * float(np.linalg.norm(w))
            if r_norm <= eps_primal and s_norm <= eps_dual:
                converged = True
                break

            if r_norm > C.RESIDUAL_BALANCE_RATIO * s_norm:
                rho *= 2.0
                w /= 2.0
            elif s_norm > C.RESIDUAL_BALANCE_RATIO * r_norm:
                rho /= 2.0
                w *= 2.0

        if not converged:
            logger.warning("Basis pursuit did not converge in %d iterations.", max_iters)

        residual = float(np.linalg.norm(self._A @ x - y))
        return RecoveryResult(x, residual, float(np.sum(np.abs(x))), it, converged)


def bp_solve(problem: RecoveryProblem) -> RecoveryResult:
    """Solve one basis-pursuit problem."""
    solver = BpSolver(problem.A)
    return solver.solve(problem.y, problem.tol_primal, problem.tol_dual, problem.max_iters)


def support_recovery_success(x_hat: np.ndarray, x_true: np.ndarray, rel_tol: float = C.DEFAULT_REL_TOL) -> bool:
    """True iff ‖x̂ − x‖₂ / ‖x‖₂ < rel_tol."""
    x_hat = np.asarray(x_hat)
    x_true = np.asarray(x_true)
    if x_hat.shape != x_true.shape:
        raise DimensionError(f"shape mismatch: {x_hat.shape} vs {x_true.shape}")
    ref = float(np.linalg.norm(x_true))
    if ref == 0.0:
        raise DomainError("x_true must be nonzero")
    return float(np.linalg.norm(x_hat - x_true)) / ref < rel_tol
