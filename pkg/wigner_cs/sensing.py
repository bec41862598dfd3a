"""Sensing matrices, mutual coherence and the Welch bound.

A sensing matrix row belongs to one measurement angle triple (θ, φ, χ);
a column belongs to one mode of :mod:`wigner_cs.modes`.  Besides the
matrix itself this module exposes :func:`evaluate_basis`, which also
returns the analytic angle derivatives of every entry.  The optimizers
build their gradients on top of it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from wigner_cs import constants as C
from wigner_cs.constants import ModeKind, Provenance
from wigner_cs.exceptions import DegenerateColumnError, DimensionError, DomainError
from wigner_cs.modes import ModeTable, mode_count, mode_table
from wigner_cs.specfun import WignerOrder, sph_harm, sph_harm_dtheta, wigner_d, wigner_d_dtheta

logger = logging.getLogger(__name__)

# Column norms below this are treated as zero
DEGENERATE_NORM = 1e-12


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SamplingSet:
    """K measurement angle triples.

    Domains (θ ∈ [0, π], φ, χ ∈ [0, 2π)) hold after canonical wrapping;
    the constructor only checks shapes and finiteness so that optimizers
    may hold intermediate, unwrapped iterates.
    """

    theta: np.ndarray
    phi: np.ndarray
    chi: np.ndarray
    provenance: Provenance = Provenance.FILE

    def __post_init__(self) -> None:
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        self.phi = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        self.chi = np.atleast_1d(np.asarray(self.chi, dtype=float)).copy()
        self.provenance = Provenance(self.provenance)
        if self.theta.ndim != 1 or not (self.theta.shape == self.phi.shape == self.chi.shape):
            raise DimensionError(
                f"angle vectors must be 1-D with equal length "
                f"(got {self.theta.shape}, {self.phi.shape}, {self.chi.shape})"
            )
        if self.theta.size < 1:
            raise DimensionError("a sampling set needs at least one point")
        if not (np.all(np.isfinite(self.theta)) and np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.chi))):
            raise DomainError("sampling angles must be finite")

    @property
    def K(self) -> int:
        return int(self.theta.size)

    def __len__(self) -> int:
        return self.K

    def is_canonical(self, atol: float = 1e-12) -> bool:
        """True when every angle lies in its canonical domain."""
        return bool(
            np.all((self.theta >= -atol) & (self.theta <= math.pi + atol))
            and np.all((self.phi >= -atol) & (self.phi < C.TWO_PI + atol))
            and np.all((self.chi >= -atol) & (self.chi < C.TWO_PI + atol))
        )

    def with_chi(self, chi: np.ndarray) -> SamplingSet:
        return SamplingSet(self.theta, self.phi, chi, self.provenance)

    def stacked(self) -> np.ndarray:
        """K×3 array of ``(θ, φ, χ)`` rows."""
        return np.column_stack([self.theta, self.phi, self.chi])

    def to_json(self) -> dict[str, Any]:
        return {
            "provenance": str(self.provenance),
            "K": self.K,
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
            "chi": self.chi.tolist(),
        }


@dataclass(eq=False)
class SensingMatrix:
    """Complex K×L matrix tagged with its construction."""

    kind: ModeKind
    N: int
    data: np.ndarray
    column_norms: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.kind = ModeKind(self.kind)
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2:
            raise DimensionError(f"sensing matrix must be 2-D (got shape {self.data.shape})")
        expected = mode_count(self.kind, self.N)
        if self.data.shape[1] != expected:
            raise DimensionError(f"{self.kind} at N={self.N} has {expected} columns, data has {self.data.shape[1]}")
        self.column_norms = np.linalg.norm(self.data, axis=0)

    @property
    def K(self) -> int:
        return int(self.data.shape[0])

    @property
    def L(self) -> int:
        return int(self.data.shape[1])

    @property
    def modes(self) -> ModeTable:
        return mode_table(self.kind, self.N)

    def normalized(self) -> np.ndarray:
        """Column-normalized copy of the data."""
        return normalize_columns(self.data, self.column_norms)


@dataclass(frozen=True)
class CoherenceReport:
    mu: float
    argmax_pair: tuple[int, int]
    welch: float
    pair_count: int
    K: int
    L: int

    def to_json(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "argmax_pair": list(self.argmax_pair),
            "welch": self.welch,
            "pair_count": self.pair_count,
            "K": self.K,
            "L": self.L,
        }


@dataclass(eq=False)
class BasisEvaluation:
    """Matrix entries and their partial derivatives in θ, φ and χ (each K×L)."""

    A: np.ndarray
    dtheta: np.ndarray | None = None
    dphi: np.ndarray | None = None
    dchi: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def evaluate_basis(
    kind: ModeKind,
    N: int,
    theta: np.ndarray,
    phi: np.ndarray,
    chi: np.ndarray,
    derivatives: bool = False,
) -> BasisEvaluation:
    """Evaluate every column of the *kind* matrix, optionally with derivatives."""
    kind = ModeKind(kind)
    table = mode_table(kind, N)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    chi = np.asarray(chi, dtype=float)
    K, L = theta.size, len(table)
    if K < 1:
        raise DimensionError("cannot build a sensing matrix without samples")

    A = np.empty((K, L), dtype=complex)
    dT = np.empty((K, L), dtype=complex) if derivatives else None
    d_cache: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray | None]] = {}

    def d_values(n: int, mu: int, m: int) -> tuple[np.ndarray, np.ndarray | None]:
        key = (n, mu, m)
        if key not in d_cache:
            order = WignerOrder(n, mu, m)
            d = np.asarray(wigner_d(order, theta))
            dd = np.asarray(wigner_d_dtheta(order, theta)) if derivatives else None
            d_cache[key] = (d, dd)
        return d_cache[key]

    if kind == ModeKind.SPHERICAL_HARMONICS:
        for q, mode in enumerate(table):
            A[:, q] = sph_harm(mode.n, mode.m, theta, phi)
            if derivatives:
                dT[:, q] = sph_harm_dtheta(mode.n, mode.m, theta, phi)

    elif kind == ModeKind.WIGNER_GENERAL:
        for q, mode in enumerate(table):
            d, dd = d_values(mode.n, mode.mu, mode.m)
            phase = np.exp(1j * (mode.m * phi + mode.mu * chi))
            A[:, q] = phase * d
            if derivatives:
                dT[:, q] = phase * dd

    else:
        for q, mode in enumerate(table):
            sign = 1.0 if mode.block == 1 else -1.0
            d_p, dd_p = d_values(mode.n, 1, mode.m)
            d_m, dd_m = d_values(mode.n, -1, mode.m)
            e_phi = np.exp(1j * mode.m * phi)
            e_p, e_m = np.exp(1j * chi), np.exp(-1j * chi)
            A[:, q] = e_phi * (d_p * e_p + sign * d_m * e_m)
            if derivatives:
                dT[:, q] = e_phi * (dd_p * e_p + sign * dd_m * e_m)

    if not derivatives:
        return BasisEvaluation(A)

    m_vec = np.array([mode.m for mode in table], dtype=float)
    dP = 1j * m_vec[None, :] * A
    if kind == ModeKind.SPHERICAL_HARMONICS:
        dX = np.zeros_like(A)
    elif kind == ModeKind.WIGNER_GENERAL:
        mu_vec = np.array([mode.mu for mode in table], dtype=float)
        dX = 1j * mu_vec[None, :] * A
    else:
        # ∂χ swaps the sum and difference blocks: ∂A1 = i·A2, ∂A2 = i·A1
        half = L // 2
        dX = np.empty_like(A)
        dX[:, :half] = 1j * A[:, half:]
        dX[:, half:] = 1j * A[:, :half]

    return BasisEvaluation(A, dT, dP, dX)


def build_matrix(kind: ModeKind, N: int, samples: SamplingSet) -> SensingMatrix:
    """Build the K×L sensing matrix of *kind* at the sample angles."""
    basis = evaluate_basis(kind, N, samples.theta, samples.phi, samples.chi)
    return SensingMatrix(kind, N, basis.A)


# ---------------------------------------------------------------------------
# Coherence
# ---------------------------------------------------------------------------

def _as_array(matrix: SensingMatrix | np.ndarray) -> np.ndarray:
    if isinstance(matrix, SensingMatrix):
        return matrix.data
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix (got shape {arr.shape})")
    return arr


def normalize_columns(data: np.ndarray, norms: np.ndarray | None = None) -> np.ndarray:
    if norms is None:
        norms = np.linalg.norm(data, axis=0)
    bad = np.flatnonzero(norms < DEGENERATE_NORM)
    if bad.size:
        raise DegenerateColumnError(f"column {int(bad[0])} has zero norm", column=int(bad[0]))
    return data / norms[None, :]


def gram(matrix: SensingMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(B, G)`` with B column-normalized and ``G[q, r] = Σ_i B_iq conj(B_ir)``."""
    B = normalize_columns(_as_array(matrix))
    return B, B.T @ B.conj()


def column_pair_corr(matrix: SensingMatrix | np.ndarray, q: int, r: int) -> complex:
    """Normalized inner product ⟨a_q, a_r⟩ / (‖a_q‖‖a_r‖) for ``0 <= r < q < L``."""
    data = _as_array(matrix)
    L = data.shape[1]
    if not (0 <= r < q < L):
        raise DomainError(f"column pair must satisfy 0 <= r < q < L (got q={q}, r={r}, L={L})")
    a_q, a_r = data[:, q], data[:, r]
    n_q, n_r = np.linalg.norm(a_q), np.linalg.norm(a_r)
    for col, nrm in ((q, n_q), (r, n_r)):
        if nrm < DEGENERATE_NORM:
            raise DegenerateColumnError(f"column {col} has zero norm", column=col)
    return complex(np.sum(a_q * a_r.conj()) / (n_q * n_r))


def coherence(matrix: SensingMatrix | np.ndarray) -> CoherenceReport:
    """Mutual coherence: the largest |g_{q,r}| over distinct column pairs.

    Ties resolve to the lexicographically smallest ``(q, r)`` with ``q > r``.
    """
    data = _as_array(matrix)
    K, L = data.shape
    if L < 2:
        raise DomainError(f"coherence needs at least two columns (got L={L})")
    _, G = gram(data)
    rows, cols = np.tril_indices(L, -1)
    mags = np.abs(G[rows, cols])
    j = int(np.argmax(mags))
    return CoherenceReport(
        mu=float(mags[j]),
        argmax_pair=(int(rows[j]), int(cols[j])),
        welch=welch_bound(K, L),
        pair_count=L * (L - 1) // 2,
        K=K,
        L=L,
    )


def welch_bound(K: int, L: int) -> float:
    """Welch lower bound √((L−K)/(K(L−1))) on coherence; 0 when K ≥ L."""
    if L < 2:
        raise DomainError(f"Welch bound needs L >= 2 (got {L})")
    if K < 1:
        raise DomainError(f"Welch bound needs K >= 1 (got {K})")
    if K >= L:
        return 0.0
    return math.sqrt((L - K) / (K * (L - 1)))
