"""Baseline sampling sets and polarization (χ) policies.

Generators return χ = 0; the χ assignment is a separate step
(:func:`apply_chi`) so the same spatial pattern can be combined with any
policy.  Reading and writing sampling files lives in :mod:`wigner_cs.cache`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from wigner_cs import constants as C
from wigner_cs.constants import ChiPolicyKind, Provenance, Stream
from wigner_cs.exceptions import DomainError
from wigner_cs.seeds import derive_rng
from wigner_cs.sensing import SamplingSet

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# χ policies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChiPolicy:
    """How polarization angles are assigned to a sampling set."""

    kind: ChiPolicyKind
    value: float = 0.0  # only used by FIXED

    @classmethod
    def even_spread(cls) -> ChiPolicy:
        return cls(ChiPolicyKind.EVEN_SPREAD)

    @classmethod
    def alternate_pair(cls) -> ChiPolicy:
        return cls(ChiPolicyKind.ALTERNATE_PAIR)

    @classmethod
    def fixed(cls, value: float) -> ChiPolicy:
        return cls(ChiPolicyKind.FIXED, float(value))

    @classmethod
    def free(cls) -> ChiPolicy:
        return cls(ChiPolicyKind.FREE)

    @classmethod
    def parse(cls, text: str) -> ChiPolicy:
        """Parse ``even``, ``alternate``, ``free`` or ``fixed[:radians]``."""
        name, _, arg = str(text).strip().partition(":")
        try:
            kind = ChiPolicyKind(name.lower())
        except ValueError:
            valid = ", ".join(k.value for k in ChiPolicyKind)
            raise DomainError(f"unknown chi policy {text!r} (expected one of {valid})") from None
        if kind == ChiPolicyKind.FIXED:
            try:
                return cls.fixed(float(arg) if arg else 0.0)
            except ValueError:
                raise DomainError(f"invalid fixed chi value in {text!r}") from None
        if arg:
            raise DomainError(f"chi policy {name!r} takes no argument")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == ChiPolicyKind.FIXED:
            return f"fixed:{self.value!r}"
        return self.kind.value


def apply_chi(samples: SamplingSet, policy: ChiPolicy) -> SamplingSet:
    """Return a copy of *samples* with χ assigned per *policy*.

    ALTERNATE_PAIR expects a pairwise-duplicated set (see
    :func:`duplicate_pairwise`): even indices get χ = 0, odd ones χ = π/2.
    """
    K = samples.K
    if policy.kind == ChiPolicyKind.EVEN_SPREAD:
        chi = C.TWO_PI * np.arange(K) / K
    elif policy.kind == ChiPolicyKind.ALTERNATE_PAIR:
        if K % 2:
            raise DomainError(f"alternating chi needs an even number of samples (got K={K})")
        chi = np.where(np.arange(K) % 2 == 0, 0.0, 0.5 * math.pi)
    elif policy.kind == ChiPolicyKind.FIXED:
        chi = np.full(K, np.mod(policy.value, C.TWO_PI))
    else:
        chi = samples.chi
    return samples.with_chi(chi)


def duplicate_pairwise(samples: SamplingSet) -> SamplingSet:
    """Repeat every point twice, consecutively (2K points)."""
    return SamplingSet(
        np.repeat(samples.theta, 2),
        np.repeat(samples.phi, 2),
        np.repeat(samples.chi, 2),
        samples.provenance,
    )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def spiral(K: int) -> SamplingSet:
    """Generalized spiral points, south pole to north pole.

    h_i = −1 + 2(i−1)/(K−1), θ_i = arccos h_i, and φ advances by
    3.6/√K · 1/√(1 − h_i²) between the poles; both poles take φ = 0.
    """
    if K < 2:
        raise DomainError(f"spiral needs K >= 2 (got {K})")
    h = -1.0 + 2.0 * np.arange(K) / (K - 1)
    theta = np.arccos(np.clip(h, -1.0, 1.0))

    step = np.zeros(K)
    inner = slice(1, K - 1)
    step[inner] = C.SPIRAL_C / math.sqrt(K) / np.sqrt(1.0 - h[inner] ** 2)
    phi = np.mod(np.cumsum(step), C.TWO_PI)
    phi[0] = phi[-1] = 0.0
    return SamplingSet(theta, phi, np.zeros(K), Provenance.SPIRAL)


def radical_inverse(i: np.ndarray, base: int = 2) -> np.ndarray:
    """Van der Corput radical inverse of each integer in *i*."""
    i = np.asarray(i, dtype=np.int64).copy()
    out = np.zeros(i.shape, dtype=float)
    scale = 1.0 / base
    while np.any(i > 0):
        out += (i % base) * scale
        i //= base
        scale /= base
    return out


def hammersley(K: int) -> SamplingSet:
    """Hammersley points mapped to the sphere with the equal-area map cos θ = 1 − 2v."""
    if K < 1:
        raise DomainError(f"hammersley needs K >= 1 (got {K})")
    idx = np.arange(K)
    u = idx / K
    v = radical_inverse(idx, 2)
    theta = np.arccos(np.clip(1.0 - 2.0 * v, -1.0, 1.0))
    phi = C.TWO_PI * u
    return SamplingSet(theta, phi, np.zeros(K), Provenance.HAMMERSLEY)


def random_uniform(K: int, seed: int | np.random.Generator) -> SamplingSet:
    """Uniform random points on the sphere with uniform random χ."""
    if K < 1:
        raise DomainError(f"random sampling needs K >= 1 (got {K})")
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(int(seed), Stream.RANDOM_SAMPLER)
    u = rng.random(K)
    theta = np.arccos(np.clip(1.0 - 2.0 * u, -1.0, 1.0))
    phi = rng.uniform(0.0, C.TWO_PI, K)
    chi = rng.uniform(0.0, C.TWO_PI, K)
    return SamplingSet(theta, phi, chi, Provenance.RANDOM)


def equiangular(step_deg: float) -> SamplingSet:
    """Tensor grid θ ∈ {0, …, 180°}, φ ∈ [0, 360°) at *step_deg*; θ is the outer loop."""
    n_theta = round(180.0 / step_deg) if step_deg > 0 else 0
    if n_theta < 1 or abs(n_theta * step_deg - 180.0) > 1e-9:
        raise DomainError(f"equiangular step must divide 180 degrees (got {step_deg})")
    step = math.radians(step_deg)
    theta_axis = step * np.arange(n_theta + 1)
    phi_axis = step * np.arange(2 * n_theta)
    theta, phi = np.meshgrid(theta_axis, phi_axis, indexing="ij")
    theta, phi = theta.ravel(), phi.ravel()
    return SamplingSet(theta, phi, np.zeros(theta.size), Provenance.EQUIANGULAR)


# ---------------------------------------------------------------------------
# Uniformity diagnostics
# ---------------------------------------------------------------------------

def unit_vectors(samples: SamplingSet) -> np.ndarray:
    st = np.sin(samples.theta)
    return np.column_stack([st * np.cos(samples.phi), st * np.sin(samples.phi), np.cos(samples.theta)])


def nearest_neighbor_angles(samples: SamplingSet) -> np.ndarray:
    """Geodesic angle from each point to its nearest other point (χ ignored)."""
    if samples.K < 2:
        raise DomainError("nearest-neighbour angles need at least two points")
    X = unit_vectors(samples)
    dots = np.clip(X @ X.T, -1.0, 1.0)
    np.fill_diagonal(dots, -np.inf)
    return np.arccos(dots.max(axis=1))


def cap_discrepancy(samples: SamplingSet, n_caps: int, rng: int | np.random.Generator) -> float:
    """Monte-Carlo spherical-cap discrepancy.

    Draws *n_caps* caps with uniform random centre and height and returns
    the largest gap between the fraction of points inside a cap and the
    cap's normalized area.
    """
    if n_caps < 1:
        raise DomainError(f"n_caps must be >= 1 (got {n_caps})")
    gen = rng if isinstance(rng, np.random.Generator) else derive_rng(int(rng), Stream.DISCREPANCY)

    centres = gen.normal(size=(n_caps, 3))
    centres /= np.linalg.norm(centres, axis=1, keepdims=True)
    heights = gen.uniform(-1.0, 1.0, n_caps)

    X = unit_vectors(samples)
    inside = (X @ centres.T) >= heights[None, :]
    fractions = inside.mean(axis=0)
    areas = 0.5 * (1.0 - heights)
    return float(np.max(np.abs(fractions - areas)))
