import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from wigner_cs.constants import ChiPolicyKind, Provenance
from wigner_cs.exceptions import DomainError
from wigner_cs.sampling import (
    ChiPolicy,
    apply_chi,
    cap_discrepancy,
    duplicate_pairwise,
    equiangular,
    hammersley,
    nearest_neighbor_angles,
    radical_inverse,
    random_uniform,
    spiral,
    unit_vectors,
)
from wigner_cs.sensing import SamplingSet


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def test_spiral_layout():
    s = spiral(100)
    assert s.K == 100
    assert s.provenance == Provenance.SPIRAL
    assert s.theta[0] == pytest.approx(math.pi)
    assert s.theta[-1] == pytest.approx(0.0)
    assert np.all(np.diff(s.theta) < 0)
    assert s.phi[0] == 0.0 and s.phi[-1] == 0.0
    assert s.is_canonical()
    assert_allclose(np.cos(s.theta), np.linspace(-1, 1, 100), atol=1e-12)


def test_spiral_is_even():
    gaps = nearest_neighbor_angles(spiral(100))
    assert gaps.max() / gaps.min() < 3.0


def test_spiral_consecutive_gaps():
    X = unit_vectors(spiral(100))
    gaps = np.arccos(np.clip(np.sum(X[1:] * X[:-1], axis=1), -1.0, 1.0))
    mean = gaps.mean()
    assert np.all(gaps >= 0.5 * mean)
    assert np.all(gaps <= 2.0 * mean)


def test_spiral_needs_two_points():
    with pytest.raises(DomainError):
        spiral(1)


def test_radical_inverse():
    assert_allclose(radical_inverse(np.arange(8), 2), [0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875])
    assert_allclose(radical_inverse(np.array([1, 4]), 3), [1 / 3, 4 / 9])


def test_hammersley_points():
    s = hammersley(4)
    assert_allclose(s.phi, 2 * np.pi * np.arange(4) / 4)
    assert_allclose(np.cos(s.theta), [1.0, 0.0, 0.5, -0.5], atol=1e-12)
    assert s.provenance == Provenance.HAMMERSLEY
    assert s.is_canonical()
    with pytest.raises(DomainError):
        hammersley(0)


def test_random_uniform_is_seeded():
    a, b = random_uniform(50, 7), random_uniform(50, 7)
    assert_allclose(a.stacked(), b.stacked())
    assert not np.allclose(a.theta, random_uniform(50, 8).theta)
    gen = np.random.default_rng(1)
    assert random_uniform(5, gen).K == 5


def test_random_uniform_is_uniform_on_sphere():
    s = random_uniform(2000, 0)
    assert stats.kstest(np.cos(s.theta), stats.uniform(loc=-1, scale=2).cdf).pvalue > 0.001
    assert stats.kstest(s.phi, stats.uniform(loc=0, scale=2 * np.pi).cdf).pvalue > 0.001
    assert stats.kstest(s.chi, stats.uniform(loc=0, scale=2 * np.pi).cdf).pvalue > 0.001
    assert s.is_canonical()


def test_equiangular_grid():
    s = equiangular(10.0)
    assert s.K == 19 * 36
    assert_allclose(s.theta[:36], 0.0)
    assert_allclose(s.phi[:3], np.radians([0, 10, 20]))
    assert s.theta[-1] == pytest.approx(math.pi)
    assert s.provenance == Provenance.EQUIANGULAR
    with pytest.raises(DomainError):
        equiangular(7.0)
    with pytest.raises(DomainError):
        equiangular(0.0)


# ---------------------------------------------------------------------------
# χ policies
# ---------------------------------------------------------------------------

def test_even_spread():
    s = apply_chi(spiral(8), ChiPolicy.even_spread())
    assert_allclose(s.chi, 2 * np.pi * np.arange(8) / 8)


def test_alternate_pair():
    s = apply_chi(duplicate_pairwise(spiral(5)), ChiPolicy.alternate_pair())
    assert s.K == 10
    assert_allclose(s.chi, [0, np.pi / 2] * 5)
    assert_allclose(s.theta[0::2], s.theta[1::2])
    with pytest.raises(DomainError):
        apply_chi(spiral(5), ChiPolicy.alternate_pair())


def test_fixed_and_free():
    s = random_uniform(6, 2)
    assert_allclose(apply_chi(s, ChiPolicy.fixed(7.0)).chi, 7.0 - 2 * np.pi)
    assert_allclose(apply_chi(s, ChiPolicy.free()).chi, s.chi)
    # the input set is not modified
    before = s.chi.copy()
    apply_chi(s, ChiPolicy.even_spread())
    assert_allclose(s.chi, before)


def test_chi_policy_parse():
    assert ChiPolicy.parse("even") == ChiPolicy.even_spread()
    assert ChiPolicy.parse("FREE").kind == ChiPolicyKind.FREE
    assert ChiPolicy.parse("fixed:1.5") == ChiPolicy.fixed(1.5)
    assert ChiPolicy.parse("fixed") == ChiPolicy.fixed(0.0)
    for policy in (ChiPolicy.alternate_pair(), ChiPolicy.fixed(0.25)):
        assert ChiPolicy.parse(str(policy)) == policy
    for bad in ("diagonal", "even:1", "fixed:abc"):
        with pytest.raises(DomainError):
            ChiPolicy.parse(bad)


def test_duplicate_pairwise():
    s = hammersley(3)
    d = duplicate_pairwise(s)
    assert d.K == 6
    assert_allclose(d.phi, np.repeat(s.phi, 2))
    assert d.provenance == s.provenance


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def test_nearest_neighbor_angles():
    s = SamplingSet([0.0, np.pi, np.pi / 2], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    assert_allclose(nearest_neighbor_angles(s), [np.pi / 2] * 3, atol=1e-12)
    with pytest.raises(DomainError):
        nearest_neighbor_angles(SamplingSet([0.1], [0.0], [0.0]))


def test_cap_discrepancy():
    even = cap_discrepancy(spiral(400), 2000, 5)
    assert even == cap_discrepancy(spiral(400), 2000, 5)
    clustered = random_uniform(400, 1)
    clustered = SamplingSet(clustered.theta / 2, clustered.phi, clustered.chi)
    assert 0.0 <= even < 0.1
    assert cap_discrepancy(clustered, 2000, 5) > 0.3
    with pytest.raises(DomainError):
        cap_discrepancy(spiral(10), 0, 5)


def test_hammersley_beats_random_discrepancy():
    K = 256
    low = np.mean([cap_discrepancy(hammersley(K), 2000, draw) for draw in range(20)])
    high = np.mean([cap_discrepancy(random_uniform(K, 100 + draw), 2000, draw) for draw in range(20)])
    assert low < high
