import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import eval_jacobi, factorial

from wigner_cs.exceptions import DomainError
from wigner_cs.specfun import (
    WignerOrder,
    jacobi,
    jacobi_deriv,
    sph_harm,
    sph_harm_dtheta,
    wigner_D,
    wigner_d,
    wigner_d_dtheta,
)


def factorial_sum_d(n, mu, m, theta):
    """Closed-form factorial sum for d^n_{mu m}, first index m, second mu."""
    a, b = m, mu
    total = 0.0
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    for k in range(0, 2 * n + 1):
        f = [n + b - k, k, a - b + k, n - a - k]
        if min(f) < 0:
            continue
        num = math.sqrt(factorial(n + a) * factorial(n - a) * factorial(n + b) * factorial(n - b))
        den = factorial(f[0]) * factorial(f[1]) * factorial(f[2]) * factorial(f[3])
        total += (-1) ** (a - b + k) * num / den * c ** (2 * n + b - a - 2 * k) * s ** (a - b + 2 * k)
    return total


def orders(n_max):
    for n in range(1, n_max + 1):
        for mu in range(-n, n + 1):
            for m in range(-n, n + 1):
                yield WignerOrder(n, mu, m)


# ---------------------------------------------------------------------------
# Jacobi
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha, xi, lam", [(0, 0, 0), (1, 2, 0), (3, 1, 1), (7, 0, 4), (12, 3, 5)])
def test_jacobi_matches_reference(alpha, xi, lam):
    x = np.linspace(-1, 1, 41)
    assert_allclose(jacobi(alpha, xi, lam, x), eval_jacobi(alpha, xi, lam, x), rtol=1e-10, atol=1e-10)


def test_jacobi_low_orders():
    x = np.linspace(-1, 1, 7)
    assert_allclose(jacobi(0, 2, 3, x), np.ones_like(x))
    assert_allclose(jacobi(1, 2, 3, x), 0.5 * (2 - 3 + (2 + 3 + 2) * x))


def test_jacobi_scalar_in_scalar_out():
    assert isinstance(jacobi(3, 1, 2, 0.25), float)
    assert isinstance(jacobi(0, 1, 2, 0.25), float)


def test_jacobi_domain_errors():
    with pytest.raises(DomainError):
        jacobi(2, -1, 0, 0.0)
    with pytest.raises(DomainError):
        jacobi(2, 0, 0, 1.1)
    # within tolerance of the endpoint
    jacobi(2, 0, 0, 1.0 + 1e-12)


def test_jacobi_deriv_finite_difference():
    x = np.linspace(-0.9, 0.9, 13)
    h = 1e-6
    for alpha, xi, lam in [(4, 1, 2), (6, 0, 3), (2, 2, 2)]:
        fd = (jacobi(alpha, xi, lam, x + h) - jacobi(alpha, xi, lam, x - h)) / (2 * h)
        assert_allclose(jacobi_deriv(alpha, xi, lam, 1, x), fd, rtol=1e-6, atol=1e-6)


def test_jacobi_deriv_beyond_degree_is_zero():
    assert_allclose(jacobi_deriv(2, 1, 1, 3, np.linspace(-1, 1, 5)), 0.0)
    assert jacobi_deriv(2, 1, 1, 3, 0.5) == 0.0
    with pytest.raises(DomainError):
        jacobi_deriv(2, 1, 1, -1, 0.5)


# ---------------------------------------------------------------------------
# Wigner d
# ---------------------------------------------------------------------------

def test_order_validation():
    with pytest.raises(DomainError):
        WignerOrder(0, 0, 0)
    with pytest.raises(DomainError):
        WignerOrder(2, 3, 0)
    with pytest.raises(DomainError):
        WignerOrder(2, 0, -3)


def test_order_indices():
    order = WignerOrder(5, 1, -3)
    assert (order.xi, order.lam, order.alpha) == (4, 2, 2)
    assert order.omega == 1
    assert WignerOrder(5, -2, 1).omega == -1
    assert WignerOrder(5, -1, 1).omega == 1


def test_wigner_d_factorial_sum():
    for order in orders(5):
        for theta in (0.3, 1.1, 2.7):
            expected = factorial_sum_d(order.n, order.mu, order.m, theta)
            assert wigner_d(order, theta) == pytest.approx(expected, abs=1e-12)


def test_wigner_d_known_values():
    theta = 0.8
    assert wigner_d(WignerOrder(1, 0, 0), theta) == pytest.approx(math.cos(theta))
    assert wigner_d(WignerOrder(1, 0, 1), theta) == pytest.approx(-math.sin(theta) / math.sqrt(2))
    assert wigner_d(WignerOrder(1, 1, 1), theta) == pytest.approx((1 + math.cos(theta)) / 2)


def test_kronecker_at_zero():
    for order in orders(12):
        expected = 1.0 if order.mu == order.m else 0.0
        assert wigner_d(order, 0.0) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [*range(1, 13), 20])
def test_row_unitarity(n):
    theta = np.linspace(0, np.pi, 50)
    for mu in range(-n, n + 1):
        total = sum(np.asarray(wigner_d(WignerOrder(n, mu, m), theta)) ** 2 for m in range(-n, n + 1))
        assert_allclose(total, 1.0, atol=1e-10)


def test_symmetries():
    theta = np.linspace(0.1, 3.0, 9)
    for order in orders(12):
        n, mu, m = order.n, order.mu, order.m
        d = wigner_d(order, theta)
        assert_allclose(d, (-1) ** (mu - m) * wigner_d(WignerOrder(n, m, mu), theta), atol=1e-12)
        assert_allclose(d, wigner_d(WignerOrder(n, -m, -mu), theta), atol=1e-12)


def test_quadrature_orthogonality():
    x, w = np.polynomial.legendre.leggauss(64)
    theta = np.arccos(x)
    for mu, m in [(0, 0), (1, -1), (2, 1), (-1, 0), (3, -2), (-4, 4)]:
        n_min = max(abs(mu), abs(m), 1)
        for n1 in range(n_min, 9):
            for n2 in range(n_min, 9):
                integral = np.sum(w * wigner_d(WignerOrder(n1, mu, m), theta) * wigner_d(WignerOrder(n2, mu, m), theta))
                expected = 2.0 / (2 * n1 + 1) if n1 == n2 else 0.0
                assert integral == pytest.approx(expected, abs=1e-9)


def test_wigner_d_dtheta_finite_difference():
    theta = np.linspace(0.05, np.pi - 0.05, 23)
    h = 1e-6
    for order in orders(10):
        fd = (np.asarray(wigner_d(order, theta + h)) - np.asarray(wigner_d(order, theta - h))) / (2 * h)
        analytic = np.asarray(wigner_d_dtheta(order, theta))
        assert_allclose(analytic, fd, rtol=1e-5, atol=1e-7)


def test_wigner_d_dtheta_finite_at_poles():
    for order in orders(4):
        values = wigner_d_dtheta(order, np.array([0.0, np.pi]))
        assert np.all(np.isfinite(values))
    assert isinstance(wigner_d_dtheta(WignerOrder(3, 1, 0), 0.4), float)


def test_wigner_D_phases():
    order = WignerOrder(3, -2, 1)
    theta, phi, chi = 1.2, 0.7, 2.1
    expected = np.exp(1j * (1 * phi - 2 * chi)) * wigner_d(order, theta)
    assert wigner_D(order, theta, phi, chi) == pytest.approx(expected)
    assert isinstance(wigner_D(order, theta, phi, chi), complex)
    assert abs(wigner_D(order, theta, phi, chi)) == pytest.approx(abs(wigner_d(order, theta)))


# ---------------------------------------------------------------------------
# Spherical harmonics
# ---------------------------------------------------------------------------

def test_sph_harm_matches_wigner():
    theta = np.linspace(0, np.pi, 11)
    phi = np.linspace(0, 2 * np.pi, 11)
    for n in range(1, 7):
        for m in range(-n, n + 1):
            D = wigner_D(WignerOrder(n, 0, m), theta, phi, 0.0)
            Y = sph_harm(n, m, theta, phi)
            assert_allclose(D, (-1) ** m * math.sqrt(4 * math.pi / (2 * n + 1)) * Y, atol=1e-12)


def test_sph_harm_without_condon_shortley_phase():
    theta, phi = 0.9, 0.4
    expected = math.sqrt(3 / (8 * math.pi)) * math.sin(theta) * np.exp(1j * phi)
    assert sph_harm(1, 1, theta, phi) == pytest.approx(expected)


def test_sph_harm_orthonormal():
    x, w = np.polynomial.legendre.leggauss(24)
    n_phi = 48
    phi_axis = 2 * np.pi * np.arange(n_phi) / n_phi
    theta, phi = np.meshgrid(np.arccos(x), phi_axis, indexing="ij")
    weights = np.repeat(w, n_phi) * (2 * np.pi / n_phi)
    modes = [(n, m) for n in range(1, 5) for m in range(-n, n + 1)]
    Y = np.column_stack([sph_harm(n, m, theta.ravel(), phi.ravel()) for n, m in modes])
    assert_allclose((Y.conj().T * weights) @ Y, np.eye(len(modes)), atol=1e-10)


def test_sph_harm_dtheta_finite_difference():
    theta = np.linspace(0.1, 3.0, 13)
    phi = np.full_like(theta, 0.3)
    h = 1e-6
    for n in range(1, 6):
        for m in range(-n, n + 1):
            fd = (sph_harm(n, m, theta + h, phi) - sph_harm(n, m, theta - h, phi)) / (2 * h)
            assert_allclose(sph_harm_dtheta(n, m, theta, phi), fd, rtol=1e-5, atol=1e-7)


def test_sph_harm_domain_errors():
    with pytest.raises(DomainError):
        sph_harm(0, 0, 0.1, 0.1)
    with pytest.raises(DomainError):
        sph_harm(2, 3, 0.1, 0.1)
