"""Special functions: Jacobi polynomials, Wigner d/D functions, spherical harmonics.

Conventions
-----------
* ``wigner_d(order, θ)`` with ``order = (n, μ, m)`` is

      d^n_{μm}(θ) = ω √γ sin^ξ(θ/2) cos^λ(θ/2) P_α^{(ξ,λ)}(cos θ)

  with ξ = |m − μ|, λ = |m + μ|, α = n − (ξ + λ)/2,
  γ = α!(α+ξ+λ)! / ((α+ξ)!(α+λ)!) and ω = 1 for μ ≥ m, else (−1)^{μ−m}.
* ``wigner_D = e^{imφ} d^n_{μm}(θ) e^{iμχ}``.
* ``sph_harm`` is the orthonormal harmonic *without* the Condon–Shortley
  phase, so that ``D^n_{0m} = (−1)^m √(4π/(2n+1)) Y_n^m`` holds exactly.

All functions accept scalars or numpy arrays for the angle/argument and
broadcast elementwise.  They are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, lpmv

from wigner_cs import constants as C
from wigner_cs.exceptions import DomainError

ArrayLike = float | np.ndarray


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WignerOrder:
    """Degree and orders of a Wigner function, with the derived Jacobi indices."""

    n: int
    mu: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"degree n must be >= 1 (got {self.n})")
        if abs(self.mu) > self.n or abs(self.m) > self.n:
            raise DomainError(f"orders must satisfy |mu|, |m| <= n (got n={self.n}, mu={self.mu}, m={self.m})")

    @property
    def xi(self) -> int:
        return abs(self.m - self.mu)

    @property
    def lam(self) -> int:
        return abs(self.m + self.mu)

    @property
    def alpha(self) -> int:
        return self.n - (self.xi + self.lam) // 2

    @property
    def omega(self) -> int:
        if self.mu >= self.m:
            return 1
        return -1 if (self.mu - self.m) % 2 else 1

    @property
    def log_gamma(self) -> float:
        """log γ, computed from log-gamma differences."""
        a, xi, lam = self.alpha, self.xi, self.lam
        return float(
            gammaln(a + 1) + gammaln(a + xi + lam + 1)
            - gammaln(a + xi + 1) - gammaln(a + lam + 1)
        )


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

def _check_jacobi_args(alpha: int, xi: int, lam: int, x: np.ndarray) -> None:
    if alpha < 0 or xi < 0 or lam < 0:
        raise DomainError(f"Jacobi parameters must be non-negative (alpha={alpha}, xi={xi}, lam={lam})")
    if np.any(np.abs(x) > 1.0 + C.JACOBI_DOMAIN_TOL):
        raise DomainError("Jacobi argument outside [-1, 1]")


def jacobi(alpha: int, xi: int, lam: int, x: ArrayLike) -> ArrayLike:
    """Evaluate P_α^{(ξ,λ)}(x) by the three-term recurrence in α."""
    xa = np.asarray(x, dtype=float)
    _check_jacobi_args(alpha, xi, lam, xa)
    a, b = float(xi), float(lam)

    p_prev = np.ones_like(xa)
    if alpha == 0:
        return p_prev if xa.ndim else float(p_prev)
    p_cur = (a + 1.0) + (a + b + 2.0) * (xa - 1.0) / 2.0

    for k in range(2, alpha + 1):
        s = 2.0 * k + a + b
        c1 = 2.0 * k * (k + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * xa + a * a - b * b)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s
        p_prev, p_cur = p_cur, (c2 * p_cur - c3 * p_prev) / c1

    return p_cur if xa.ndim else float(p_cur)


def jacobi_deriv(alpha: int, xi: int, lam: int, k: int, x: ArrayLike) -> ArrayLike:
    """k-th derivative of P_α^{(ξ,λ)} with respect to x.

    Uses d^k/dx^k P_α^{(ξ,λ)} = Γ(ξ+λ+α+1+k) / (2^k Γ(ξ+λ+α+1)) · P_{α−k}^{(ξ+k,λ+k)}.
    """
    xa = np.asarray(x, dtype=float)
    _check_jacobi_args(alpha, xi, lam, xa)
    if k < 0:
        raise DomainError(f"derivative order must be non-negative (got {k})")
    if k == 0:
        return jacobi(alpha, xi, lam, x)
    if k > alpha:
        zero = np.zeros_like(xa)
        return zero if xa.ndim else 0.0

    s = xi + lam + alpha + 1
    coef = math.exp(float(gammaln(s + k) - gammaln(s)) - k * math.log(2.0))
    return coef * jacobi(alpha - k, xi + k, lam + k, x)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------

def wigner_d(order: WignerOrder, theta: ArrayLike) -> ArrayLike:
    """Wigner d-function d^n_{μm}(θ)."""
    th = np.asarray(theta, dtype=float)
    xi, lam, alpha = order.xi, order.lam, order.alpha
    pref = order.omega * math.exp(0.5 * order.log_gamma)
    half = 0.5 * th
    val = (
        pref
        * np.power(np.sin(half), xi)
        * np.power(np.cos(half), lam)
        * jacobi(alpha, xi, lam, np.clip(np.cos(th), -1.0, 1.0))
    )
    return val if th.ndim else float(val)


def wigner_d_dtheta(order: WignerOrder, theta: ArrayLike) -> ArrayLike:
    """Analytic θ-derivative of d^n_{μm}(θ).

    θ is clamped to [ε, π − ε]; the pole values are the clamped limits.
    The ratios sinθ/(1 − cosθ) and sinθ/(1 + cosθ) are evaluated as
    cot(θ/2) and tan(θ/2).
    """
    th = np.clip(np.asarray(theta, dtype=float), C.THETA_EPS, math.pi - C.THETA_EPS)
    xi, lam, alpha = order.xi, order.lam, order.alpha
    pref = order.omega * math.exp(0.5 * order.log_gamma)
    half = 0.5 * th
    s, c = np.sin(half), np.cos(half)
    x = np.clip(np.cos(th), -1.0, 1.0)

    envelope = pref * np.power(s, xi) * np.power(c, lam)
    d = envelope * jacobi(alpha, xi, lam, x)
    ratio = 0.5 * (xi * c / s - lam * s / c)
    val = ratio * d
    if alpha >= 1:
        val = val - np.sin(th) * envelope * jacobi_deriv(alpha, xi, lam, 1, x)
    return val if np.ndim(theta) else float(val)


def wigner_D(order: WignerOrder, theta: ArrayLike, phi: ArrayLike, chi: ArrayLike) -> complex | np.ndarray:
    """Wigner D-function e^{imφ} d^n_{μm}(θ) e^{iμχ}."""
    d = np.asarray(wigner_d(order, theta))
    phase = np.exp(1j * (order.m * np.asarray(phi, dtype=float) + order.mu * np.asarray(chi, dtype=float)))
    val = phase * d
    return val if val.ndim else complex(val)


# ---------------------------------------------------------------------------
# Spherical harmonics
# ---------------------------------------------------------------------------

def sph_harm(n: int, m: int, theta: ArrayLike, phi: ArrayLike) -> complex | np.ndarray:
    """Orthonormal spherical harmonic Y_n^m(θ, φ) without the Condon–Shortley phase.

    Built from the associated Legendre function and e^{imφ}; degree starts at 1.
    """
    if n < 1:
        raise DomainError(f"degree n must be >= 1 (got {n})")
    if abs(m) > n:
        raise DomainError(f"order must satisfy |m| <= n (got n={n}, m={m})")
    am = abs(m)
    norm = math.sqrt((2 * n + 1) / (4.0 * math.pi) * math.exp(float(gammaln(n - am + 1) - gammaln(n + am + 1))))
    # lpmv carries the Condon–Shortley phase
    sign = -1.0 if (m > 0 and m % 2) else 1.0
    th = np.asarray(theta, dtype=float)
    legendre = lpmv(am, n, np.clip(np.cos(th), -1.0, 1.0))
    val = sign * norm * legendre * np.exp(1j * m * np.asarray(phi, dtype=float))
    return val if val.ndim else complex(val)


def sph_harm_dtheta(n: int, m: int, theta: ArrayLike, phi: ArrayLike) -> complex | np.ndarray:
    """θ-derivative of :func:`sph_harm`, via the μ = 0 Wigner relation."""
    order = WignerOrder(n, 0, m)
    scale = (-1.0 if m % 2 else 1.0) * math.sqrt((2 * n + 1) / (4.0 * math.pi))
    val = scale * np.asarray(wigner_d_dtheta(order, theta)) * np.exp(1j * m * np.asarray(phi, dtype=float))
    return val if val.ndim else complex(val)
