"""Quadrature: adaptive Gauss-Legendre, the exponential integral E1, and the
archimedean constant M(lambda, F) of the explicit formula."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from condbound.errors import DomainError, ToleranceNotReached

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)

# below this the H(lambda) integrand is evaluated from its Taylor expansion
SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_depth: int = 40
    nodes_per_panel: int = 15

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.nodes_per_panel < 1:
            raise ValueError("nodes_per_panel must be at least 1")


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def fixed_gauss(f: Callable, a: float, b: float, n: int) -> float:
    """n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 2n-1."""
    nodes, weights = gauss_legendre(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return float(half * np.dot(weights, f(mid + half * nodes)))


def integrate_adaptive(f: Callable, a: float, b: float,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integrate a vectorised ``f`` over [a, b] by adaptive bisection.

    Each panel is accepted when its Gauss-Legendre value agrees with the sum
    over its two halves to within a share of ``abs_tol`` proportional to the
    panel width.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    n = cfg.nodes_per_panel
    total_width = b - a

    def panel(lo, hi):
        return fixed_gauss(f, lo, hi, n)

    total = 0.0
    stack = [(a, b, panel(a, b), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        tol = cfg.abs_tol * (hi - lo) / total_width
        if abs(left + right - whole) <= tol:
            total += left + right
            continue
        if depth + 1 >= cfg.max_depth:
            raise ToleranceNotReached(
                f"no convergence on [{lo:.6g}, {hi:.6g}] after {cfg.max_depth} bisections")
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return total


def exp_integral_e1(x: float) -> float:
    """E1(x) = int_x^inf exp(-t)/t dt for x > 0."""
    if not x > 0:
        raise DomainError(f"E1 is defined for x > 0, got {x}")
    if x <= 1.0:
        # E1(x) = -gamma - log x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) <= 1e-17 * abs(total):
                break
            k += 1
        return -EULER_GAMMA - math.log(x) + total
    # continued fraction, modified Lentz
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    i = 1
    while True:
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        i += 1
        if i > 10_000:
            raise ToleranceNotReached(f"E1 continued fraction did not converge at x={x}")
    return h * math.exp(-x)


def _kernel(fx: np.ndarray, f0: float, x: np.ndarray) -> np.ndarray:
    """F(x)/(e^x - 1) - f0 e^{-x}/x, cancelling the 1/x poles near 0."""
    out = np.empty_like(x)
    small = x < SERIES_CUTOFF
    big = ~small
    xb = x[big]
    out[big] = fx[big] / np.expm1(xb) - f0 * np.exp(-xb) / xb
    if small.any():
        xs = x[small]
        fs = fx[small]
        out[small] = (fs - f0) / xs - 0.5 * fs + f0 + xs * (fs / 12.0 - 0.5 * f0)
    return out


def archimedean_functional(f: Callable, f0: float, lam: float,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """2 (f0 log 2pi + int_0^inf [f(x) e^-x/(1-e^-x) - f0 e^-x/x] dx).

    ``f`` must vanish on [lam, inf); it need not be normalised, which is what
    makes this usable as a linear functional by the optimizer.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return _kernel(np.asarray(f(x), dtype=float), f0, x)

    head = integrate_adaptive(integrand, 0.0, lam, cfg)
    return 2.0 * (f0 * LOG_2PI + head - f0 * exp_integral_e1(lam))


@lru_cache(maxsize=4096)
def m_lambda(F, lam: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """M(lambda, F) = 2 (log 2pi + H(lambda) - E1(lambda)) for F(0) = 1."""
    f0 = float(F(0.0))
    if abs(f0 - 1.0) > 1e-9:
        raise DomainError(f"test function must satisfy F(0) = 1, got {f0}")
    lam = float(lam)
    return archimedean_functional(lambda x: F(x / lam), 1.0, lam, cfg)


def euler_gamma_integral(cfg: QuadratureConfig = DEFAULT_CONFIG, cutoff: float = 40.0) -> float:
    """int_0^inf [e^-x/(1-e^-x) - e^-x/x] dx, which equals Euler's constant.

    The range beyond ``cutoff`` is added in closed form:
    -log(1 - e^-cutoff) - E1(cutoff).
    """
    head = integrate_adaptive(
        lambda x: _kernel(np.ones_like(x), 1.0, np.asarray(x, dtype=float)), 0.0, cutoff, cfg)
    return head - math.log1p(-math.exp(-cutoff)) - exp_integral_e1(cutoff)
