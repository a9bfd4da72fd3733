"""Test functions for the explicit formula.

Every function here is even, equal to 1 at the origin and supported in
[-1, 1] (or [-lambda, lambda] once scaled). Evaluation is vectorised: each
``__call__`` accepts a float or a numpy array.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from condbound.errors import ValidationError, ZeroFunction
from condbound.quadrature import QuadratureConfig, gauss_legendre, integrate_adaptive

_PHI_CFG = QuadratureConfig(abs_tol=1e-13)
_FOURIER_CFG = QuadratureConfig(abs_tol=1e-12)


def _wrap(x, values):
    return float(values) if np.ndim(x) == 0 else values


class TestFunction:
    """Base class; subclasses are frozen dataclasses and therefore hashable."""

    __test__ = False  # keep pytest from collecting it
    support = 1.0

    def __call__(self, x):
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Odlyzko(TestFunction):
    """(1-|x|) cos(pi x) + sin(pi |x|)/pi on [-1, 1], zero elsewhere."""

    def __call__(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        inside = ax < 1.0
        a = np.where(inside, ax, 1.0)
        values = np.where(inside, (1.0 - a) * np.cos(np.pi * a) + np.sin(np.pi * a) / np.pi, 0.0)
        return _wrap(x, values)

    @property
    def kind(self):
        return "odlyzko"

    def to_config(self):
        return {"kind": "odlyzko"}


def crosscorr(a: Sequence[float], b: Sequence[float], x) -> np.ndarray:
    """(g_a * g_b)(x) = int g_a(t) g_b(t - |x|) dt for even polynomials on [-1/2, 1/2].

    ``a`` and ``b`` hold the coefficients of x^0, x^2, x^4, ... The integrand
    over the overlap [|x| - 1/2, 1/2] is a polynomial, so a Gauss-Legendre rule
    with enough nodes is exact.
    """
    ax = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    degree = 2 * (len(a) - 1) + 2 * (len(b) - 1)
    nodes, weights = gauss_legendre(max(1, math.ceil((degree + 1) / 2)))
    lo = np.minimum(ax, 1.0) - 0.5
    half = 0.5 * (0.5 - lo)
    t = (0.5 * (lo + 0.5))[:, None] + half[:, None] * nodes[None, :]
    ga = np.polynomial.polynomial.polyval(t * t, np.asarray(a, dtype=float))
    gb = np.polynomial.polynomial.polyval((t - ax[:, None]) ** 2, np.asarray(b, dtype=float))
    values = half * ((ga * gb) @ weights)
    return np.where(ax < 1.0, values, 0.0)


@dataclass(frozen=True)
class PolyAutocorr(TestFunction):
    """Normalised autocorrelation g*g / (g*g)(0), g(x) = sum a_i x^(2i) on [-1/2, 1/2]."""

    coeffs: tuple[float, ...]
    normalization: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValidationError("need at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        norm = float(crosscorr(coeffs, coeffs, 0.0)[0])
        if not norm > 0.0:
            raise ZeroFunction("g is identically zero on [-1/2, 1/2]")
        object.__setattr__(self, "normalization", norm)

    def __call__(self, x):
        values = crosscorr(self.coeffs, self.coeffs, x) / self.normalization
        return _wrap(x, values if np.ndim(x) else values[0])

    def g(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float) ** 2, self.coeffs)

    @property
    def kind(self):
        return "poly"

    def to_config(self):
        return {"kind": "poly", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class CoshDamped(TestFunction):
    """x -> F(x)/cosh(x), the substitute used when GRH is not assumed."""

    inner: TestFunction

    def __call__(self, x):
        values = np.asarray(self.inner(x)) / np.cosh(np.asarray(x, dtype=float))
        return _wrap(x, values)

    @property
    def support(self):
        return self.inner.support

    @property
    def kind(self):
        return self.inner.kind

    def to_config(self):
        return {**self.inner.to_config(), "cosh_damped": True}


@dataclass(frozen=True)
class DampedAt(TestFunction):
    """u -> F(u)/cosh(lam u): once scaled by lam this is F_lam(x)/cosh(x).

    This is how unconditional bounds damp the weight, in the variable x of
    the explicit formula rather than in the unscaled one.
    """

    inner: TestFunction
    lam: float

    def __call__(self, x):
        values = np.asarray(self.inner(x)) / np.cosh(self.lam * np.asarray(x, dtype=float))
        return _wrap(x, values)

    @property
    def support(self):
        return self.inner.support

    @property
    def kind(self):
        return self.inner.kind

    def to_config(self):
        return self.inner.to_config()


@dataclass(frozen=True)
class Scaled(TestFunction):
    """F_lambda(x) = F(x / lambda), supported on [-lambda, lambda]."""

    base: TestFunction
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")

    def __call__(self, x):
        return self.base(np.asarray(x, dtype=float) / self.lam) if np.ndim(x) else self.base(x / self.lam)

    @property
    def support(self):
        return self.lam * self.base.support

    @property
    def kind(self):
        return self.base.kind

    def to_config(self):
        return self.base.to_config()


def odlyzko_eval(x: float) -> float:
    return Odlyzko()(x)


def autocorr_build(coeffs: Sequence[float]) -> PolyAutocorr:
    return validated(PolyAutocorr(tuple(coeffs)))


def cosh_damp(F: TestFunction) -> CoshDamped:
    return CoshDamped(F)


def validated(F: TestFunction, step: float = 1e-3) -> TestFunction:
    """Warn when |F| exceeds 1 somewhere on a grid over its support."""
    grid = np.arange(0.0, F.support + step, step)
    worst = float(np.max(np.abs(F(grid))))
    if worst > 1.0 + 1e-12:
        warnings.warn(f"|F| reaches {worst:.6g} > 1 on [0, {F.support}]", stacklevel=2)
    return F


@lru_cache(maxsize=256)
def phi_half(F: TestFunction) -> float:
    """Phi(1/2) = integral of F over the real line."""
    if isinstance(F, Scaled):
        return F.lam * phi_half(F.base)
    return 2.0 * integrate_adaptive(F, 0.0, F.support, _PHI_CFG)


def fourier_transform(F: TestFunction, t: float) -> float:
    return 2.0 * integrate_adaptive(
        lambda x: np.asarray(F(x)) * np.cos(t * x), 0.0, F.support, _FOURIER_CFG)


@lru_cache(maxsize=256)
def fourier_min(F: TestFunction, t_max: float, grid_step: float) -> float:
    """Minimum of the cosine transform of F on the grid 0, step, ..., t_max.

    A numerical diagnostic for positivity, not a certificate.
    """
    if not (t_max > 0 and grid_step > 0):
        raise ValidationError("t_max and grid_step must be positive")
    count = int(math.floor(t_max / grid_step + 1e-9))
    return min(fourier_transform(F, k * grid_step) for k in range(count + 1))


def parse_testfunc(text: str) -> TestFunction:
    """Parse the command-line form: ``odlyzko`` or ``poly:a0,a2,...``."""
    text = text.strip()
    if text.lower() == "odlyzko":
        return Odlyzko()
    if text.lower().startswith("poly:"):
        try:
            coeffs = [float(c) for c in text[5:].split(",") if c.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad polynomial coefficients in {text!r}") from exc
        return autocorr_build(coeffs)
    raise ValidationError(f"unknown test function {text!r}")


def testfunc_from_config(cfg: dict | str | None) -> TestFunction:
    """Build a test function from {"kind": "odlyzko"} or {"kind": "poly", "coeffs": [...]}."""
    if cfg is None:
        return Odlyzko()
    if isinstance(cfg, str):
        return parse_testfunc(cfg)
    kind = str(cfg.get("kind", "odlyzko")).lower()
    if kind == "odlyzko":
        F: TestFunction = Odlyzko()
    elif kind == "poly":
        if "coeffs" not in cfg:
            raise ValidationError("poly test function needs 'coeffs'")
        F = autocorr_build(cfg["coeffs"])
    else:
        raise ValidationError(f"unknown test function kind {kind!r}")
    if cfg.get("cosh_damped"):
        F = CoshDamped(F)
    return F
