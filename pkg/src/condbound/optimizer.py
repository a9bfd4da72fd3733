"""Choosing a polynomial test function at fixed lambda.

With g(x) = sum a_i x^(2i) on [-1/2, 1/2] and F = g*g, every term of the
log bound is linear in F, so the bound is the quadratic form a^T B a where
B_ij is the bound functional applied to p_i * p_j (p_i = x^(2i)). The
normalisation F(0) = int g^2 = 1 is a^T G a = 1, so the best coefficients
are the top eigenvector of the pencil (B, G).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from condbound.bounds import BoundQuery, BoundResult, Mode, evaluate
from condbound.errors import NotPositiveDefinite, ToleranceNotReached, ValidationError
from condbound.quadrature import archimedean_functional
from condbound.sums import CoeffModel, term_table
from condbound.testfunc import Odlyzko, PolyAutocorr, crosscorr


def gram_matrix(d: int) -> np.ndarray:
    """G_ij = int_{-1/2}^{1/2} x^(2i+2j) dx."""
    if d < 0:
        raise ValidationError("basis degree must be >= 0")
    k = np.add.outer(np.arange(d + 1), np.arange(d + 1))
    return 0.5 ** (2 * k) / (2 * k + 1)


@dataclass(frozen=True)
class QuadraticProgram:
    G: np.ndarray
    B: np.ndarray
    basis_degree: int

    def __post_init__(self):
        n = self.basis_degree + 1
        if self.G.shape != (n, n) or self.B.shape != (n, n):
            raise ValidationError(f"matrices must be {n}x{n}")


def _unit(i: int, d: int) -> np.ndarray:
    e = np.zeros(d + 1)
    e[i] = 1.0
    return e


def bound_matrix(query: BoundQuery, d: int, coeff_model: CoeffModel | str | None = None) -> np.ndarray:
    """B_ij: the log-bound functional evaluated at the un-normalised p_i * p_j."""
    if query.lam is None:
        raise ValidationError("the optimizer needs a fixed lambda")
    model = CoeffModel(coeff_model) if coeff_model is not None else query.model
    lam = float(query.lam)
    K = query.field
    n = K.degree
    g = query.dim
    G = gram_matrix(d)
    table = term_table(K, query.spec, g, lam, model)
    mask = table.points <= lam
    x = table.points[mask] / lam
    weights = table.prefactor[mask]
    damped = query.mode == Mode.UNCONDITIONAL
    disc = 2.0 * g * math.log(abs(K.disc)) / n

    B = np.zeros((d + 1, d + 1))
    for i in range(d + 1):
        for j in range(i, d + 1):
            a, b = _unit(i, d), _unit(j, d)

            def h(t, a=a, b=b):
                values = crosscorr(a, b, t)
                return values / np.cosh(lam * t) if damped else values

            h0 = G[i, j]
            arch = archimedean_functional(lambda y: h(np.asarray(y) / lam), h0, lam, query.quad)
            primes = float(np.dot(weights, h(x))) if x.size else 0.0
            value = g * arch - 2.0 * primes / n - disc * h0
            if query.mode == Mode.GRH and query.rank:
                value += lam * query.rank * G[0, i] * G[0, j] / n
            B[i, j] = B[j, i] = value
    return B


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic Jacobi rotations."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("need a square matrix")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1.0)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < tol * scale:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-20 * scale:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(n)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
                V = V @ R
    raise ToleranceNotReached(f"Jacobi did not converge in {max_sweeps} sweeps")


def maximize_quadratic(prog: QuadraticProgram, linear: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Maximise a^T (B + linear) a subject to a^T G a = 1."""
    B = 0.5 * (prog.B + prog.B.T)
    if linear is not None:
        B = B + np.asarray(linear, dtype=float)
    try:
        L = np.linalg.cholesky(prog.G)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Gram matrix is not positive definite") from exc
    Linv = np.linalg.inv(L)
    C = Linv @ B @ Linv.T
    values, vectors = jacobi_eigen_sorted(C)
    a = Linv.T @ vectors[:, -1]
    a = a / math.sqrt(float(a @ prog.G @ a))
    if a[0] < 0 or (a[0] == 0 and a[np.flatnonzero(a)[0]] < 0):
        a = -a
    return a, float(a @ B @ a)


def jacobi_eigen_sorted(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values, vectors = jacobi_eigh(A)
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


@dataclass(frozen=True)
class Optimum:
    coeffs: tuple[float, ...]
    value: float
    testfunc: PolyAutocorr
    result: BoundResult
    odlyzko: BoundResult
    constraint_residual: float


def optimize_testfunc(query: BoundQuery, d: int, coeff_model: CoeffModel | str | None = None) -> Optimum:
    """Best polynomial autocorrelation at the query's lambda, re-evaluated through the bounds."""
    model = CoeffModel(coeff_model) if coeff_model is not None else query.model
    query = replace(query, model=model, grid=None)
    G = gram_matrix(d)
    prog = QuadraticProgram(G, bound_matrix(query, d, model), d)
    a, value = maximize_quadratic(prog)
    F = PolyAutocorr(tuple(float(v) for v in a))
    result = evaluate(replace(query, testfunc=F), query.lam)
    odlyzko = evaluate(replace(query, testfunc=Odlyzko()), query.lam)
    residual = abs(float(a @ G @ a) - 1.0)
    return Optimum(tuple(float(v) for v in a), value, F, result, odlyzko, residual)
