"""Numerical kernels: least squares, eigenproblems, Cholesky and tail probabilities.

Matrices are plain 2-D ``numpy.ndarray`` objects.  Every function validates its
inputs (shape, finiteness) and raises the package's typed errors instead of
returning NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from .errors import (
    DimensionMismatch,
    InvalidDof,
    NoConvergence,
    NonSquare,
    NotPositiveDefinite,
    RankDeficient,
)

RANK_TOL = 1e-10


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _square(a, name="matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {m.shape}")
    return m


def _symmetric(a, name) -> np.ndarray:
    m = _square(a, name)
    scale = max(1.0, float(np.max(np.abs(m))))
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-10 * scale):
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class OlsFit:
    """Result of an ordinary least squares fit.

    For a single response the residual covariance is the scalar ``s2 = RSS / dof``;
    for a matrix of responses (one column per equation, shared design) it is the
    ``dof``-scaled cross-product matrix of the residual columns.
    """

    coefficients: np.ndarray
    residuals: np.ndarray
    residual_covariance: float | np.ndarray
    coefficient_covariance: np.ndarray
    dof: int
    xtx_inv: np.ndarray

    @property
    def rss(self):
        return np.sum(self.residuals**2, axis=0)

    @property
    def nobs(self) -> int:
        return self.residuals.shape[0]


def ols(design, response) -> OlsFit:
    """Least squares through a Householder QR factorization of ``design``.

    ``response`` may be a vector or a matrix whose columns share the design.
    Raises :class:`RankDeficient` when the smallest ``|R_ii|`` falls below
    ``1e-10`` times the largest.
    """
    x = as_matrix(design, "design")
    y = np.asarray(response, dtype=float)
    if y.ndim not in (1, 2):
        raise DimensionMismatch("response must be a vector or a matrix")
    if not np.all(np.isfinite(y)):
        raise ValueError("response contains non-finite entries")
    n, p = x.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"design has {n} rows but response has {y.shape[0]}")
    if n <= p:
        raise DimensionMismatch(f"need more rows than columns, got {n}x{p}")

    q, r = np.linalg.qr(x, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.max() == 0.0 or diag.min() < RANK_TOL * diag.max():
        raise RankDeficient(f"design of shape {x.shape} is not of full column rank")

    beta = scipy.linalg.solve_triangular(r, q.T @ y, lower=False)
    resid = y - x @ beta
    dof = n - p
    r_inv = scipy.linalg.solve_triangular(r, np.eye(p), lower=False)
    xtx_inv = r_inv @ r_inv.T
    if y.ndim == 1:
        s2 = float(resid @ resid) / dof
        cov = s2 * xtx_inv
    else:
        s2 = resid.T @ resid / dof
        # vec(B) ordered equation by equation
        cov = np.kron(s2, xtx_inv)
    return OlsFit(beta, resid, s2, cov, dof, xtx_inv)


def eigen_general(a) -> np.ndarray:
    """All (complex) eigenvalues of a real square matrix, unordered."""
    m = _square(a)
    try:
        return np.linalg.eigvals(m).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def eigen_symmetric_generalized(a, b):
    """Solve ``a v = lambda b v`` for symmetric ``a`` and positive definite ``b``.

    Returns eigenvalues sorted in descending order and the matching
    ``b``-orthonormal eigenvectors as columns.
    """
    a = _symmetric(a, "a")
    b = _symmetric(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    try:
        values, vectors = scipy.linalg.eigh(a, b)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("b is not positive definite") from exc
    order = np.argsort(values)[::-1]
    return values[order], vectors[:, order]


def cholesky_lower(sigma) -> np.ndarray:
    """Lower-triangular ``P`` with ``P @ P.T == sigma`` and positive diagonal."""
    s = _symmetric(sigma, "sigma")
    try:
        p = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("sigma is not positive definite") from exc
    if np.any(np.diag(p) <= 0):
        raise NotPositiveDefinite("sigma is not positive definite")
    return p


def _positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise InvalidDof(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def dist_sf(kind: str, x: float, *dof: float) -> float:
    """Upper-tail probability ``P(X > x)``.

    ``kind`` is one of ``chi_square`` (df), ``f`` (df1, df2), ``student_t`` (df)
    or ``standard_normal`` (no parameters).  Evaluated through the regularized
    incomplete gamma and beta functions.
    """
    x = float(x)
    if np.isnan(x):
        raise ValueError("x must not be NaN")
    if kind == "chi_square":
        if len(dof) != 1:
            raise InvalidDof("chi_square takes one dof parameter")
        k = _positive(dof[0], "df")
        if x <= 0:
            return 1.0
        return float(scipy.special.gammaincc(k / 2.0, x / 2.0))
    if kind == "f":
        if len(dof) != 2:
            raise InvalidDof("f takes two dof parameters")
        d1, d2 = _positive(dof[0], "df1"), _positive(dof[1], "df2")
        if x <= 0:
            return 1.0
        if np.isinf(x):
            return 0.0
        # P(F > x) = I_{d2/(d2 + d1 x)}(d2/2, d1/2)
        return float(scipy.special.betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))
    if kind == "student_t":
        if len(dof) != 1:
            raise InvalidDof("student_t takes one dof parameter")
        v = _positive(dof[0], "df")
        if np.isinf(x):
            return 0.0 if x > 0 else 1.0
        tail = 0.5 * float(scipy.special.betainc(v / 2.0, 0.5, v / (v + x * x)))
        return tail if x >= 0 else 1.0 - tail
    if kind == "standard_normal":
        if dof:
            raise InvalidDof("standard_normal takes no dof parameters")
        return float(0.5 * scipy.special.erfc(x / np.sqrt(2.0)))
    raise ValueError(f"unknown distribution kind {kind!r}")
