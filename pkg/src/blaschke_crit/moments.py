"""Moment vectors, Hankel matrices and the Nesterov map.

The Nesterov map sends a moment vector c in the interior of the moment cone
to the positive polynomial whose coefficients are the anti-diagonal sums of
H(c)^{-1}. Its inverse is computed through the charge equilibrium: the lower
canonical representation of c is built from the equilibrium positions t_k
with weights 1/p(t_k).
"""
from dataclasses import dataclass

import numpy as np

from .equilibrium import SolveOptions, solve_inner_equilibrium, weight_polynomial_P
from .errors import (
    AnchorOnLowerRoot,
    HankelNotPositiveDefinite,
    NonPositiveWeight,
    SubHankelNotPositiveDefinite,
)
from .realpoly import RealPolynomial, newton_polish_real, real_roots

PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class MomentVector:
    """(c_0, ..., c_{2n-2}); odd length."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        if len(c) % 2 != 1:
            raise ValueError("a moment vector has odd length 2n - 1")
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return (len(self.c) + 1) // 2

    def is_interior(self):
        try:
            _cholesky(hankel(self.c))
        except HankelNotPositiveDefinite:
            return False
        return True

    def __len__(self):
        return len(self.c)


@dataclass(frozen=True)
class CanonicalRepresentation:
    """Atoms ``roots`` with ``weights`` plus a point mass at infinity."""

    roots: np.ndarray
    weights: np.ndarray
    mass_at_infinity: float = 0.0

    def moments(self, length):
        """First ``length`` power moments; the mass at infinity only enters the last."""
        x = np.asarray(self.roots, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        out = np.array([np.sum(w * x**j) for j in range(length)])
        out[-1] += self.mass_at_infinity
        return out


def _as_c(c):
    if isinstance(c, MomentVector):
        return c.c
    return MomentVector(c).c


def hankel(c):
    """n x n matrix with entry (i, j) = c_{i+j}."""
    c = _as_c(c)
    n = (len(c) + 1) // 2
    idx = np.add.outer(np.arange(n), np.arange(n))
    return c[idx]


def antidiagonal_sums(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("square matrix expected")
    n = X.shape[0]
    out = np.zeros(2 * n - 1)
    for i in range(n):
        out[i : i + n] += X[i]
    return out


def _cholesky(H, error=HankelNotPositiveDefinite):
    """Lower-triangular L with H = L L^T; small pivots signal a boundary point."""
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    scale = np.max(np.abs(np.diag(H))) if n else 1.0
    L = np.zeros_like(H)
    for j in range(n):
        d = H[j, j] - L[j, :j] @ L[j, :j]
        if not d > PIVOT_RTOL * scale:
            raise error(f"pivot {d:.3e} at step {j} (scale {scale:.3e})")
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (H[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def _spd_inverse(H):
    L = _cholesky(H)
    n = L.shape[0]
    Linv = np.zeros_like(L)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        for i in range(n):
            e[i] = (e[i] - L[i, :i] @ e[:i]) / L[i, i]
        Linv[:, j] = e
    inv = Linv.T @ Linv
    return 0.5 * (inv + inv.T)


def nesterov(c):
    """N(c): anti-diagonal sums of H(c)^{-1}, as a polynomial of degree 2n - 2."""
    return RealPolynomial(antidiagonal_sums(_spd_inverse(hankel(c))))


def bezoutian(Q, S):
    """Coefficient matrix of (Q(x) S(y) - S(x) Q(y)) / (x - y)."""
    n = Q.degree
    q = np.zeros(n + 1)
    s = np.zeros(n + 1)
    q[: len(Q.coeffs)] = Q.coeffs
    s[: len(S.coeffs)] = S.coeffs
    M = np.outer(q, s) - np.outer(s, q)
    B = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            B[i, j] = sum(M[i + 1 + k, j - k] for k in range(min(j, n - 1 - i) + 1))
    return B


def inverse_nesterov(cps, leading=1.0, opts=None):
    """Moment vector c with nesterov(c) = leading * P.

    The lower canonical representation of c sits at the equilibrium t_k
    with weights 1/p(t_k) and mass 1/leading at infinity.
    """
    if not leading > 0:
        raise ValueError("leading coefficient must be positive")
    P = weight_polynomial_P(cps)
    inner = solve_inner_equilibrium(cps, opts or SolveOptions())
    t = inner.t
    n = len(t) + 1
    sigma = 1.0 / (leading * np.array([P(x) for x in t]))
    rep = CanonicalRepresentation(t, sigma, 1.0 / leading)
    return MomentVector(rep.moments(2 * n - 1))


def _det_last_column(A):
    """Coefficients (ascending in x) of det[A | u(x)], u(x) = (1, x, ..., x^m)."""
    m = A.shape[0]
    out = np.zeros(m)
    for i in range(m):
        minor = np.delete(A, i, axis=0)
        out[i] = (-1) ** (i + m - 1) * (np.linalg.det(minor) if minor.size else 1.0)
    return out


def principal_root_poly_lower(c):
    """D_{n-1}: determinant of [c_{i+j} (j < n-1) | u(x)]; roots are the lower atoms."""
    c = _as_c(c)
    n = (len(c) + 1) // 2
    if n >= 2:
        _cholesky(hankel(c[: 2 * n - 3]), error=SubHankelNotPositiveDefinite)
    A = np.array([[c[i + j] for j in range(n - 1)] for i in range(n)]).reshape(n, n - 1)
    return RealPolynomial(_det_last_column(A))


def _moment_weights(nodes, moments, refine_upto, steps=2):
    """Weights w with sum_k w_k nodes_k^j = moments_j.

    The square system j < len(nodes) is solved by progressive elimination.
    Atoms far out on the line barely show in the low moments, so the result
    is then refined against all moments j < refine_upto that the
    representation must reproduce (row-equilibrated least squares).
    """
    w = solve_vandermonde(nodes, moments[: len(nodes)])
    if refine_upto <= len(nodes):
        return w
    V = vandermonde_matrix(nodes, refine_upto)
    rhs = np.asarray(moments[:refine_upto], dtype=float)
    rowscale = 1.0 / np.maximum(np.abs(V) @ np.abs(w), np.finfo(float).tiny)
    for _ in range(steps):
        r = rhs - V @ w
        dw = np.linalg.lstsq(V * rowscale[:, None], r * rowscale, rcond=None)[0]
        w = w + dw
    return w


def _check_weights(w):
    # tiny negative values are reported, never clamped
    bad = np.flatnonzero(~(w > 0))
    if bad.size:
        raise NonPositiveWeight(f"non-positive weight {w[bad[0]]:.3e} at atom {bad[0]}")


def _sorted_real_roots(poly, count):
    if count == 0:
        return np.zeros(0)
    x = real_roots(poly)
    x = np.array([newton_polish_real(poly, xi) for xi in x])
    if len(x) != count:
        raise NonPositiveWeight(f"expected {count} real atoms, found {len(x)}")
    return np.sort(x)


def canonical_lower(c):
    """Atoms t_k, weights sigma_k and the mass lambda at infinity."""
    c = _as_c(c)
    n = (len(c) + 1) // 2
    t = _sorted_real_roots(principal_root_poly_lower(c), n - 1)
    # the last moment also carries the mass at infinity
    sigma = _moment_weights(t, c, 2 * n - 2) if n > 1 else np.zeros(0)
    _check_weights(sigma)
    lam = c[-1] - np.sum(sigma * t ** (2 * n - 2))
    if not lam > 0:
        raise NonPositiveWeight(f"mass at infinity {lam:.3e} is not positive")
    return CanonicalRepresentation(t, sigma, float(lam))


def upper_root_poly(c, x_k0):
    """E_n: determinant of [c_{i+j} (j < n-1) | u(x_k0) | u(x)], rows i = 0..n."""
    c = _as_c(c)
    n = (len(c) + 1) // 2
    x_k0 = float(x_k0)
    D = principal_root_poly_lower(c)
    gap = np.abs(D(x_k0)) / max(np.sum(np.abs(D.coeffs) * abs(x_k0) ** np.arange(len(D.coeffs))), 1e-300)
    if gap <= 1e-12:
        raise AnchorOnLowerRoot(f"anchor {x_k0} is a lower atom")
    cols = [[c[i + j] for j in range(n - 1)] + [x_k0**i] for i in range(n + 1)]
    return RealPolynomial(_det_last_column(np.array(cols)))


def canonical_upper(c, x_k0):
    """n atoms including x_k0 and their weights; no mass at infinity."""
    c = _as_c(c)
    n = (len(c) + 1) // 2
    x = _sorted_real_roots(upper_root_poly(c, x_k0), n)
    # the anchor is a root by construction; keep it exact
    x[np.argmin(np.abs(x - x_k0))] = float(x_k0)
    x = np.sort(x)
    rho = _moment_weights(x, c, 2 * n - 1)
    _check_weights(rho)
    return CanonicalRepresentation(x, rho, 0.0)


def solve_vandermonde(nodes, rhs):
    """Solve sum_k w_k nodes_k^j = rhs_j (j = 0..m-1) by progressive elimination.

    O(m^2) elimination in the style of Bjorck and Pereyra; accurate for
    ordered real nodes where a dense solve loses digits.
    """
    a = np.asarray(nodes, dtype=float)
    b = np.array(rhs, dtype=float)
    n = len(a) - 1
    if n < 0:
        return b
    for k in range(n):
        for i in range(n, k, -1):
            b[i] -= a[k] * b[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            b[i] /= a[i] - a[i - k - 1]
        for i in range(k, n):
            b[i] -= b[i + 1]
    return b


def vandermonde_matrix(nodes, rows=None):
    """Columns u(x_k) = (1, x_k, ..., x_k^{rows-1})."""
    x = np.asarray(nodes, dtype=float)
    rows = len(x) if rows is None else rows
    return x[None, :] ** np.arange(rows)[:, None]


def vandermonde_factorization_check(c, rep):
    """max |H(c) - V D V^T| for an n-atom representation without mass at infinity."""
    H = hankel(c)
    V = vandermonde_matrix(rep.roots, H.shape[0])
    return float(np.max(np.abs(H - V @ np.diag(rep.weights) @ V.T)))
