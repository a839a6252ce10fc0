"""Stieltjes polynomials Q, S and the Van Vleck polynomial R.

Both Q (roots x_k) and S (roots t_k) solve the Lame equation
P Y'' - P' Y' + R Y = 0 for one and the same R, so that every
lambda Q + mu S is a solution as well.
"""
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import PoleMismatch
from .realpoly import RealPolynomial, poly_complex_roots, poly_from_roots


@dataclass(frozen=True)
class StieltjesPair:
    Q: RealPolynomial
    S: RealPolynomial

    @classmethod
    def from_charges(cls, outer, inner):
        x = outer.x if hasattr(outer, "x") else np.asarray(outer, dtype=float)
        t = inner.t if hasattr(inner, "t") else np.asarray(inner, dtype=float)
        return cls(poly_from_roots(x), poly_from_roots(t))

    def interlaced(self, seed=0):
        """True when the real roots of Q and S strictly interlace."""
        x = np.sort(poly_complex_roots(self.Q, seed=seed).real)
        if self.S.degree < 1:
            return len(x) == 1
        t = np.sort(poly_complex_roots(self.S, seed=seed).real)
        if len(x) != len(t) + 1:
            return False
        return bool(np.all(x[:-1] < t) and np.all(t < x[1:]))


@dataclass(frozen=True)
class VanVleck:
    R: RealPolynomial


def van_vleck(Q, S):
    """R = S' Q'' - S'' Q'."""
    dS, dQ = S.deriv(), Q.deriv()
    return VanVleck(dS * Q.deriv(2) - S.deriv(2) * dQ)


def van_vleck_by_division(P, Y):
    """R from the exact division (P' Y' - P Y'') / Y; the remainder is returned too."""
    num = P.deriv() * Y.deriv() - P * Y.deriv(2)
    quo, rem = npoly.polydiv(num.coeffs, Y.coeffs)
    return RealPolynomial(quo), RealPolynomial(rem)


def wronskian_P(Q, S):
    """S Q' - S' Q; for a genuine Stieltjes pair this is the weight polynomial P."""
    return S * Q.deriv() - S.deriv() * Q


def lame_residual(P, R, Y):
    """The polynomial P Y'' - P' Y' + R Y."""
    if isinstance(R, VanVleck):
        R = R.R
    return P * Y.deriv(2) - P.deriv() * Y.deriv() + R * Y


def lame_relative_residual(P, R, Y):
    """Max coefficient of the Lame residual over the largest term's coefficient scale."""
    if isinstance(R, VanVleck):
        R = R.R
    terms = [P * Y.deriv(2), P.deriv() * Y.deriv(), R * Y]
    scale = max(t.max_abs() for t in terms)
    res = lame_residual(P, R, Y).max_abs()
    return res / scale if scale > 0 else res


def relative_coefficient_deviation(a, b):
    """max|a_k - b_k| / max(max|a_k|, max|b_k|)."""
    diff = (a - b).max_abs()
    scale = max(a.max_abs(), b.max_abs())
    return diff / scale if scale > 0 else diff


def check_identity_cS(Q, S, f, c=None):
    """Relative coefficient deviation of Q f + c S from zero.

    ``f`` is an f-form (poles = roots of Q). ``Q f`` is expanded as
    -sum_k r_k Q(x)/(x - x_k), each quotient built from the other poles
    (dividing the expanded Q is unstable for outlying roots). ``c``
    defaults to the residue sum.
    """
    poles = np.asarray(f.poles, dtype=float)
    roots = np.sort(poly_complex_roots(Q).real)
    scale = 1.0 + np.max(np.abs(poles))
    if len(roots) != len(poles) or np.max(np.abs(roots - poles)) > 1e-8 * scale:
        raise PoleMismatch("poles of f do not match the roots of Q")
    if c is None:
        c = float(np.sum(f.residues))
    qf = np.zeros(Q.degree)
    for k, r in enumerate(f.residues):
        qf -= r * Q.leading * poly_from_roots(np.delete(poles, k)).coeffs
    cs = c * S.coeffs
    n = max(len(qf), len(cs))
    total = np.zeros(n)
    total[: len(qf)] += qf
    total[: len(cs)] += cs
    scale = max(np.max(np.abs(cs)), np.max(np.abs(qf)))
    return float(np.max(np.abs(total)) / scale)


def lagrange_square_sum(values, basis, leading=None):
    """sum_k values[k] * basis_k^2 (+ leading^2 if given) as a polynomial."""
    out = RealPolynomial([0.0])
    for v, q in zip(values, basis.basis_polys):
        out = out + v * q * q
    if leading is not None:
        out = out + leading * leading
    return out
