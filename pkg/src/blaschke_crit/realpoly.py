"""Dense polynomials in the monomial basis, root finding and Lagrange bases.

Coefficient arrays are ascending: ``c[k]`` multiplies ``x**k``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLeadingCoefficient,
    NoSignChange,
    NodesTooClose,
    NotConjugateClosed,
)

EPS = np.finfo(float).eps


class RealPolynomial:
    """Real polynomial with ascending coefficients.

    Trailing zero coefficients are stripped on construction; the zero
    polynomial is stored as ``[0.0]``. Use :meth:`trim` to drop leading
    coefficients that are negligible rather than exactly zero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        self.coeffs = c

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def x(cls):
        return cls([0.0, 1.0])

    @property
    def degree(self):
        """Degree; -1 for the zero polynomial."""
        if self.is_zero():
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return float(self.coeffs[-1])

    def is_zero(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    def trim(self, rtol=1e-13):
        """Drop leading coefficients below ``rtol * max|c|``."""
        c = self.coeffs
        scale = np.max(np.abs(c))
        k = len(c)
        while k > 1 and abs(c[k - 1]) <= rtol * scale:
            k -= 1
        return RealPolynomial(c[:k])

    def __call__(self, x):
        return horner(self.coeffs, x)

    def deriv(self, m=1):
        p = self
        for _ in range(m):
            p = poly_derivative(p)
        return p

    def monic(self):
        return RealPolynomial(self.coeffs / self.coeffs[-1])

    def roots(self, **kw):
        return poly_complex_roots(self, **kw)

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs)))

    def _coerce(self, other):
        if isinstance(other, RealPolynomial):
            return other.coeffs
        return np.array([float(other)])

    def __add__(self, other):
        a, b = self.coeffs, self._coerce(other)
        n = max(len(a), len(b))
        out = np.zeros(n)
        out[: len(a)] += a
        out[: len(b)] += b
        return RealPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return RealPolynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-RealPolynomial(self._coerce(other)))

    def __rsub__(self, other):
        return RealPolynomial(self._coerce(other)) - self

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            return RealPolynomial(np.convolve(self.coeffs, other.coeffs))
        return RealPolynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RealPolynomial(self.coeffs / float(scalar))

    def __pow__(self, k):
        out = RealPolynomial([1.0])
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RealPolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"RealPolynomial({self.coeffs.tolist()!r})"


class FactoredRealPolynomial(RealPolynomial):
    """Monic real polynomial that remembers its roots.

    Evaluation uses the product form, which stays accurate near clustered or
    nearly real complex roots where the expanded coefficients cancel.
    Arithmetic returns plain :class:`RealPolynomial` objects.
    """

    __slots__ = ("factor_roots",)

    def __init__(self, coeffs, factor_roots):
        super().__init__(coeffs)
        self.factor_roots = np.asarray(factor_roots, dtype=complex)

    def __call__(self, x):
        x = np.asarray(x)
        out = np.ones(x.shape, dtype=complex)
        for r in self.factor_roots:
            out = out * (x - r)
        if np.isrealobj(x):
            out = out.real
        return out[()] if out.ndim == 0 else out


def as_coeffs(p):
    if isinstance(p, RealPolynomial):
        return p.coeffs
    return np.atleast_1d(np.asarray(p))


def horner(coeffs, x):
    """Evaluate ascending ``coeffs`` at scalar or array ``x``."""
    coeffs = np.asarray(coeffs)
    x = np.asarray(x)
    acc = np.zeros(np.broadcast(x).shape, dtype=np.result_type(coeffs, x, float))
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc[()] if acc.ndim == 0 else acc


def _horner_with_derivative(coeffs, x):
    p = np.zeros_like(x)
    dp = np.zeros_like(x)
    for c in coeffs[::-1]:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def poly_eval(p, x):
    """Value of ``p`` at ``x``: Horner, or the product form when ``p`` is factored."""
    if isinstance(p, FactoredRealPolynomial):
        return p(x)
    return horner(as_coeffs(p), x)


def poly_derivative(p):
    c = as_coeffs(p)
    if len(c) <= 1:
        return RealPolynomial([0.0])
    return RealPolynomial(c[1:] * np.arange(1, len(c)))


def poly_from_roots(roots, tol=1e-12):
    """Monic real polynomial with the given conjugate-closed root multiset."""
    roots = [complex(r) for r in roots]
    real_roots, upper, lower = [], [], []
    for r in roots:
        if abs(r.imag) <= tol * (1.0 + abs(r)):
            real_roots.append(r.real)
        elif r.imag > 0:
            upper.append(r)
        else:
            lower.append(r)
    if len(upper) != len(lower):
        raise NotConjugateClosed(f"{len(upper)} roots above the axis, {len(lower)} below")
    out = np.array([1.0])
    paired = list(real_roots)
    for r in real_roots:
        out = np.convolve(out, [-r, 1.0])
    for r in upper:
        dist = [abs(w - r.conjugate()) for w in lower]
        j = int(np.argmin(dist))
        if dist[j] > tol * (1.0 + abs(r)):
            raise NotConjugateClosed(f"no conjugate partner for {r}")
        w = lower.pop(j)
        z = 0.5 * (r + w.conjugate())
        out = np.convolve(out, [abs(z) ** 2, -2.0 * z.real, 1.0])
        paired.extend([z, z.conjugate()])
    return FactoredRealPolynomial(out, paired)


# --------------------------------------------------------------------------
# Aberth-Ehrlich simultaneous iteration


def _newton_polygon_start(c, rng):
    """Initial approximations on circles from the upper hull of log|c_k|."""
    n = len(c) - 1
    mags = np.abs(c)
    pts = [(k, np.log(mags[k])) for k in range(n + 1) if mags[k] > 0]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    z = []
    offset = rng.uniform(0, 2 * np.pi)
    for (i, yi), (j, yj) in zip(hull[:-1], hull[1:]):
        m = j - i
        radius = np.exp((yi - yj) / m)
        ang = offset + 2 * np.pi * np.arange(m) / m + rng.uniform(-0.3, 0.3, m) / m
        z.extend(radius * np.exp(1j * ang))
    return np.array(z, dtype=complex)


def aberth_roots(coeffs, max_iter=800, seed=0):
    """All roots of a complex polynomial by Aberth-Ehrlich iteration.

    Exact zero low-order coefficients are deflated as roots at 0. Each root
    gets one final Newton correction if that lowers its residual.
    """
    c = np.asarray(coeffs, dtype=complex).copy()
    nz = np.flatnonzero(c)
    if nz.size == 0 or nz[-1] == 0:
        raise DegenerateLeadingCoefficient("polynomial has degree < 1")
    c = c[: nz[-1] + 1]
    nzero = int(nz[0])
    c = c[nzero:]
    n = len(c) - 1
    zeros = [0j] * nzero
    if n == 0:
        return np.array(zeros, dtype=complex)
    if n == 1:
        return np.array(zeros + [-c[0] / c[1]], dtype=complex)

    rng = np.random.default_rng(seed)
    z = _newton_polygon_start(c, rng)
    absc = np.abs(c)
    mu = 4.0 * EPS * (n + 1)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        for i in idx:
            zi = z[i]
            p, dp = _horner_with_derivative(c, np.complex128(zi))
            if abs(p) <= mu * horner(absc, abs(zi)):
                active[i] = False
                continue
            if dp == 0:
                z[i] = zi + 1e-3 * (1 + abs(zi)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                continue
            ratio = p / dp
            others = np.delete(z, i)
            s = np.sum(1.0 / (zi - others))
            w = ratio / (1.0 - ratio * s)
            z[i] = zi - w
            if abs(w) <= EPS * abs(z[i]):
                active[i] = False

    for i in range(n):
        p, dp = _horner_with_derivative(c, np.complex128(z[i]))
        if dp != 0:
            cand = z[i] - p / dp
            if abs(horner(c, cand)) < abs(p):
                z[i] = cand
    return np.concatenate([np.array(zeros, dtype=complex), z])


def inclusion_radii(coeffs, roots):
    """Newton inclusion radii ``n (|p(z)| + rounding) / |p'(z)|`` per root.

    Rounding follows a normwise model (errors relative to max|c|). Roots
    outside the unit circle are measured through the reversed polynomial at
    1/z, which keeps the estimate honest for large roots.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    roots = np.asarray(roots, dtype=complex)
    rad = np.empty(len(roots))
    big = np.abs(roots) > 1.0
    for mask, cc, zz, back in (
        (~big, c, roots, None),
        (big, c[::-1], None, True),
    ):
        if not np.any(mask):
            continue
        z = roots[mask] if back is None else 1.0 / roots[mask]
        p, dp = _horner_with_derivative(cc, z.copy())
        noise = 4.0 * EPS * (n + 1) * np.max(np.abs(cc)) * horner(np.ones(n + 1), np.abs(z))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = n * (np.abs(p) + noise) / np.abs(dp)
        if back is not None:
            # |d(1/w)| = |dw| / |w|^2
            r = r / np.maximum(np.abs(z) ** 2 - r * np.abs(z), 1e-300)
            r = np.where(r > 0, r, np.inf)
        rad[mask] = r
    return np.where(np.isfinite(rad), rad, np.inf)


def cluster_roots(coeffs, roots, radii=None, overlap=False):
    """Merge roots lying within each other's inclusion discs and replace them by their mean.

    A cluster of ``m`` approximations to an ``m``-fold root is individually
    inaccurate, but its centroid is well conditioned. Returns the adjusted
    roots (same length, each cluster member set to the centroid) and the
    cluster label of every root.
    """
    roots = np.asarray(roots, dtype=complex)
    n = len(roots)
    if n == 0:
        return roots.copy(), np.zeros(0, dtype=int)
    rad = inclusion_radii(coeffs, roots) if radii is None else np.asarray(radii, dtype=float)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            # by default the smaller radius decides, so one loose estimate cannot
            # swallow its neighbours; ``overlap`` uses plain disc intersection
            reach = rad[i] + rad[j] if overlap else 2.0 * min(rad[i], rad[j])
            if abs(roots[i] - roots[j]) <= reach:
                parent[find(i)] = find(j)
    labels = np.array([find(i) for i in range(n)])
    out = roots.copy()
    for lab in np.unique(labels):
        members = labels == lab
        m = int(members.sum())
        if m > 1:
            centre = roots[members].mean()
            if coeffs is not None:
                centre = _polish_on_derivative(coeffs, centre, m - 1)
            out[members] = centre
    return out, labels


def _polish_on_derivative(coeffs, z, order, steps=4):
    # an m-fold root is a simple root of the (m-1)-th derivative
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(order):
        c = c[1:] * np.arange(1, len(c))
    if len(c) < 2:
        return z
    best, fbest = z, abs(horner(c, z))
    for _ in range(steps):
        p, dp = _horner_with_derivative(c, np.array(best, dtype=complex))
        if dp == 0:
            break
        cand = complex(best - p / dp)
        fc = abs(horner(c, cand))
        if not fc < fbest:
            break
        best, fbest = cand, fc
    return best


def _conjugate_symmetrize(roots, rad):
    roots = roots.copy()
    rad = np.where(np.isfinite(rad), rad, 0.0)
    # a huge radius (ill-conditioned root) must not pull a genuine pair onto the axis
    snap = np.minimum(rad, 1e-4 * (1.0 + np.abs(roots)))
    real = np.abs(roots.imag) <= np.maximum(snap, 8 * EPS * np.abs(roots))
    roots[real] = roots[real].real
    upper = [i for i in range(len(roots)) if not real[i] and roots[i].imag > 0]
    lower = [i for i in range(len(roots)) if not real[i] and roots[i].imag < 0]
    if len(upper) != len(lower):
        return roots
    for i in upper:
        j = min(lower, key=lambda k: abs(roots[k] - np.conj(roots[i])))
        lower.remove(j)
        avg = 0.5 * (roots[i] + np.conj(roots[j]))
        roots[i], roots[j] = avg, np.conj(avg)
    return roots


def poly_complex_roots(p, seed=0, cluster=False):
    """All complex roots of a real polynomial, with multiplicity.

    The output is conjugate symmetric and sorted by (real, imag). With
    ``cluster=True`` nearly coincident roots are replaced by their centroid.
    """
    c = as_coeffs(p).astype(float)
    nz = np.flatnonzero(c)
    if nz.size == 0 or nz[-1] < 1:
        raise DegenerateLeadingCoefficient("polynomial has degree < 1")
    c = c[: nz[-1] + 1]
    roots = aberth_roots(c, seed=seed)
    if cluster:
        roots, _ = cluster_roots(c, roots)
    roots = _conjugate_symmetrize(roots, inclusion_radii(c, roots))
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def real_roots(p, seed=0):
    """Real parts of the roots of ``p``; raises if any root is clearly complex."""
    roots = poly_complex_roots(p, seed=seed)
    c = as_coeffs(p)
    rad = inclusion_radii(c, roots)
    bad = np.abs(roots.imag) > np.maximum(1e-6 * (1 + np.abs(roots)), rad)
    if np.any(bad):
        raise DegenerateLeadingCoefficient(f"non-real roots {roots[bad]}")
    return np.sort(roots.real)


def newton_polish_real(p, x, steps=3):
    """A few guarded Newton steps on real roots of ``p``."""
    c = as_coeffs(p)
    dc = poly_derivative(p).coeffs
    x = np.array(x, dtype=float)
    for _ in range(steps):
        px = horner(c, x)
        dpx = horner(dc, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = x - px / dpx
        better = np.isfinite(cand) & (np.abs(horner(c, cand)) < np.abs(px))
        x = np.where(better, cand, x)
    return x


# --------------------------------------------------------------------------
# scalar root bracketing


def bracketed_real_root(fn, lo, hi, dfn=None, *, sign_lo=None, sign_hi=None,
                        rtol=1e-12, atol=0.0, max_iter=400):
    """Root of a monotone function on ``(lo, hi)``.

    ``sign_lo`` / ``sign_hi`` may replace the endpoint evaluations when an
    endpoint is a pole whose one-sided sign is known; the endpoints are then
    never evaluated. With ``dfn`` each step tries Newton and falls back to
    bisection whenever Newton would leave the bracket.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise NoSignChange(f"empty interval [{lo}, {hi}]")
    flo = None
    if sign_lo is None:
        flo = fn(lo)
        if flo == 0:
            return lo
        sign_lo = np.sign(flo)
    if sign_hi is None:
        fhi = fn(hi)
        if fhi == 0:
            return hi
        sign_hi = np.sign(fhi)
    if not np.isfinite(sign_lo) or not np.isfinite(sign_hi) or sign_lo * sign_hi >= 0:
        raise NoSignChange(f"no sign change on [{lo}, {hi}]")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = fn(x)
        if fx == 0:
            return x
        if np.sign(fx) == sign_lo:
            lo = x
        else:
            hi = x
        if hi - lo <= rtol * max(abs(lo), abs(hi)) + atol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        nxt = mid
        if dfn is not None:
            d = dfn(x)
            if d != 0 and np.isfinite(d):
                cand = x - fx / d
                if lo < cand < hi:
                    if abs(cand - x) <= rtol * abs(x) + atol:
                        return cand
                    nxt = cand
        if nxt == x:
            nxt = mid
        x = nxt
    # best point in the final bracket
    return x if lo <= x <= hi else 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Lagrange bases


@dataclass(frozen=True)
class LagrangeBasis:
    nodes: np.ndarray
    basis_polys: tuple

    def __len__(self):
        return len(self.nodes)

    @property
    def barycentric_weights(self):
        x = self.nodes
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        return 1.0 / np.prod(diff, axis=1)

    def evaluate(self, x):
        """Values of all basis polynomials at ``x`` (barycentric form).

        Returns an array of shape ``(len(nodes),) + shape(x)``.
        """
        x = np.asarray(x, dtype=float)
        nodes = self.nodes
        w = self.barycentric_weights
        flat = np.atleast_1d(x).ravel()
        out = np.empty((len(nodes), flat.size))
        for m, xv in enumerate(flat):
            d = xv - nodes
            hit = np.flatnonzero(d == 0)
            if hit.size:
                col = np.zeros(len(nodes))
                col[hit[0]] = 1.0
            else:
                terms = w / d
                col = terms / terms.sum()
            out[:, m] = col
        return out.reshape((len(nodes),) + x.shape)


def lagrange_basis(nodes):
    """Lagrange fundamental polynomials for strictly increasing ``nodes``."""
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise NodesTooClose("need at least one node")
    gaps = np.diff(x)
    span = x[-1] - x[0] if x.size > 1 else 1.0
    if np.any(gaps <= 1e-10 * span):
        raise NodesTooClose("nodes must be strictly increasing and separated")
    polys = []
    for k in range(len(x)):
        others = np.delete(x, k)
        num = np.array([1.0])
        for r in others:
            num = np.convolve(num, [-r, 1.0])
        polys.append(RealPolynomial(num / np.prod(x[k] - others)))
    return LagrangeBasis(x, tuple(polys))


# --------------------------------------------------------------------------
# composition with the Cayley transform


def cayley_compose(coeffs, degree):
    """Coefficients in z of ``(1 - z)**degree * p(T(z))``, T(z) = i(1+z)/(1-z).

    ``degree`` must be at least ``deg p``; the factor ``(1 - z)**degree``
    clears every denominator exactly, so nothing is evaluated near z = 1.
    """
    c = np.asarray(coeffs, dtype=complex)
    if len(c) - 1 > degree:
        raise ValueError("degree is smaller than the polynomial degree")
    one_plus = np.array([1.0, 1.0], dtype=complex)
    one_minus = np.array([1.0, -1.0], dtype=complex)
    plus_pows = [np.array([1.0 + 0j])]
    for _ in range(degree):
        plus_pows.append(np.convolve(plus_pows[-1], one_plus))
    minus_pows = [np.array([1.0 + 0j])]
    for _ in range(degree):
        minus_pows.append(np.convolve(minus_pows[-1], one_minus))
    out = np.zeros(degree + 1, dtype=complex)
    for k, ck in enumerate(c):
        if ck == 0:
            continue
        term = (1j ** k) * ck * np.convolve(plus_pows[k], minus_pows[degree - k])
        out[: len(term)] += term
    return out
