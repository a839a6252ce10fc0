"""From equilibrium charges to a finite Blaschke product and back.

Two rational functions on the upper half-plane carry the solution:

    f(x) = -sum r_k / (x - x_k)             (B(1) = -1)
    g(x) = a x + b - sum s_k / (x - t_k)    (B(1) = +1)

and B = T^{-1} o h o T for h = f or g. Conjugating by T is done on
coefficients, so nothing is evaluated at the pole z = 1.
"""
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import (
    SolveOptions,
    extend_equilibrium,
    locate_anchor,
    residues_r,
    solve_inner_equilibrium,
    weight_polynomial_P,
    weights_s,
)
from .errors import WrongCriticalCount, ZeroOutsideDisc
from .realpoly import (
    RealPolynomial,
    aberth_roots,
    cayley_compose,
    EPS,
    cluster_roots,
)
from .transforms import DISC_MARGIN, CriticalPointSet, lift_critical_points


@dataclass(frozen=True)
class PartialFractionForm:
    """h(x) = a x + b - sum_k residues[k] / (x - poles[k])."""

    affine_a: float
    affine_b: float
    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        poles = np.asarray(self.poles, dtype=float)
        res = np.asarray(self.residues, dtype=float)
        if poles.shape != res.shape or poles.ndim != 1:
            raise ValueError("poles and residues must be aligned 1-d arrays")
        if poles.size > 1 and np.any(np.diff(poles) <= 0):
            raise ValueError("poles must be strictly increasing")
        if np.any(res <= 0):
            raise ValueError("residues must be positive")
        if self.affine_a < 0:
            raise ValueError("affine_a must be non-negative")
        if self.affine_a == 0 and (self.affine_b != 0 or poles.size == 0):
            raise ValueError("an f-form has no affine part and at least one pole")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", res)

    @property
    def kind(self):
        return "f" if self.affine_a == 0 else "g"

    @property
    def degree(self):
        """Degree n of the Blaschke product this form represents."""
        return len(self.poles) + (1 if self.kind == "g" else 0)

    def __call__(self, x):
        x = np.asarray(x)
        terms = self.residues / (x[..., None] - self.poles)
        return self.affine_a * x + self.affine_b - terms.sum(axis=-1)

    def derivative(self, x):
        x = np.asarray(x)
        terms = self.residues / (x[..., None] - self.poles) ** 2
        return self.affine_a + terms.sum(axis=-1)

    def numerator_denominator(self):
        """Real polynomials (p, q) with h = p / q and q monic."""
        q = np.array([1.0])
        for t in self.poles:
            q = np.convolve(q, [-t, 1.0])
        p = np.convolve(q, [self.affine_b, self.affine_a])
        for k, (t, r) in enumerate(zip(self.poles, self.residues)):
            rest = np.array([1.0])
            for j, tj in enumerate(self.poles):
                if j != k:
                    rest = np.convolve(rest, [-tj, 1.0])
            p[: len(rest)] -= r * rest
        return RealPolynomial(p), RealPolynomial(q)


@dataclass(frozen=True)
class BlaschkeProduct:
    """B(z) = constant * prod (z - a_k) / (1 - conj(a_k) z)."""

    zeros: np.ndarray
    constant: complex
    # optional absolute error estimate for each zero; used when locating
    # critical points, which can be far more sensitive than the zeros
    zero_uncertainty: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=complex)
        if self.zero_uncertainty is not None:
            object.__setattr__(self, "zero_uncertainty", np.asarray(self.zero_uncertainty, dtype=float))
        if np.any(np.abs(zeros) >= 1.0):
            raise ZeroOutsideDisc("Blaschke zeros must lie in the open disc")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "constant", complex(self.constant))

    @property
    def degree(self):
        return len(self.zeros)

    @property
    def numerator(self):
        out = np.array([self.constant])
        for a in self.zeros:
            out = np.convolve(out, [-a, 1.0])
        return out

    @property
    def denominator(self):
        out = np.array([1.0 + 0j])
        for a in self.zeros:
            out = np.convolve(out, [1.0, -np.conj(a)])
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant, dtype=complex)
        for a in self.zeros:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out[()] if out.ndim == 0 else out

    def derivative_numerator(self):
        """Coefficients of N' D - N D' (degree at most 2n - 2)."""
        num, den = self.numerator, self.denominator
        dnum = num[1:] * np.arange(1, len(num))
        dden = den[1:] * np.arange(1, len(den))
        out = np.zeros(2 * self.degree, dtype=complex)
        a = np.convolve(dnum, den)
        b = np.convolve(num, dden) if len(dden) else np.zeros(1, dtype=complex)
        out[: len(a)] += a
        out[: len(b)] -= b
        # the z^(2n-1) terms cancel identically
        return out[: 2 * self.degree - 1]


@dataclass(frozen=True)
class AnchorPlus:
    """Normalisation B(1) = 1, B(0) = 0 through the g-form."""


@dataclass(frozen=True)
class AnchorMinus:
    """Normalisation B(1) = -1 through the f-form with x_{k0} = anchor_x."""

    anchor_x: float


def assemble_g(inner, s, a=1.0, b=0.0):
    t = inner.t if hasattr(inner, "t") else np.asarray(inner, dtype=float)
    if a <= 0:
        raise ValueError("a must be positive")
    return PartialFractionForm(float(a), float(b), t, np.asarray(s, dtype=float))


def assemble_f(outer, r):
    x = outer.x if hasattr(outer, "x") else np.asarray(outer, dtype=float)
    return PartialFractionForm(0.0, 0.0, x, np.asarray(r, dtype=float))


def centred_g(inner, P):
    """The g-form with g(i) = i, so that the disc image satisfies B(0) = 0.

    The unit weights P(t_k)/prod(t_k - t_j)^2 fix g up to the affine
    parameters; g(i) = i then determines a > 0 and b uniquely.
    """
    unit = weights_s(inner, P, 1.0)
    g1 = 1j - np.sum(unit / (1j - inner.t))
    a = 1.0 / g1.imag
    b = -a * g1.real
    return assemble_g(inner, a * unit, a, b)


def _form_scale(h, w):
    """Sum of absolute term sizes of h at w (for rounding estimates)."""
    return (np.abs(h.affine_a * w) + abs(h.affine_b) + 1.0
            + np.sum(np.abs(h.residues / (np.asarray(w)[..., None] - h.poles)), axis=-1))


def _aberth_on_form(h, z, max_iter=200):
    """Aberth iteration for the zeros of (1 - z)^n (p - i q)(T(z)), p/q = h.

    Corrections use h in partial-fraction form, which stays accurate where
    the expanded polynomial does not. Returns approximations and inclusion radii.
    """
    z = np.array(z, dtype=complex)
    n = len(z)

    def parts(zi):
        w = 1j * (1 + zi) / (1 - zi)
        r = h(w) - 1j
        dlog = -n / (1 - zi) + (2j / (1 - zi) ** 2) * (
            np.sum(1.0 / (w - h.poles)) + h.derivative(w) / r
        ) if r != 0 else np.inf
        return r, 4.0 * EPS * (n + 1) * _form_scale(h, w), dlog

    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        for i in np.flatnonzero(active):
            r, noise, dlog = parts(z[i])
            if abs(r) <= noise or not np.isfinite(dlog) or dlog == 0:
                active[i] = False
                continue
            ratio = 1.0 / dlog
            s = np.sum(1.0 / (z[i] - np.delete(z, i)))
            step = ratio / (1.0 - ratio * s)
            z[i] -= step
            if abs(step) <= 4 * EPS * max(abs(z[i]), 1e-300):
                active[i] = False
    rad = np.empty(n)
    for i in range(n):
        r, noise, dlog = parts(z[i])
        if r == 0 or not np.isfinite(dlog) or dlog == 0:
            rad[i] = 4 * EPS
        else:
            rad[i] = n * (1.0 + noise / abs(r)) / abs(dlog)
    return z, rad


def halfplane_to_disc(h):
    """B = T^{-1} o h o T for an f-form (B(1) = -1) or g-form (B(1) = 1)."""
    p, q = h.numerator_denominator()
    n = h.degree
    pc = np.zeros(n + 1, dtype=complex)
    pc[: len(p.coeffs)] += p.coeffs
    pc[: len(q.coeffs)] -= 1j * q.coeffs
    num = cayley_compose(pc, n)
    if n == 0:
        raise ValueError("degree-0 form")
    seeds = aberth_roots(num)
    refined, rad = _aberth_on_form(h, seeds)
    # clusters only survive where B really has a multiple zero
    zeros, _ = cluster_roots(None, refined, radii=rad, overlap=True)
    if np.any(np.abs(zeros) >= 1.0 - DISC_MARGIN):
        raise ZeroOutsideDisc(f"extracted zero of modulus {np.max(np.abs(zeros)):.16f}")
    target = -1.0 if h.kind == "f" else 1.0
    const = target * np.prod((1 - np.conj(zeros)) / (1 - zeros))
    const /= abs(const)
    order = np.lexsort((zeros.imag, zeros.real))
    return BlaschkeProduct(zeros[order], const, _zero_errors(h, zeros[order]))


def _zero_errors(h, zeros):
    """First-order error of each zero from a relative perturbation of the form."""
    w = 1j * (1 + zeros) / (1 - zeros)
    scale = (np.abs(h.affine_a * w) + abs(h.affine_b)
             + np.sum(np.abs(h.residues / (w[:, None] - h.poles)), axis=1))
    dh = np.abs(h.derivative(w))
    with np.errstate(divide="ignore"):
        dw = _FORM_NOISE * scale / dh
    # dz/dw = 2i / (w + i)^2
    dz = dw * 2.0 / np.abs(w + 1j) ** 2
    return np.minimum(np.where(np.isfinite(dz), dz, 1e-6), 1e-6)


# relative accuracy assumed for half-plane data coming out of the equilibrium solve
_FORM_NOISE = 1e-13
# floor on the relative uncertainty of B'/B
_LOGD_FLOOR = 1e-13


def _distinct_zeros(zeros, tol=1e-12, errs=None):
    """Distinct zeros of B, their multiplicities and error estimates."""
    vals, mult, derr = [], [], []
    errs = np.full(len(zeros), 1e-15) if errs is None else errs
    for a, e in zip(zeros, errs):
        # a zero at rounding level is the origin; its reflection would sit near infinity
        if abs(a) <= tol:
            a = 0j
        for k, v in enumerate(vals):
            if abs(a - v) <= tol:
                mult[k] += 1
                derr[k] = max(derr[k], e)
                break
        else:
            vals.append(complex(a))
            mult.append(1)
            derr.append(e)
    return np.array(vals, dtype=complex), np.array(mult, dtype=float), np.array(derr)


def _noise_model(vals, mult, derr):
    """Absolute uncertainty of B'/B at z caused by errors in the zeros."""

    def noise(z):
        _, size = _log_derivative_k(vals, mult, z, 0)
        sens = 1.0 / np.abs(z - vals) ** 2 + 1.0 / np.abs(1.0 - np.conj(vals) * z) ** 2
        return _LOGD_FLOOR * size + float(np.sum(mult * derr * sens))

    return noise


def _log_derivative_k(vals, mult, z, k=0):
    """k-th derivative of B'/B and the sum of absolute term sizes.

    B'/B = sum m/(z - a) - sum m/(z - 1/conj(a)); a = 0 has no reflected pole.
    """
    sign_fact = (-1) ** k * float(np.prod(np.arange(1, k + 1)))
    t = mult * sign_fact / (z - vals) ** (k + 1)
    nz = vals != 0
    refl = 1.0 / np.conj(vals[nz])
    u = -mult[nz] * sign_fact / (z - refl) ** (k + 1)
    return t.sum() + u.sum(), np.abs(t).sum() + np.abs(u).sum()


def _reduced_numerator(vals, mult):
    """Coefficients of sum_k m_k (1-|a_k|^2) prod_{j!=k} (z-a_j)(1-conj(a_j) z)."""
    u = len(vals)
    out = np.zeros(max(2 * u - 1, 1), dtype=complex)
    for k in range(u):
        t = np.array([mult[k] * (1.0 - abs(vals[k]) ** 2)], dtype=complex)
        for j in range(u):
            if j != k:
                t = np.convolve(t, np.convolve([-vals[j], 1.0], [1.0, -np.conj(vals[j])]))
        out[: len(t)] += t
    return out


def _aberth_on_log_derivative(vals, mult, noise, z, max_iter=100):
    """Aberth iteration for the zeros of F = prod (z-a)(1-conj(a) z) * B'/B.

    Evaluating F'/F through the log-derivative avoids the cancellation in
    the expanded coefficients.
    """
    z = np.array(z, dtype=complex)
    m = len(z)
    nz = vals != 0

    def parts(zi):
        L, size = _log_derivative_k(vals, mult, zi, 0)
        dL, _ = _log_derivative_k(vals, mult, zi, 1)
        base = np.sum(1.0 / (zi - vals)) + np.sum(1.0 / (zi - 1.0 / np.conj(vals[nz])))
        return L, size, (base + dL / L) if L != 0 else np.inf

    active = np.ones(m, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        for i in np.flatnonzero(active):
            L, size, inv = parts(z[i])
            # stop inside the pseudo-zero set; final accuracy comes from the polish
            if abs(L) <= noise(z[i]) or not np.isfinite(inv) or inv == 0:
                active[i] = False
                continue
            ratio = 1.0 / inv
            s = np.sum(1.0 / (z[i] - np.delete(z, i)))
            step = ratio / (1.0 - ratio * s)
            cap = 0.5 * (1.0 + abs(z[i]))
            if abs(step) > cap:
                step *= cap / abs(step)
            z[i] -= step
            if abs(step) <= 4 * EPS * abs(z[i]):
                active[i] = False
    return z


def _polish_multiple(vals, mult, z, m, steps=8):
    """Newton on the (m-1)-th derivative of B'/B; its zero is simple at an m-fold point.

    With m = 1 this is plain Newton on B'/B.
    """
    best = z
    best_val = abs(_log_derivative_k(vals, mult, z, m - 1)[0])
    for _ in range(steps):
        g, _ = _log_derivative_k(vals, mult, z, m - 1)
        dg, _ = _log_derivative_k(vals, mult, z, m)
        if dg == 0:
            break
        z = z - g / dg
        val = abs(_log_derivative_k(vals, mult, z, m - 1)[0])
        if val < best_val:
            best, best_val = z, val
        else:
            break
    return best


def _multiple_point_test(vals, mult, noise, pts, K=2.0):
    """Centre of ``pts`` if they are consistent with one m-fold zero of B'/B, else None.

    The centre is polished on the (m-1)-th derivative and B'/B must vanish
    there to noise level. The points must lie
    within K times the radius at which an m-fold zero with Taylor
    coefficient L^(m)/m! is blurred by the evaluation noise.
    """
    m = len(pts)
    c = _polish_multiple(vals, mult, np.mean(pts), m)
    Lm, _ = _log_derivative_k(vals, mult, c, m)
    lead = abs(Lm) / float(np.prod(np.arange(1, m + 1)))
    if lead == 0 or not np.isfinite(lead):
        return None
    eta = noise(c)
    radius = (eta / lead) ** (1.0 / m)
    L0, _ = _log_derivative_k(vals, mult, c, 0)
    if abs(L0) > 10.0 * eta:
        return None
    if np.max(np.abs(pts - c)) <= K * radius:
        return c
    return None


def _merge_multiple(vals, mult, noise, z):
    """Group approximations that belong to multiple zeros; return [(centre, size)].

    Around every approximation the m nearest ones are tested as a single
    m-fold zero; passing groups are accepted largest first.
    """
    N = len(z)
    cands = []
    for i in range(N):
        order = np.argsort(np.abs(z - z[i]), kind="stable")
        for m in range(2, N + 1):
            group = order[:m]
            c = _multiple_point_test(vals, mult, noise, z[group])
            if c is not None:
                cands.append((m, i, tuple(sorted(group)), c))
    cands.sort(key=lambda t: (-t[0], t[1]))
    used = set()
    out = []
    for m, _, group, c in cands:
        if used.isdisjoint(group):
            used.update(group)
            out.append((c, m))
    for i in range(N):
        if i not in used:
            out.append((_polish_multiple(vals, mult, z[i], 1), 1))
    return out


def critical_points_of_blaschke(B):
    """The n - 1 critical points of B inside the disc, with multiplicity.

    A zero of B of multiplicity m is a critical point of multiplicity m - 1.
    The remaining ones are zeros of B'/B: they are seeded by a polynomial
    root finder, refined on the log-derivative, and clusters belonging to
    a multiple critical point are collapsed onto one well-conditioned value.
    """
    n = B.degree
    if n < 2:
        return np.zeros(0, dtype=complex)
    vals, mult, derr = _distinct_zeros(B.zeros, errs=B.zero_uncertainty)
    noise = _noise_model(vals, mult, derr)
    out = [v for v, m in zip(vals, mult) for _ in range(int(m) - 1)]
    coeffs = _reduced_numerator(vals, mult)
    scale = np.max(np.abs(coeffs))
    k = len(coeffs)
    # roots escaping to infinity are reflections of critical points at the origin
    while k > 1 and abs(coeffs[k - 1]) <= 1e-14 * scale:
        k -= 1
    coeffs = coeffs[:k]
    if k > 1:
        start = aberth_roots(coeffs)
        roots = _aberth_on_log_derivative(vals, mult, noise, start)
        # clusters never straddle the circle, so the inside ones are merged alone
        for c, m in _merge_multiple(vals, mult, noise, roots[np.abs(roots) < 1.0]):
            out.extend([c] * m)
    out = np.array(out, dtype=complex)
    if len(out) != n - 1:
        raise WrongCriticalCount(f"found {len(out)} critical points in the disc, expected {n - 1}")
    order = np.lexsort((out.imag, out.real))
    return out[order]


def hausdorff_distance(a, b):
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def matched_distance(a, b):
    """Largest distance under the best greedy matching of two equal-size multisets."""
    a = list(np.asarray(a, dtype=complex).ravel())
    b = list(np.asarray(b, dtype=complex).ravel())
    if len(a) != len(b):
        return np.inf
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(j)))
    return worst


@dataclass
class BlaschkeSolution:
    """Everything produced on the way from critical points to B."""

    cps: CriticalPointSet
    normalization: object
    P: RealPolynomial
    inner: object
    form: PartialFractionForm
    blaschke: BlaschkeProduct
    outer: object = None
    s: np.ndarray = field(default=None, repr=False)
    r: np.ndarray = field(default=None, repr=False)


def solve_pipeline(xs, normalization=None, opts=None):
    """Run the full construction and keep the intermediate objects."""
    normalization = normalization if normalization is not None else AnchorPlus()
    cps = xs if isinstance(xs, CriticalPointSet) else lift_critical_points(xs)
    P = weight_polynomial_P(cps)
    inner = solve_inner_equilibrium(cps, opts or SolveOptions())
    if isinstance(normalization, AnchorMinus):
        k0 = locate_anchor(inner, normalization.anchor_x)
        outer = extend_equilibrium(inner, cps, k0, normalization.anchor_x)
        r = residues_r(outer, P, 1.0)
        form = assemble_f(outer, r)
        B = halfplane_to_disc(form)
        return BlaschkeSolution(cps, normalization, P, inner, form, B, outer=outer, r=r)
    if not isinstance(normalization, AnchorPlus):
        raise TypeError(f"unknown normalization {normalization!r}")
    form = centred_g(inner, P)
    B = halfplane_to_disc(form)
    return BlaschkeSolution(cps, normalization, P, inner, form, B, s=form.residues)


def solve_blaschke(xs, normalization=None, opts=None):
    """Blaschke product of degree len(xs) + 1 with critical points ``xs``."""
    return solve_pipeline(xs, normalization, opts).blaschke
