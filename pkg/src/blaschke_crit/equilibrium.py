"""Electrostatic equilibrium of unit charges on the real line.

Fixed charges -1/2 sit at every lifted critical point zeta_j and at its
conjugate. The n - 1 movable charges t_k minimise the logarithmic energy

    W(t) = sum_{k,j} log|(t_k - zeta_j)(t_k - conj zeta_j)|
           - 2 sum_{k<j} log|t_j - t_k|,

which has a single critical point with t_1 < ... < t_{n-1}. The n-charge
configurations x interlacing t form a one-parameter family, obtained here
as level sets of g(x) = a x + b - sum_k s_k / (x - t_k).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import AnchorOutOfInterval, CoincidentCharges, NoConvergence
from .realpoly import RealPolynomial, bracketed_real_root, poly_from_roots
from .transforms import CriticalPointSet

_COINCIDENT = 1e-300
_EPS = np.finfo(float).eps


def _zeta(cps):
    if isinstance(cps, CriticalPointSet):
        return cps.zeta
    return np.atleast_1d(np.asarray(cps, dtype=complex))


@dataclass(frozen=True)
class ChargeConfigurationInner:
    t: np.ndarray
    iterations: int = 0
    grad_residual: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("inner charges must be strictly increasing")
        object.__setattr__(self, "t", t)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class ChargeConfigurationOuter:
    x: np.ndarray
    anchor_index: int
    anchor_value: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or np.any(np.diff(x) <= 0):
            raise ValueError("outer charges must be strictly increasing")
        if not 1 <= self.anchor_index <= len(x):
            raise ValueError("anchor_index out of range")
        if x[self.anchor_index - 1] != self.anchor_value:
            raise ValueError("anchor position does not hold the anchor value")
        object.__setattr__(self, "x", x)

    def __len__(self):
        return len(self.x)


@dataclass
class SolveOptions:
    """Knobs for :func:`solve_inner_equilibrium`.

    ``tol`` bounds the max-norm of the energy gradient; ``None`` means
    ``1e-11 * (1 + spread of Re zeta)``. ``initial`` optionally replaces
    the deterministic starting configuration.
    """

    tol: float = None
    max_iter: int = 200
    initial: np.ndarray = field(default=None, repr=False)


def weight_polynomial_P(cps):
    """Monic P(x) = prod (x - zeta_k)(x - conj zeta_k), positive on the line."""
    z = _zeta(cps)
    return poly_from_roots(np.concatenate([z, z.conj()]))


def _check_distinct(t):
    if t.size > 1:
        d = np.abs(t[:, None] - t[None, :])
        np.fill_diagonal(d, np.inf)
        if np.min(d) < _COINCIDENT:
            raise CoincidentCharges("two movable charges coincide")


def energy(t, cps):
    """Logarithmic energy W of the movable charges ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z = _zeta(cps)
    _check_distinct(t)
    fixed = np.sum(2.0 * np.log(np.abs(t[:, None] - z[None, :])))
    iu = np.triu_indices(len(t), 1)
    mutual = np.sum(np.log(np.abs(t[:, None] - t[None, :])[iu]))
    return float(fixed - 2.0 * mutual)


def _pair_inverse(t):
    d = t[:, None] - t[None, :]
    np.fill_diagonal(d, np.inf)
    return 1.0 / d


def energy_gradient(t, cps):
    """Partial derivatives of W; they vanish exactly at the equilibrium."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z = _zeta(cps)
    _check_distinct(t)
    fixed = 2.0 * np.sum((1.0 / (t[:, None] - z[None, :])).real, axis=1)
    return fixed - 2.0 * np.sum(_pair_inverse(t), axis=1)


def energy_hessian(t, cps):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z = _zeta(cps)
    inv = _pair_inverse(t)
    hess = -2.0 * inv**2
    diag = -2.0 * np.sum((1.0 / (t[:, None] - z[None, :]) ** 2).real, axis=1)
    diag += 2.0 * np.sum(inv**2, axis=1)
    hess[np.diag_indices_from(hess)] = diag
    return hess


def _initial_guess(z):
    re = np.sort(z.real)
    order = np.argsort(z.real)
    im = z.imag[order]
    span = re[-1] - re[0] if len(re) > 1 else 0.0
    span = span if span > 0 else 1.0
    t = re.copy()
    i = 0
    while i < len(re):
        j = i + 1
        while j < len(re) and re[j] - re[i] <= 1e-8 * span:
            j += 1
        m = j - i
        if m > 1:
            step = 0.1 + im[i:j].mean()
            t[i:j] = re[i] + (np.arange(m) - (m - 1) / 2.0) * step
        i = j
    t = np.sort(t)
    for k in range(1, len(t)):
        if t[k] <= t[k - 1]:
            t[k] = t[k - 1] + 1e-3
    return t


def _newton_minimize(t, z, target, max_iter):
    """Damped, shifted Newton iteration on W; returns (t, iterations)."""
    w = energy(t, z)
    g = energy_gradient(t, z)
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(g)) <= target:
            return t, it - 1
        hess = energy_hessian(t, z)
        shift = 0.0
        scale = max(1.0, np.max(np.abs(np.diag(hess))))
        while True:
            try:
                chol = np.linalg.cholesky(hess + shift * np.eye(len(t)))
                break
            except np.linalg.LinAlgError:
                shift = max(2.0 * shift, 1e-8 * scale)
        step = -np.linalg.solve(chol.T, np.linalg.solve(chol, g))
        if shift == 0.0 and np.max(np.abs(step)) <= 16 * _EPS * max(1.0, np.max(np.abs(t))):
            return t, it
        slope = float(g @ step)
        alpha = 1.0
        accepted = False
        while alpha > 1e-14:
            cand = t + alpha * step
            if np.all(np.diff(cand) > 0):
                wc = energy(cand, z)
                if wc <= w + 1e-4 * alpha * slope:
                    accepted = True
                    break
                # Near the minimum W is flat to rounding; fall back to the gradient.
                if shift == 0.0 and alpha == 1.0:
                    gc = energy_gradient(cand, z)
                    if np.max(np.abs(gc)) < np.max(np.abs(g)):
                        accepted = True
                        break
            alpha *= 0.5
        if not accepted:
            return t, it
        t = cand
        w = energy(t, z)
        g = energy_gradient(t, z)
    return t, it


def solve_inner_equilibrium(cps, opts=None):
    """Unique ordered solution t of the inner equilibrium equations.

    The lifted points are first normalised to zero mean and unit spread,
    which is harmless because the solution is equivariant under
    x -> mu x + d. The minimiser is a damped Newton method with a diagonal
    shift whenever the Hessian is not positive definite.
    """
    opts = opts or SolveOptions()
    z = _zeta(cps)
    centre = z.real.mean()
    spread = float(np.sqrt(np.mean(np.abs(z - centre) ** 2)))
    zn = (z - centre) / spread
    tol = opts.tol
    if tol is None:
        tol = 1e-11 * (1.0 + np.ptp(z.real))

    if opts.initial is not None:
        t0 = np.sort(np.asarray(opts.initial, dtype=float))
        t0 = (t0 - centre) / spread
        if len(t0) != len(z):
            raise ValueError("initial configuration has the wrong length")
        _check_distinct(t0)
    else:
        t0 = _initial_guess(zn)

    tn, iters = _newton_minimize(t0, zn, min(tol * spread, 1e-13), opts.max_iter)
    t = centre + spread * tn

    # polish in the original coordinates
    for _ in range(3):
        g = energy_gradient(t, z)
        if np.max(np.abs(g)) <= tol * 1e-2:
            break
        try:
            step = np.linalg.solve(energy_hessian(t, z), g)
        except np.linalg.LinAlgError:
            break
        cand = t - step
        if not np.all(np.diff(cand) > 0):
            break
        if np.max(np.abs(energy_gradient(cand, z))) >= np.max(np.abs(g)):
            break
        t = cand
        iters += 1
    res = float(np.max(np.abs(energy_gradient(t, z))))
    if not res <= tol or not np.all(np.diff(t) > 0):
        raise NoConvergence(
            f"gradient residual {res:.3e} above tolerance {tol:.3e} after {iters} steps"
        )
    return ChargeConfigurationInner(t, iterations=iters, grad_residual=res)


def outer_residual(x, cps):
    """Left-hand sides of the n-charge equilibrium equations at ``x``."""
    x = np.asarray(x, dtype=float)
    z = _zeta(cps)
    mutual = 2.0 * np.sum(_pair_inverse(x), axis=1)
    fixed = 2.0 * np.sum((1.0 / (x[:, None] - z[None, :])).real, axis=1)
    return mutual - fixed


def _prod_sq_gaps(nodes):
    d = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(d, 1.0)
    return np.prod(d**2, axis=1)


def weights_s(inner, P, a=1.0):
    """s_k = a P(t_k) / prod_{j != k} (t_k - t_j)^2."""
    if a <= 0:
        raise ValueError("a must be positive")
    t = inner.t if isinstance(inner, ChargeConfigurationInner) else np.asarray(inner, float)
    return a * P(t) / _prod_sq_gaps(t)


def residues_r(outer, P, c=1.0):
    """r_k = c P(x_k) / prod_{j != k} (x_k - x_j)^2."""
    if c <= 0:
        raise ValueError("c must be positive")
    x = outer.x if isinstance(outer, ChargeConfigurationOuter) else np.asarray(outer, float)
    return c * P(x) / _prod_sq_gaps(x)


def _level_function(t, s, a, b):
    def g(x):
        return a * x + b - np.sum(s / (x - t))

    def dg(x):
        return a + np.sum(s / (x - t) ** 2)

    return g, dg


def extend_equilibrium(inner, cps, k0, x_k0):
    """Complete an anchor x_{k0} to the full n-charge equilibrium.

    ``k0`` is 1-based; the anchor must lie in (t_{k0-1}, t_{k0}) with
    t_0 = -inf and t_n = +inf. Every other x_k is the unique solution of
    g(x) = g(x_{k0}) in its own interval, with a = 1, b = 0.
    """
    t = inner.t
    n = len(t) + 1
    if not 1 <= k0 <= n:
        raise AnchorOutOfInterval(f"anchor index {k0} not in 1..{n}")
    bounds = np.concatenate([[-np.inf], t, [np.inf]])
    x_k0 = float(x_k0)
    if not bounds[k0 - 1] < x_k0 < bounds[k0]:
        raise AnchorOutOfInterval(
            f"x_{k0} = {x_k0} not in ({bounds[k0 - 1]}, {bounds[k0]})"
        )
    P = weight_polynomial_P(cps)
    s = weights_s(inner, P, 1.0)
    g, dg = _level_function(t, s, 1.0, 0.0)
    level = g(x_k0)

    def h(x):
        return g(x) - level

    width = max(1.0, float(np.ptp(t)) if len(t) > 1 else 1.0, abs(x_k0))
    xs = np.empty(n)
    for k in range(1, n + 1):
        if k == k0:
            xs[k - 1] = x_k0
            continue
        lo, hi = bounds[k - 1], bounds[k]
        sign_lo = sign_hi = None
        if np.isinf(lo):
            step = width
            lo = hi - step
            while h(lo) >= 0:
                step *= 2.0
                lo = hi - step
        else:
            sign_lo = -1.0
        if np.isinf(hi):
            step = width
            hi = lo + step
            while h(hi) <= 0:
                step *= 2.0
                hi = lo + step
        else:
            sign_hi = 1.0
        xs[k - 1] = bracketed_real_root(h, lo, hi, dg, sign_lo=sign_lo, sign_hi=sign_hi,
                                        rtol=4e-16)
    return ChargeConfigurationOuter(xs, k0, x_k0)


def locate_anchor(inner, x_value):
    """1-based index k with t_{k-1} < x_value < t_k."""
    t = inner.t if isinstance(inner, ChargeConfigurationInner) else np.asarray(inner)
    if np.any(t == x_value):
        raise AnchorOutOfInterval(f"anchor {x_value} coincides with an inner charge")
    return int(np.searchsorted(t, x_value)) + 1


def global_minimum_certificate(t, cps, n_samples=100, seed=0):
    """Smallest ``W(perturbed) - W(t)`` over random ordered perturbations.

    Perturbations have magnitude up to the span of ``t`` (or 1) and keep the
    charges ordered; a non-negative result certifies ``t`` against them.
    """
    t = np.asarray(t, dtype=float)
    rng = np.random.default_rng(seed)
    w0 = energy(t, cps)
    span = float(np.ptp(t)) if len(t) > 1 else 1.0
    span = span if span > 0 else 1.0
    best = np.inf
    for _ in range(n_samples):
        mag = rng.uniform(0, span)
        cand = t + mag * rng.uniform(-1, 1, len(t))
        cand = np.sort(cand)
        if len(cand) > 1 and np.min(np.diff(cand)) <= 0:
            continue
        best = min(best, energy(cand, cps) - w0)
    return best
