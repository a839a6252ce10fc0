import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blaschke_crit.equilibrium import (
    ChargeConfigurationInner,
    ChargeConfigurationOuter,
    SolveOptions,
    energy,
    energy_gradient,
    energy_hessian,
    extend_equilibrium,
    global_minimum_certificate,
    locate_anchor,
    outer_residual,
    residues_r,
    solve_inner_equilibrium,
    weight_polynomial_P,
    weights_s,
)
from blaschke_crit.errors import AnchorOutOfInterval, CoincidentCharges
from blaschke_crit.lame import lagrange_square_sum, relative_coefficient_deviation
from blaschke_crit.realpoly import RealPolynomial, lagrange_basis, poly_from_roots
from blaschke_crit.transforms import critical_points_from_halfplane

from conftest import random_cps

R3 = 1 / np.sqrt(3)


def cps_of(*zetas):
    return critical_points_from_halfplane(list(zetas))


def random_zetas(rng, count):
    return rng.uniform(-2, 2, count) + 1j * rng.uniform(0.1, 2, count)


@pytest.mark.parametrize("zetas, coeffs", [
    ([1j], [1, 0, 1]),
    ([1 + 2j], [5, -2, 1]),
    ([1j, 1 + 2j], np.convolve([1, 0, 1], [5, -2, 1])),
])
def test_weight_polynomial(zetas, coeffs):
    P = weight_polynomial_P(cps_of(*zetas))
    assert np.allclose(P.coeffs, coeffs, atol=1e-14)


def test_energy_examples():
    cps = cps_of(1j)
    assert energy([0.0], cps) == pytest.approx(0.0, abs=1e-15)
    assert energy([1.0], cps) == pytest.approx(np.log(2), abs=1e-15)
    cps2 = cps_of(1j, 2 + 1j)
    assert energy([0.3, -1.2], cps2) == pytest.approx(energy([-1.2, 0.3], cps2), abs=1e-14)
    with pytest.raises(CoincidentCharges):
        energy([0.5, 0.5], cps2)


def test_gradient_examples():
    cps = cps_of(1j)
    assert energy_gradient([0.0], cps) == pytest.approx([0.0], abs=1e-15)
    assert energy_gradient([1.0], cps) == pytest.approx([1.0], abs=1e-15)


def _fd_gradient(t, z, h):
    out = np.empty_like(t)
    for k in range(len(t)):
        e = np.zeros_like(t)
        e[k] = h
        out[k] = (energy(t + e, z) - energy(t - e, z)) / (2 * h)
    return out


def test_gradient_against_finite_differences(rng):
    for _ in range(20):
        z = random_zetas(rng, 3)
        t = np.sort(rng.uniform(-3, 3, 3))
        g = energy_gradient(t, z)
        fd = _fd_gradient(t, z, 1e-6 * (1 + np.max(np.abs(t))))
        assert np.max(np.abs(g - fd)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


def test_hessian_against_finite_differences(rng):
    z = random_zetas(rng, 4)
    t = np.sort(rng.uniform(-3, 3, 4))
    h = 1e-6
    H = energy_hessian(t, z)
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        col = (energy_gradient(t + e, z) - energy_gradient(t - e, z)) / (2 * h)
        assert np.max(np.abs(col - H[:, k])) <= 1e-5 * max(1.0, np.max(np.abs(H)))


def test_solve_examples():
    assert solve_inner_equilibrium(cps_of(1j)).t == pytest.approx([0.0], abs=1e-15)
    t = solve_inner_equilibrium(cps_of(1j, 1j)).t
    assert np.max(np.abs(t - [-R3, R3])) <= 1e-14
    # for n = 2 the charge sits directly below the critical point
    assert solve_inner_equilibrium(cps_of(2.5 + 0.3j)).t == pytest.approx([2.5], abs=1e-14)


def test_solve_random_instances(rng):
    for _ in range(5):
        z = random_zetas(rng, 5)
        cps = cps_of(*z)
        inner = solve_inner_equilibrium(cps)
        assert inner.grad_residual <= 1e-10
        assert np.all(np.diff(inner.t) > 0)
        assert global_minimum_certificate(inner.t, cps, n_samples=100, seed=1) >= -1e-12


def test_multistart_converges_to_same_configuration(rng):
    cps = cps_of(*random_zetas(rng, 4))
    ref = solve_inner_equilibrium(cps).t
    for _ in range(5):
        start = np.sort(rng.uniform(-5, 5, 4))
        t = solve_inner_equilibrium(cps, SolveOptions(initial=start)).t
        assert np.max(np.abs(t - ref)) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5), st.floats(-5, 5), st.integers(0, 2**32 - 1))
def test_translation_scale_equivariance(mu, d, seed):
    z = random_zetas(np.random.default_rng(seed), 3)
    t = solve_inner_equilibrium(cps_of(*z)).t
    t2 = solve_inner_equilibrium(cps_of(*(mu * z + d))).t
    assert np.max(np.abs(t2 - (mu * t + d))) <= 1e-9 * (1 + np.max(np.abs(t2)))


def test_extend_examples():
    cps = cps_of(1j)
    inner = solve_inner_equilibrium(cps)
    assert extend_equilibrium(inner, cps, 1, -1.0).x == pytest.approx([-1, 1], abs=1e-14)
    assert extend_equilibrium(inner, cps, 2, 1.0).x == pytest.approx([-1, 1], abs=1e-14)
    with pytest.raises(AnchorOutOfInterval):
        extend_equilibrium(inner, cps, 1, 0.5)
    with pytest.raises(AnchorOutOfInterval):
        extend_equilibrium(inner, cps, 3, 0.5)


def test_extend_middle_anchor_residual():
    cps = cps_of(1j, 1j)
    inner = solve_inner_equilibrium(cps)
    outer = extend_equilibrium(inner, cps, 2, 0.0)
    x, t = outer.x, inner.t
    assert x[0] < t[0] < 0 < t[1] < x[2]
    scale = np.max(np.abs(2 / (x[:, None] - cps.zeta[None, :])))
    assert np.max(np.abs(outer_residual(x, cps))) <= 1e-9 * scale


def test_locate_anchor():
    inner = ChargeConfigurationInner(np.array([-1.0, 1.0]))
    assert [locate_anchor(inner, v) for v in (-2, 0, 2)] == [1, 2, 3]
    with pytest.raises(AnchorOutOfInterval):
        locate_anchor(inner, 1.0)


def test_configuration_validation():
    with pytest.raises(ValueError):
        ChargeConfigurationInner(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        ChargeConfigurationOuter(np.array([-1.0, 1.0]), 1, -0.5)
    with pytest.raises(ValueError):
        ChargeConfigurationOuter(np.array([-1.0, 1.0]), 3, -1.0)


def test_residue_and_weight_examples():
    P = RealPolynomial([1, 0, 1])
    x = np.array([-1.0, 1.0])
    assert residues_r(x, P, 1.0) == pytest.approx([0.5, 0.5], abs=1e-15)
    assert residues_r(x, P, 2.0) == pytest.approx([1.0, 1.0], abs=1e-15)
    assert weights_s(np.array([0.0]), P, 1.0) == pytest.approx([1.0])
    assert weights_s(np.array([0.0]), P, 3.0) == pytest.approx([3.0])


def _weighted_square_sum(nodes, weights, extra=None):
    total = RealPolynomial([0.0]) if extra is None else extra
    for k, w in enumerate(weights):
        rest = poly_from_roots(np.delete(nodes, k))
        total = total + w * rest * rest
    return total


def test_s_identity_on_example_two():
    cps = cps_of(1j, 1j)
    t = np.array([-R3, R3])
    P = weight_polynomial_P(cps)
    S = poly_from_roots(t)
    rebuilt = _weighted_square_sum(t, weights_s(t, P, 1.0), S * S)
    assert relative_coefficient_deviation(rebuilt, P) <= 1e-10


def test_residue_identity_random(rng):
    cps = random_cps(rng, 2, 0.8)
    inner = solve_inner_equilibrium(cps)
    outer = extend_equilibrium(inner, cps, 2, 0.5 * (inner.t[0] + inner.t[1]))
    P = weight_polynomial_P(cps)
    r = residues_r(outer, P, 1.0)
    assert np.all(r > 0)
    assert relative_coefficient_deviation(_weighted_square_sum(outer.x, r), P) <= 1e-9


def test_outer_lagrange_identity(rng):
    for _ in range(5):
        cps = random_cps(rng, int(rng.integers(1, 6)), 0.8)
        inner = solve_inner_equilibrium(cps)
        outer = extend_equilibrium(inner, cps, 1, inner.t[0] - 0.7)
        P = weight_polynomial_P(cps)
        rebuilt = lagrange_square_sum(P(outer.x), lagrange_basis(outer.x))
        assert relative_coefficient_deviation(rebuilt, P) <= 1e-9


def _anchor_sweep(cps, k0, m=40):
    inner = solve_inner_equilibrium(cps)
    bounds = np.concatenate([[-np.inf], inner.t, [np.inf]])
    lo, hi = bounds[k0 - 1], bounds[k0]
    lo = hi - 10.0 if np.isinf(lo) else lo
    hi = lo + 10.0 if np.isinf(hi) else hi
    grid = lo + (hi - lo) * np.linspace(1e-6, 1 - 1e-6, m)
    return inner, np.array([extend_equilibrium(inner, cps, k0, a).x for a in grid])


def test_interlacing_and_monotone_dependence(rng):
    for _ in range(3):
        cps = random_cps(rng, 3, 0.8)
        for k0 in (1, 2, 4):
            inner, xs = _anchor_sweep(cps, k0)
            t = inner.t
            lower = np.concatenate([[-np.inf], t])
            upper = np.concatenate([t, [np.inf]])
            assert np.all((lower < xs) & (xs < upper))
            for k in range(xs.shape[1]):
                steps = np.diff(xs[:, k])
                assert np.all(steps > 0) or np.all(steps < 0)


def test_anchor_limits():
    cps = cps_of(1j, 2 + 1j, -1 + 0.5j)
    inner, xs = _anchor_sweep(cps, 2, m=3)
    t = inner.t
    gap = t[1] - t[0]
    # anchor just above t_1: x_k near t_{k-1}; anchor just below t_2: x_k near t_k
    assert np.max(np.abs(xs[0, 2:] - t[1:])) <= 1e-3 * gap
    assert np.max(np.abs(xs[-1, :2] - t[:2])) <= 1e-3 * gap
    assert xs[0, 0] < t[0] - 100 and xs[-1, 3] > t[2] + 100
