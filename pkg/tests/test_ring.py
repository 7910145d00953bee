"""Exact cosine-ring arithmetic against high-precision numeric oracles."""

import mpmath
import numpy as np
import pytest
import sympy

from conetypes import CosineRing, minpoly_2cos, new_params, reflection_rep, reflection_tensors

mpmath.mp.dps = 50


@pytest.mark.parametrize("k", range(2, 13))
def test_minpoly_vanishes_at_2cos(k):
    coeffs = minpoly_2cos(k)
    x = 2 * mpmath.cos(mpmath.pi / k)
    value = sum(c * x ** i for i, c in enumerate(coeffs))
    assert abs(value) < mpmath.mpf(10) ** -40
    assert coeffs[-1] == 1  # monic


@pytest.mark.parametrize("k", range(2, 13))
def test_minpoly_degree_matches_totient(k):
    # [2cos(pi/k)] generates the maximal real subfield of Q(zeta_2k)
    expected = 1 if k <= 2 else sympy.totient(2 * k) // 2
    assert len(minpoly_2cos(k)) - 1 == expected


@pytest.mark.parametrize("orders", [(4, 4, 4), (5, 7, 3), (7, 7, 7), (2, 5, 5), (6, 6, 2)])
def test_ring_dimension_and_unit(orders):
    ring = CosineRing(orders)
    # orders 2 and 3 contribute rational values, no ring extension
    degrees = [len(minpoly_2cos(k)) - 1 for k in sorted({o for o in orders if o >= 4})]
    assert ring.dim == int(np.prod(degrees)) if degrees else ring.dim == 1
    one = ring.one()
    assert ring.to_float(one) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("orders", [(4, 4, 4), (3, 5, 7), (2, 3, 7)])
def test_generator_matrices_match_numeric_value(orders):
    ring = CosineRing(orders)
    one = ring.one()
    for k in set(orders):
        g = one @ ring.mul_by_2cos(k)
        assert ring.to_float(g) == pytest.approx(2 * np.cos(np.pi / k), abs=1e-12)


@pytest.mark.parametrize("orders", [(4, 4, 4), (3, 5, 7), (2, 3, 7), (2, 6, 6)])
def test_ring_multiplication_matches_floats(orders):
    """Exact products agree with 50-digit numerics on random elements."""
    ring = CosineRing(orders)
    rng = np.random.default_rng(7)
    values = ring.basis_values()
    for _ in range(20):
        a = rng.integers(-5, 6, size=ring.dim)
        b = rng.integers(-5, 6, size=ring.dim)
        prod = ring.mul(a, b)
        fa = float(np.dot(a, values))
        fb = float(np.dot(b, values))
        assert float(np.dot(prod, values)) == pytest.approx(fa * fb, abs=1e-9, rel=1e-9)


@pytest.mark.parametrize("orders", [(4, 4, 4), (3, 5, 7), (2, 3, 7)])
def test_ring_axioms_exact(orders):
    ring = CosineRing(orders)
    rng = np.random.default_rng(11)
    for _ in range(10):
        a, b, c = (rng.integers(-4, 5, size=ring.dim) for _ in range(3))
        assert np.array_equal(ring.mul(a, b), ring.mul(b, a))
        assert np.array_equal(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)))
        assert np.array_equal(ring.mul(a, b + c), ring.mul(a, b) + ring.mul(a, c))
        assert np.array_equal(ring.mul(a, ring.one()), a)


@pytest.mark.parametrize("triple", [(4, 4, 4), (3, 5, 7), (2, 3, 7), (2, 5, 5)])
def test_reflection_tensors_match_float_representation(triple):
    """W[s,t] acts on coefficients exactly as sigma_s acts numerically."""
    params = new_params(*triple)
    orders = params.orders()
    ring = CosineRing(orders.values())
    W = reflection_tensors(orders, ring)
    rep = reflection_rep(params)
    values = ring.basis_values()

    # exact product sigma_s as coefficient tensors, compared entrywise
    ident = np.zeros((3, 3, ring.dim), dtype=np.int64)
    for i in range(3):
        ident[i, i] = ring.one()
    for s in range(3):
        out = np.empty_like(ident)
        for t in range(3):
            out[:, t, :] = ident[:, t, :] + ident[:, s, :] @ W[s, t]
        numeric = out @ values
        assert np.allclose(numeric, rep.sigma[s], atol=1e-10)


@pytest.mark.parametrize("triple", [(4, 4, 4), (3, 5, 7), (2, 3, 7)])
def test_reflection_orders_numeric(triple):
    params = new_params(*triple)
    rep = reflection_rep(params)
    orders = params.orders()
    for s in range(3):
        assert np.allclose(rep.sigma[s] @ rep.sigma[s], np.eye(3), atol=1e-10)
    for (s, t), k in orders.items():
        prod = rep.sigma[s] @ rep.sigma[t]
        power = np.linalg.matrix_power(prod, k)
        assert np.allclose(power, np.eye(3), atol=1e-8)
