"""Sphere-recursion eigenvalue, symmetrization, and the lower bound."""

import math

import numpy as np
import pytest

from conetypes import (
    ReducedAutomaton,
    ZeroPredecessor,
    lower_bound,
    perron,
    symmetrize,
    tilde_matrix,
)
from conftest import LOWER_BOUNDS, TABLE

TILDE_444 = np.array([
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 2.0],
    [0.0, 0.5, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
])


def test_tilde_matrix_444(data444):
    assert np.allclose(tilde_matrix(data444["reduced"]), TILDE_444, atol=0)


def test_tilde_matrix_requires_predecessors():
    ra = ReducedAutomaton(
        types=(0,), M=np.array([[2]]), d=np.array([3]), r=np.array([0]), p=1
    )
    with pytest.raises(ZeroPredecessor):
        tilde_matrix(ra)


def test_perron_scalar():
    val, vec, res = perron(np.array([[2.0]]))
    assert val == pytest.approx(2.0, abs=1e-14)
    assert vec == pytest.approx([1.0])
    assert res < 1e-12


def test_perron_matches_dense_eigensolver(data444):
    rng = np.random.default_rng(13)
    mats = [tilde_matrix(data444["reduced"]), rng.uniform(0.1, 2.0, (6, 6))]
    for mat in mats:
        val, vec, res = perron(mat)
        eigvals, eigvecs = np.linalg.eig(mat)
        k = int(np.argmax(eigvals.real))
        assert val == pytest.approx(float(eigvals[k].real), abs=1e-11)
        ref = np.abs(eigvecs[:, k].real)
        ref /= ref.sum()
        assert np.allclose(vec, ref, atol=1e-9)
        assert res < 1e-12
        assert (vec > 0).all()


def test_symmetrize_scale_invariant(data444):
    ra = data444["reduced"]
    val, A, _ = perron(tilde_matrix(ra))
    S1 = symmetrize(ra, A)
    S2 = symmetrize(ra, 7.5 * A)
    assert np.allclose(S1, S2, atol=1e-14)
    assert np.allclose(S1, S1.T, atol=0)


def test_jacobi_matches_eigvalsh(data444):
    from conetypes.lower import _jacobi_eigenvalues

    ra = data444["reduced"]
    _, A, _ = perron(tilde_matrix(ra))
    rng = np.random.default_rng(17)
    X = rng.normal(size=(7, 7))
    for S in [symmetrize(ra, A), 0.5 * (X + X.T)]:
        eigs, off = _jacobi_eigenvalues(S)
        assert off < 1e-12
        assert np.allclose(eigs, np.linalg.eigvalsh(S), atol=1e-11)
        assert eigs.sum() == pytest.approx(np.trace(S), abs=1e-11)


def test_tree_bound_is_exact(tree_reduced):
    # on the tree the comparison bound is tight: 2 sqrt 2 / 3
    res = lower_bound(tree_reduced)
    assert res.nu == pytest.approx(2.0, abs=1e-13)
    assert res.lam == pytest.approx(2.0, abs=1e-13)
    assert res.bound == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, abs=1e-12)


def test_all_groups_match_reference(graph_data):
    for triple in TABLE:
        res = lower_bound(graph_data[triple]["reduced"])
        assert res.bound == pytest.approx(LOWER_BOUNDS[triple], abs=1e-9), triple
        assert res.residual_nu < 1e-12
        assert res.jacobi_offnorm < 1e-12
        assert res.nu > 1.0  # exponential sphere growth
        assert (res.A > 0).all()
