"""Differentiation matrices, quadrature weights, and boundary reductions."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.linalg import eig

import shearstab as ss
from shearstab.chebdiff import clamped_reduce, dirichlet_reduce


def test_nodes_descend_from_one_to_minus_one(grid32):
    x = grid32.nodes
    assert x[0] == 1.0
    assert x[-1] == -1.0
    assert np.all(np.diff(x) < 0)
    assert len(x) == 33


def test_nodes_match_cosine_formula(grid32):
    k = np.arange(33)
    expected = np.cos(np.pi * k / 32)
    np.testing.assert_allclose(grid32.nodes, expected, atol=1e-15)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivative_matrices_exact_on_polynomials(order):
    grid = ss.build_grid(16)
    x = grid.nodes
    mats = {1: grid.d1, 2: grid.d2, 3: grid.d3, 4: grid.d4}
    for deg in range(0, 11):
        coeffs = np.zeros(deg + 1)
        coeffs[0] = 1.0
        poly = np.polynomial.polynomial.Polynomial(coeffs[::-1].copy())
        poly = np.polynomial.polynomial.Polynomial([0.0] * deg + [1.0])
        vals = poly(x)
        deriv = poly.deriv(order)(x)
        got = mats[order] @ vals
        assert np.max(np.abs(got - deriv)) < 1e-8 * max(1.0, np.max(np.abs(deriv)))


def test_second_derivative_matches_squared_first(grid32):
    err = np.max(np.abs(grid32.d2 - grid32.d1 @ grid32.d1))
    assert err < 1e-8


def test_derivative_of_exponential(grid32):
    x = grid32.nodes
    err = np.max(np.abs(grid32.d1 @ np.exp(x) - np.exp(x)))
    assert err < 1e-12


def test_weights_sum_to_interval_length(grid64):
    assert abs(np.sum(grid64.weights) - 2.0) < 1e-14


def test_weights_integrate_even_powers(grid64):
    x = grid64.nodes
    assert abs(np.sum(grid64.weights * x**2) - 2.0 / 3.0) < 1e-14
    assert abs(np.sum(grid64.weights * x**4) - 2.0 / 5.0) < 1e-14


def test_weights_integrate_exponential(grid64):
    x = grid64.nodes
    exact = math.e - 1.0 / math.e
    assert abs(np.sum(grid64.weights * np.exp(x)) - exact) < 1e-13


def test_dirichlet_laplacian_eigenvalues(grid64):
    # -u'' = lam u, u(+-1) = 0 has eigenvalues (k pi / 2)^2.
    interior = dirichlet_reduce(-grid64.d2)
    vals = np.sort(np.linalg.eigvals(interior).real)
    for k in range(1, 6):
        exact = (k * math.pi / 2.0) ** 2
        assert abs(vals[k - 1] - exact) < 1e-10 * exact


def test_clamped_reduce_rows(grid32):
    mat = np.random.default_rng(0).normal(size=(33, 33))
    bordered, bc_rows = clamped_reduce(mat, grid32)
    assert bordered.shape == (33, 33)
    assert bc_rows.dtype == bool
    assert list(np.flatnonzero(bc_rows)) == [0, 1, 31, 32]
    # Value rows pick out the wall samples, derivative rows the wall slopes.
    e_first = np.zeros(33)
    e_first[0] = 1.0
    e_last = np.zeros(33)
    e_last[-1] = 1.0
    np.testing.assert_array_equal(bordered[0].real, e_first)
    np.testing.assert_array_equal(bordered[-1].real, e_last)
    np.testing.assert_array_equal(bordered[1].real, grid32.d1[0])
    np.testing.assert_array_equal(bordered[-2].real, grid32.d1[-1])
    # Interior rows carry the original operator.
    np.testing.assert_array_equal(bordered[2:-2].real, mat[2:-2])


def test_clamped_beam_eigenvalue(grid64):
    # u'''' = lam u with u(+-1) = u'(+-1) = 0.  The exact eigenvalues are
    # k^4 where cos(2k) cosh(2k) = 1; the first root is found independently
    # by bisection and compared against the generalized eigenproblem of the
    # bordered matrix (mass matrix zero on constraint rows).
    k1 = brentq(lambda k: math.cos(2 * k) * math.cosh(2 * k) - 1.0, 2.0, 2.5, xtol=1e-14)
    exact = k1**4
    bordered, bc_rows = clamped_reduce(grid64.d4.astype(complex), grid64)
    mass = np.diag((~bc_rows).astype(float))
    vals = eig(bordered, mass, right=False)
    finite = vals[np.isfinite(vals)]
    finite = finite[np.abs(finite.imag) < 1e-6 * np.maximum(1.0, np.abs(finite.real))]
    smallest = np.min(finite.real[finite.real > 1.0])
    assert abs(smallest - exact) < 1e-8 * exact


def test_build_grid_caches(grid64):
    assert ss.build_grid(64) is grid64


def test_grid_arrays_are_read_only(grid64):
    for arr in (grid64.nodes, grid64.weights, grid64.d1, grid64.d2, grid64.d3, grid64.d4):
        assert not arr.flags.writeable


@pytest.mark.parametrize("bad", [7, 2049, 0, -4])
def test_build_grid_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        ss.build_grid(bad)


def test_dirichlet_reduce_strips_boundary(grid32):
    mat = np.arange(33.0 * 33.0).reshape(33, 33)
    inner = dirichlet_reduce(mat)
    assert inner.shape == (31, 31)
    np.testing.assert_array_equal(inner, mat[1:-1, 1:-1])
