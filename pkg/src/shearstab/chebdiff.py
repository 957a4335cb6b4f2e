"""Chebyshev-Gauss-Lobatto collocation grids.

Nodes, differentiation matrices up to fourth order, and Clenshaw-Curtis
quadrature weights on [-1, 1].  Differentiation matrices are built with the
trigonometric-identity / flipping construction and the negative-sum trick for
the diagonal, which keeps the roundoff of high-order matrices well below the
naive (x_j - x_k) formulation.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

__all__ = [
    "ChebGrid",
    "build_grid",
    "dirichlet_reduce",
    "clamped_reduce",
    "N_MIN",
    "N_MAX",
]

N_MIN = 8
N_MAX = 2048


@dataclass(frozen=True)
class ChebGrid:
    """Degree-n collocation grid: n+1 nodes, descending from +1 to -1."""

    n: int
    nodes: np.ndarray    # shape (n+1,), nodes[0] = 1, nodes[n] = -1
    d1: np.ndarray       # first-derivative matrix, (n+1) x (n+1)
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    weights: np.ndarray  # Clenshaw-Curtis weights, sum = 2

    def __repr__(self) -> str:  # keep dataclass repr from dumping matrices
        return f"ChebGrid(n={self.n})"


def _chebdif(n_deg: int, m_max: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Nodes and derivative matrices D^1..D^m on the degree-n_deg CGL grid.

    The off-diagonal node differences are formed as
    2 sin((th_j+th_k)/2) sin((th_k-th_j)/2) and the lower half of the matrix
    is obtained by flipping the upper half, so that x_j - x_k never suffers
    cancellation near the boundary.  Diagonals come from the negative row-sum
    identity (each D annihilates constants exactly).
    """
    n = n_deg + 1
    k = np.arange(n)
    th = k * np.pi / n_deg
    # identical to cos(k pi / N) but symmetric about 0 to the last bit
    x = np.sin(np.pi * (n_deg - 2 * k) / (2 * n_deg))

    # dx[k, j] = x_k - x_j via cos a - cos b = -2 sin((a+b)/2) sin((a-b)/2);
    # the column-minus-row order of the second factor supplies that minus.
    T = np.tile(th / 2, (n, 1))
    dx = 2 * np.sin(T.T + T) * np.sin(T - T.T)
    n_half, n_ceil = n // 2, (n + 1) // 2
    dx = np.vstack((dx[:n_half], -np.flipud(np.fliplr(dx[:n_ceil]))))
    dx[k, k] = 1.0

    c = toeplitz((-1.0) ** k)
    c[0, :] *= 2.0
    c[-1, :] *= 2.0
    c[:, 0] *= 0.5
    c[:, -1] *= 0.5

    z = 1.0 / dx
    z[k, k] = 0.0

    d = np.eye(n)
    mats: list[np.ndarray] = []
    for ell in range(1, m_max + 1):
        d = ell * z * (c * np.tile(np.diag(d), (n, 1)).T - d)
        d[k, k] = -d.sum(axis=1)
        mats.append(d.copy())
    return x, mats


def _clencurt(n_deg: int) -> np.ndarray:
    """Clenshaw-Curtis weights for the degree-n_deg CGL nodes (sum = 2)."""
    th = np.pi * np.arange(n_deg + 1) / n_deg
    w = np.zeros(n_deg + 1)
    v = np.ones(n_deg - 1)
    th_i = th[1:-1]
    if n_deg % 2 == 0:
        w[0] = w[-1] = 1.0 / (n_deg**2 - 1)
        for kk in range(1, n_deg // 2):
            v -= 2.0 * np.cos(2 * kk * th_i) / (4 * kk**2 - 1)
        v -= np.cos(n_deg * th_i) / (n_deg**2 - 1)
    else:
        w[0] = w[-1] = 1.0 / n_deg**2
        for kk in range(1, (n_deg - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * kk * th_i) / (4 * kk**2 - 1)
    w[1:-1] = 2.0 * v / n_deg
    return w


_cache: dict[int, ChebGrid] = {}
_cache_lock = threading.Lock()


def build_grid(n: int) -> ChebGrid:
    """Return the (cached, immutable) degree-n grid.  Requires 8 <= n <= 2048."""
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"grid degree must be an integer, got {n!r}")
    n = int(n)
    if not N_MIN <= n <= N_MAX:
        raise ValueError(f"grid degree {n} outside [{N_MIN}, {N_MAX}]")
    with _cache_lock:
        grid = _cache.get(n)
        if grid is None:
            x, (d1, d2, d3, d4) = _chebdif(n, 4)
            w = _clencurt(n)
            for arr in (x, d1, d2, d3, d4, w):
                arr.setflags(write=False)
            grid = ChebGrid(n=n, nodes=x, d1=d1, d2=d2, d3=d3, d4=d4, weights=w)
            _cache[n] = grid
    return grid


def dirichlet_reduce(mat: np.ndarray) -> np.ndarray:
    """Drop first/last rows and columns: collocation on homogeneous Dirichlet data."""
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 3:
        raise ValueError(f"need a square matrix of size >= 3, got {mat.shape}")
    return mat[1:-1, 1:-1].copy()


def clamped_reduce(mat: np.ndarray, grid: ChebGrid) -> tuple[np.ndarray, np.ndarray]:
    """Border a full-grid operator with clamped boundary rows.

    Rows 0, 1, n-1, n are replaced by the functionals u(1), u'(1), u'(-1),
    u(-1); a solve against the bordered matrix must zero the right-hand side
    on those rows.  Returns (bordered matrix, boolean mask of boundary rows).
    """
    n = grid.n
    if mat.shape != (n + 1, n + 1):
        raise ValueError(f"matrix shape {mat.shape} does not match grid degree {n}")
    out = np.array(mat, dtype=complex, copy=True)
    mask = np.zeros(n + 1, dtype=bool)
    mask[[0, 1, n - 1, n]] = True
    out[0, :] = 0.0
    out[0, 0] = 1.0
    out[1, :] = grid.d1[0, :]
    out[n - 1, :] = grid.d1[n, :]
    out[n, :] = 0.0
    out[n, n] = 1.0
    return out, mask
