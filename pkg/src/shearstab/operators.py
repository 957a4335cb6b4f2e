"""Discrete operators of the stability problem on collocation grids.

Five assemblers, all returning dense matrices with their boundary treatment:

* certificate operator  -u'' + [U''/(U - nu)] u        (Dirichlet, real)
* shifted inviscid      (U + i*lam)(-u'' + a^2 u) + U'' u   (Dirichlet)
* inviscid generator    H^-1 (U H + U''),  H = -d2 + a^2    (Dirichlet, real)
* advective Schrodinger -u'' + i*b*U u - b*lam u            (Dirichlet)
* Orr-Sommerfeld        (-d2 + i*b*(U+i*lam))(-d2 + a^2) + i*b*U''  (clamped)

The certificate potential U''/(U - nu) has a removable singularity at the
critical point; within a small window the quotient switches to its Taylor
form so that no digits are lost to 0/0 cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import inv

from .chebdiff import ChebGrid, clamped_reduce, dirichlet_reduce
from .profile import DomainError, Profile, x_of_nu

__all__ = [
    "SpectralParams",
    "AssembledOperator",
    "InflectionError",
    "grid_degree_for",
    "certificate_potential",
    "assemble_certificate_operator",
    "assemble_rayleigh_shifted",
    "assemble_rayleigh",
    "assemble_schrodinger",
    "assemble_orr_sommerfeld",
]


class InflectionError(ValueError):
    """Critical point is not an inflection: the potential is genuinely singular."""


@dataclass(frozen=True)
class SpectralParams:
    """Wavenumber alpha, rescaled Reynolds number beta, spectral shift lam."""

    alpha: float
    beta: float
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "lam", complex(self.lam))
        if not self.alpha >= 0.0:
            raise ValueError(f"wavenumber must be >= 0, got {self.alpha}")
        if not self.beta >= 0.0:
            raise ValueError(f"rescaled Reynolds number must be >= 0, got {self.beta}")

    @property
    def mu(self) -> float:
        return self.lam.real

    @property
    def nu(self) -> float:
        return self.lam.imag

    @property
    def reynolds(self) -> float:
        if self.alpha == 0.0:
            raise ValueError("Reynolds number undefined at zero wavenumber")
        return self.beta / self.alpha


@dataclass(frozen=True)
class AssembledOperator:
    """Dense operator matrix plus the data spectral routines need."""

    matrix: np.ndarray
    kind: str           # certificate | rayleigh_shifted | rayleigh | schrodinger | orr_sommerfeld
    bc: str             # dirichlet | clamped
    grid: ChebGrid
    bc_rows: np.ndarray | None = None   # mask of bordered rows (clamped only)
    params: SpectralParams | None = None

    def __repr__(self) -> str:
        return (
            f"AssembledOperator(kind={self.kind!r}, bc={self.bc!r}, "
            f"n={self.grid.n}, shape={self.matrix.shape})"
        )


def grid_degree_for(beta: float, floor: int = 64, cap: int = 2048) -> int:
    """Resolution rule of thumb: boundary layers of width beta^(-1/3) need
    a handful of nodes, and Chebyshev clustering gives ~n^2 wall density."""
    n = max(floor, math.ceil(8.0 * float(beta) ** (1.0 / 3.0)))
    return min(n, cap)


def certificate_potential(
    profile: Profile,
    nu: float,
    x: np.ndarray,
    singular_window: float = 1e-4,
    inflection_tol: float = 1e-8,
) -> np.ndarray:
    """U''/(U - nu) with the removable singularity filled by its Taylor form.

    Within |x - x_nu| <= singular_window the quotient is evaluated as
    U'''/U' + (x - x_nu) * [U''''/(2 U') - U''' U''/(2 U'^2)] at the critical
    point, the first two terms of the expansion that survives U''(x_nu) = 0.
    """
    nu = float(nu)
    xc = x_of_nu(profile, nu)
    u1c = profile.deriv(xc, 1)
    u2c = profile.deriv(xc, 2)
    u3c = profile.deriv(xc, 3)
    u4c = profile.deriv(xc, 4)
    scale = max(1.0, abs(float(np.max(np.abs(profile.deriv(x, 2))))))
    if abs(u2c) > inflection_tol * scale:
        raise InflectionError(
            f"velocity {nu}: curvature {u2c:.3e} at critical point x={xc:.6f} "
            "does not vanish"
        )
    x = np.asarray(x, dtype=float)
    u = profile.u(x)
    u2 = profile.deriv(x, 2)
    near = np.abs(x - xc) <= singular_window
    den = u - nu
    den_safe = np.where(near, 1.0, den)
    q = np.where(near, 0.0, u2 / den_safe)
    if np.any(near):
        taylor = u3c / u1c + (x - xc) * (
            u4c / (2.0 * u1c) - u3c * u2c / (2.0 * u1c**2)
        )
        q = np.where(near, taylor, q)
    return q


def assemble_certificate_operator(
    profile: Profile,
    nu: float,
    grid: ChebGrid,
    singular_window: float = 1e-4,
) -> AssembledOperator:
    """-d2 + diag(U''/(U - nu)) on interior nodes, homogeneous Dirichlet."""
    xi = grid.nodes[1:-1]
    q = certificate_potential(profile, nu, xi, singular_window=singular_window)
    mat = -dirichlet_reduce(grid.d2) + np.diag(q)
    return AssembledOperator(matrix=mat, kind="certificate", bc="dirichlet", grid=grid)


def assemble_rayleigh_shifted(
    profile: Profile,
    params: SpectralParams,
    grid: ChebGrid,
) -> AssembledOperator:
    """(U + i*lam)(-d2 + a^2) + U'' on interior nodes (Dirichlet)."""
    xi = grid.nodes[1:-1]
    h = -dirichlet_reduce(grid.d2) + params.alpha**2 * np.eye(grid.n - 1)
    mat = np.diag(profile.u(xi) + 1j * params.lam) @ h + np.diag(
        profile.deriv(xi, 2)
    ).astype(complex)
    return AssembledOperator(
        matrix=mat, kind="rayleigh_shifted", bc="dirichlet", grid=grid, params=params
    )


def assemble_rayleigh(
    profile: Profile,
    alpha: float,
    grid: ChebGrid,
) -> AssembledOperator:
    """H^-1 (diag(U) H + diag(U'')), H the Dirichlet Helmholtz operator.

    The explicit dense inverse is deliberate: at these sizes it is cheap and
    the spectrum of the product is exactly what the inviscid evolution
    generator's definition prescribes.
    """
    alpha = float(alpha)
    if not alpha > 0.0:
        raise ValueError(f"wavenumber must be positive, got {alpha}")
    xi = grid.nodes[1:-1]
    h = -dirichlet_reduce(grid.d2) + alpha**2 * np.eye(grid.n - 1)
    a = np.diag(profile.u(xi)) @ h + np.diag(profile.deriv(xi, 2))
    mat = inv(h) @ a
    return AssembledOperator(matrix=mat, kind="rayleigh", bc="dirichlet", grid=grid)


def assemble_schrodinger(
    profile: Profile,
    params: SpectralParams,
    grid: ChebGrid,
) -> AssembledOperator:
    """-d2 + i*beta*diag(U) - beta*lam on interior nodes (Dirichlet)."""
    xi = grid.nodes[1:-1]
    mat = (
        -dirichlet_reduce(grid.d2).astype(complex)
        + np.diag(1j * params.beta * profile.u(xi))
        - params.beta * params.lam * np.eye(grid.n - 1)
    )
    return AssembledOperator(
        matrix=mat, kind="schrodinger", bc="dirichlet", grid=grid, params=params
    )


def assemble_orr_sommerfeld(
    profile: Profile,
    params: SpectralParams,
    grid: ChebGrid,
) -> AssembledOperator:
    """(-d2 + i*b*(U + i*lam)) (-d2 + a^2) + i*b*U'', clamped bordering.

    The wavenumber enters only through alpha^2, so the assembled matrix is
    bit-for-bit identical under alpha -> -alpha.
    """
    if not params.beta > 0.0:
        raise ValueError("fourth-order operator needs beta > 0")
    x = grid.nodes
    n1 = grid.n + 1
    helm = -grid.d2 + (params.alpha * params.alpha) * np.eye(n1)
    adv = -grid.d2 + np.diag(1j * params.beta * (profile.u(x) + 1j * params.lam))
    full = adv.astype(complex) @ helm + np.diag(1j * params.beta * profile.deriv(x, 2))
    mat, mask = clamped_reduce(full, grid)
    return AssembledOperator(
        matrix=mat,
        kind="orr_sommerfeld",
        bc="clamped",
        grid=grid,
        bc_rows=mask,
        params=params,
    )
