"""Dense spectral computations: eigenvalues, resolvent norms, grid ladders.

Norms are the continuum L2 norms realized through Clenshaw-Curtis quadrature:
a matrix M acting between node-value spaces is measured as
``diag(sqrt(w_out)) M diag(1/sqrt(w_in))`` in the spectral norm, so reported
operator norms converge to their integral counterparts as the grid grows.

Every quantity of interest is wrapped in a ladder that doubles the grid
degree until the value settles, so callers receive a converged number plus
the resolution that produced it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvals, inv, svdvals

from .chebdiff import build_grid
from .operators import (
    AssembledOperator,
    SpectralParams,
    assemble_certificate_operator,
    assemble_orr_sommerfeld,
    assemble_rayleigh_shifted,
    assemble_schrodinger,
)
from .profile import Profile

__all__ = [
    "weighted_norm",
    "eigenvalues",
    "min_eig_selfadjoint",
    "ResolventSample",
    "resolvent_numbers",
    "resolvent_sample",
    "eig_floor_ladder",
    "PseudospectrumGrid",
    "pseudospectrum_grid",
    "thread_count",
]

# sigma_min below this multiple of sigma_max means the shift sits on the
# discrete spectrum and the resolvent number is noise
_SINGULAR_RTOL = 1e3 * np.finfo(float).eps
# solve norms beyond this are treated as a resonance hit (clamped systems)
_SOLVE_NORM_CAP = 1e12


def thread_count(explicit: int | None = None) -> int:
    if explicit is not None:
        if explicit < 1:
            raise ValueError(f"thread count must be positive, got {explicit}")
        return int(explicit)
    env = os.environ.get("SHEARSTAB_THREADS", "").strip()
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"SHEARSTAB_THREADS must be positive, got {env}")
        return value
    return min(4, os.cpu_count() or 1)


def weighted_norm(grid, values) -> float:
    """Quadrature L2 norm of node samples: sqrt(sum w_j |v_j|^2)."""
    values = np.asarray(values)
    return float(np.sqrt(np.sum(grid.weights * np.abs(values) ** 2)))


def eigenvalues(op: AssembledOperator) -> np.ndarray:
    """All eigenvalues of the assembled matrix, sorted by (real, imag)."""
    return np.sort_complex(eigvals(op.matrix))


def min_eig_selfadjoint(op: AssembledOperator) -> float:
    """Smallest eigenvalue of an operator that is self-adjoint in L2.

    The matrix is conjugated by the square-root quadrature weights first;
    that leaves the spectrum untouched but tames the non-normality of the
    collocation discretization.  A complex eigenvalue beyond rounding noise
    means the operator was not self-adjoint and is reported loudly.
    """
    if op.bc != "dirichlet":
        raise ValueError(f"expected a Dirichlet operator, got bc={op.bc!r}")
    ws = np.sqrt(op.grid.weights[1:-1])
    sim = (ws[:, None] * op.matrix) / ws[None, :]
    vals = eigvals(sim)
    scale = max(1.0, float(np.max(np.abs(vals))))
    worst_imag = float(np.max(np.abs(vals.imag)))
    if worst_imag > 1e-9 * scale:
        raise RuntimeError(
            f"spectrum is not real: max |imag| = {worst_imag:.3e} at scale {scale:.3e}"
        )
    return float(np.min(vals.real))


@dataclass(frozen=True)
class ResolventSample:
    """Resolvent norms of one operator at one shift, with ladder metadata.

    norm_inv is the L2 -> L2 norm of the solve; norm_d_inv additionally
    differentiates the solution, measuring data -> d(solution)/dx.
    """

    kind: str
    alpha: float
    beta: float
    lam: complex
    n_start: int
    n_used: int
    converged: bool
    singular: bool
    sigma_min: float
    norm_inv: float
    norm_d_inv: float

    @property
    def combined(self) -> float:
        return self.norm_inv + self.norm_d_inv


def _dirichlet_numbers(op: AssembledOperator) -> dict:
    w_full = op.grid.weights
    ws_int = np.sqrt(w_full[1:-1])
    ws_out = np.sqrt(w_full)
    sim = (ws_int[:, None] * op.matrix) / ws_int[None, :]
    svals = svdvals(sim)
    sigma_min = float(svals[-1])
    singular = sigma_min < _SINGULAR_RTOL * float(svals[0])
    if singular or sigma_min == 0.0:
        return {
            "sigma_min": sigma_min,
            "singular": True,
            "norm_inv": math.inf,
            "norm_d_inv": math.inf,
        }
    minv = inv(op.matrix)
    norm_inv = 1.0 / sigma_min
    dsol = op.grid.d1[:, 1:-1] @ minv
    sim_d = (ws_out[:, None] * dsol) / ws_int[None, :]
    norm_d_inv = float(svdvals(sim_d)[0])
    return {
        "sigma_min": sigma_min,
        "singular": False,
        "norm_inv": norm_inv,
        "norm_d_inv": norm_d_inv,
    }


def _clamped_numbers(op: AssembledOperator) -> dict:
    # The bordered fourth-order matrix mixes unit-scale constraint rows with
    # differentiated rows of order n^8, so its raw singular values say
    # nothing about resonance.  Judge singularity from the weighted solution
    # operator itself: a shift sitting on the spectrum surfaces as an absurd
    # solve norm (or an outright factorization failure).
    #
    # Rows must be equilibrated before inversion.  Without it the inverse
    # carries absolute noise from the huge fourth-derivative rows, and the
    # extra differentiation in norm_d_inv amplifies that noise by n^2 --
    # enough to stall ladder convergence past n ~ 800.  Scaling row j by
    # 1/max|row j| restores componentwise accuracy; the solution operator is
    # unchanged because data columns are rescaled back afterwards.
    keep = ~op.bc_rows
    w_full = op.grid.weights
    ws_out = np.sqrt(w_full)
    ws_in = np.sqrt(w_full[keep])
    row_scale = np.max(np.abs(op.matrix), axis=1)
    if not np.all(row_scale > 0.0):
        return {
            "sigma_min": 0.0,
            "singular": True,
            "norm_inv": math.inf,
            "norm_d_inv": math.inf,
        }
    d = 1.0 / row_scale
    try:
        sol = inv(d[:, None] * op.matrix)[:, keep] * d[keep][None, :]
    except np.linalg.LinAlgError:
        return {
            "sigma_min": 0.0,
            "singular": True,
            "norm_inv": math.inf,
            "norm_d_inv": math.inf,
        }
    sim = (ws_out[:, None] * sol) / ws_in[None, :]
    norm_inv = float(svdvals(sim)[0])
    dsol = op.grid.d1 @ sol
    sim_d = (ws_out[:, None] * dsol) / ws_in[None, :]
    norm_d_inv = float(svdvals(sim_d)[0])
    bad = (
        not math.isfinite(norm_inv)
        or not math.isfinite(norm_d_inv)
        or norm_inv > _SOLVE_NORM_CAP
    )
    return {
        "sigma_min": 1.0 / norm_inv if norm_inv > 0.0 else math.inf,
        "singular": bad,
        "norm_inv": norm_inv,
        "norm_d_inv": norm_d_inv,
    }


def resolvent_numbers(op: AssembledOperator) -> dict:
    """Raw resolvent norms of one assembled operator (no ladder)."""
    if op.bc == "dirichlet":
        return _dirichlet_numbers(op)
    if op.bc == "clamped":
        return _clamped_numbers(op)
    raise ValueError(f"unknown boundary treatment {op.bc!r}")


_ASSEMBLERS = {
    "schrodinger": assemble_schrodinger,
    "rayleigh_shifted": assemble_rayleigh_shifted,
    "orr_sommerfeld": assemble_orr_sommerfeld,
}


def ladder_start(beta: float, floor: int = 64) -> int:
    """Initial grid degree: one doubling brings it to ~8 beta^(1/3)."""
    return max(floor, math.ceil(4.0 * float(beta) ** (1.0 / 3.0)))


def resolvent_sample(
    profile: Profile,
    params: SpectralParams,
    kind: str,
    n0: int | None = None,
    rel_tol: float = 1e-3,
    n_cap: int = 2048,
) -> ResolventSample:
    """Resolvent norms refined by grid doubling until they settle.

    Successive degrees n and 2n must agree on norm_inv + norm_d_inv within
    rel_tol; the accepted value is the finer one.  Hitting n_cap without
    agreement returns the last value flagged unconverged.
    """
    if kind not in _ASSEMBLERS:
        raise ValueError(f"unknown operator kind {kind!r}")
    assemble = _ASSEMBLERS[kind]
    n_start = min(n0 if n0 is not None else ladder_start(params.beta), n_cap)
    n = n_start
    prev = None
    while True:
        op = assemble(profile, params, build_grid(n))
        nums = resolvent_numbers(op)
        done_cap = 2 * n > n_cap
        converged = False
        if prev is not None:
            ref = prev["norm_inv"] + prev["norm_d_inv"]
            cur = nums["norm_inv"] + nums["norm_d_inv"]
            if math.isfinite(ref) and ref > 0.0 and math.isfinite(cur):
                converged = abs(cur - ref) <= rel_tol * ref
        if converged or done_cap:
            return ResolventSample(
                kind=kind,
                alpha=params.alpha,
                beta=params.beta,
                lam=params.lam,
                n_start=n_start,
                n_used=n,
                converged=converged,
                singular=nums["singular"],
                sigma_min=nums["sigma_min"],
                norm_inv=nums["norm_inv"],
                norm_d_inv=nums["norm_d_inv"],
            )
        prev = nums
        n *= 2


def eig_floor_ladder(
    profile: Profile,
    nu: float,
    n0: int = 64,
    rel_tol: float = 1e-9,
    n_cap: int = 2048,
    singular_window: float = 1e-4,
) -> tuple[float, int, bool]:
    """Smallest certificate eigenvalue at velocity nu, grid-doubled to rest.

    Returns (eigenvalue, degree used, converged flag); agreement between
    consecutive degrees is absolute below 1, relative above.
    """
    n = min(n0, n_cap)
    prev = None
    while True:
        op = assemble_certificate_operator(
            profile, nu, build_grid(n), singular_window=singular_window
        )
        cur = min_eig_selfadjoint(op)
        if prev is not None and abs(cur - prev) <= rel_tol * max(1.0, abs(cur)):
            return cur, n, True
        if 2 * n > n_cap:
            return cur, n, False
        prev = cur
        n *= 2


@dataclass(frozen=True)
class PseudospectrumGrid:
    """Resolvent norm over a rectangular grid of spectral shifts."""

    kind: str
    alpha: float
    beta: float
    mu_values: np.ndarray
    nu_values: np.ndarray
    norms: np.ndarray            # shape (len(nu_values), len(mu_values))
    samples: tuple[ResolventSample, ...]


def pseudospectrum_grid(
    profile: Profile,
    kind: str,
    alpha: float,
    beta: float,
    mu_values,
    nu_values,
    threads: int | None = None,
    **ladder_kwargs,
) -> PseudospectrumGrid:
    """Map (mu, nu) -> resolvent norm at shifts lam = mu + i nu, in parallel.

    Worker threads each run the full grid ladder; dense linear algebra
    releases the interpreter lock, so modest thread counts scale well.
    """
    mu_values = np.asarray(mu_values, dtype=float)
    nu_values = np.asarray(nu_values, dtype=float)
    lams = [
        complex(mu, nu) for nu in nu_values for mu in mu_values
    ]

    def work(lam: complex) -> ResolventSample:
        return resolvent_sample(
            profile, SpectralParams(alpha, beta, lam), kind, **ladder_kwargs
        )

    with ThreadPoolExecutor(max_workers=thread_count(threads)) as pool:
        samples = list(pool.map(work, lams))
    norms = np.array([s.norm_inv for s in samples]).reshape(
        len(nu_values), len(mu_values)
    )
    return PseudospectrumGrid(
        kind=kind,
        alpha=float(alpha),
        beta=float(beta),
        mu_values=mu_values,
        nu_values=nu_values,
        norms=norms,
        samples=tuple(samples),
    )
