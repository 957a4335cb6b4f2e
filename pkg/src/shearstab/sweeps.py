"""Scaling-law sweeps over the rescaled Reynolds number.

Each sweep drives one operator family across a range of beta (or shifts, or
wavenumbers), extracts a norm or a solve-versus-comparator error, and
normalizes it by the power law the resolvent analysis predicts.  A healthy
sweep shows a flat normalized column (bounded span) and, where a law is
fitted, a log-log slope inside the stated band.

* advective Schrodinger  -u'' + i b U u - b lam u : norm ~ b^(-2/3)
* boundary-shift fourth order operator            : norm ~ b^(-5/6)
* L1 critical-layer comparator                    : error ~ ||f||_H1 / b
* velocity-weighted data                          : energy ~ ||f||_2 / b
* large shifts                                    : norm ~ 1/(b |lam|)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve

from .airy import airy_zeros, tail_zero_margin
from .chebdiff import build_grid
from .operators import SpectralParams, assemble_schrodinger
from .profile import Profile, x_of_nu
from .spectral import ladder_start, resolvent_sample, weighted_norm

__all__ = [
    "SlopeFit",
    "fit_slope",
    "margin_constant",
    "SmoothData",
    "data_preset",
    "SweepRow",
    "SweepResult",
    "schrodinger_sweep",
    "l1_approximation_sweep",
    "weighted_data_sweep",
    "os_boundary_sweep",
    "os_large_alpha_sweep",
    "os_large_lambda_check",
]


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares power law y ~ C x^slope in log10 coordinates."""

    slope: float
    intercept: float
    rms_residual: float
    n_points: int


def fit_slope(xs, ys) -> SlopeFit:
    """Fit log10(y) = slope*log10(x) + intercept.

    Requires at least 4 strictly positive samples spanning a full decade in
    x, otherwise the slope is numerically meaningless and a ValueError says
    so rather than returning garbage.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("samples must be two equal-length 1-d sequences")
    if len(xs) < 4:
        raise ValueError(f"need at least 4 samples for a slope, got {len(xs)}")
    if np.min(xs) <= 0.0 or np.min(ys) <= 0.0 or not (
        np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))
    ):
        raise ValueError("samples must be finite and positive")
    if np.max(xs) / np.min(xs) < 10.0:
        raise ValueError("abscissa spread is under one decade")
    design = np.vstack([np.log10(xs), np.ones_like(xs)]).T
    target = np.log10(ys)
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - target) ** 2)))
    return SlopeFit(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        rms_residual=rms,
        n_points=len(xs),
    )


def _try_fit(xs, ys) -> SlopeFit | None:
    try:
        return fit_slope(xs, ys)
    except ValueError:
        return None


def margin_constant(fraction: float = 0.5) -> float:
    """Safe shift scale: fraction * min(tail-zero margin, |first Ai zero|/2).

    Shifts lam = (this constant) * beta^(-1/3) keep both wall modes decaying
    and stay clear of every resonance the tail integral can produce, with
    `fraction` of headroom.  Requires 0 < fraction <= 0.9.
    """
    if not 0.0 < fraction <= 0.9:
        raise ValueError(f"fraction must lie in (0, 0.9], got {fraction}")
    cap = min(tail_zero_margin().margin, abs(float(airy_zeros(1)[0])) / 2.0)
    return fraction * cap


@dataclass(frozen=True)
class SmoothData:
    """Forcing profile with a closed-form derivative."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    fp: Callable[[np.ndarray], np.ndarray]


def data_preset(name: str = "exp", seed: int | None = None) -> SmoothData:
    """Built-in forcing profiles: 'exp', 'affine', or seeded 'trig'.

    The trig preset draws degree-4 random trigonometric coefficients from a
    seeded generator, so the same seed always produces the same data.
    """
    if name == "exp":
        return SmoothData("exp", np.exp, np.exp)
    if name == "affine":
        return SmoothData(
            "affine",
            lambda x: 2.0 + np.asarray(x, dtype=float),
            lambda x: np.ones_like(np.asarray(x, dtype=float)),
        )
    if name == "trig":
        if seed is None:
            raise ValueError("trig data needs a seed")
        rng = np.random.default_rng(seed)
        degree = 4
        a = rng.standard_normal(degree + 1) / (1.0 + np.arange(degree + 1)) ** 2
        b = rng.standard_normal(degree) / (1.0 + np.arange(1, degree + 1)) ** 2
        ks = np.arange(1, degree + 1, dtype=float)

        def f(x):
            x = np.asarray(x, dtype=float)
            kx = np.multiply.outer(ks, x)
            return 2.0 + a[0] + np.tensordot(a[1:], np.cos(kx), 1) + np.tensordot(
                b, np.sin(kx), 1
            )

        def fp(x):
            x = np.asarray(x, dtype=float)
            kx = np.multiply.outer(ks, x)
            return np.tensordot(-a[1:] * ks, np.sin(kx), 1) + np.tensordot(
                b * ks, np.cos(kx), 1
            )

        return SmoothData(f"trig[{seed}]", f, fp)
    raise ValueError(f"unknown data preset {name!r}")


@dataclass(frozen=True)
class SweepRow:
    """One operating point of a sweep."""

    beta: float
    alpha: float
    lam: complex
    n_used: int
    converged: bool
    metric: float
    bound_ratio: float


@dataclass(frozen=True)
class SweepResult:
    """Sweep rows plus the fitted law and normalized-column diagnostics.

    span is max/min of the bound ratios; checks holds the sweep's named
    pass/fail observations; degraded flags a sweep where fewer than 80% of
    the rows reached grid convergence.
    """

    kind: str
    profile_id: str
    rows: tuple[SweepRow, ...]
    fit: SlopeFit | None
    bound_ratio_max: float
    span: float
    converged_fraction: float
    degraded: bool
    checks: dict
    meta: dict

    @property
    def passed(self) -> bool:
        return not self.degraded and all(self.checks.values())


def _finish(kind, profile, rows, fit, checks, meta) -> SweepResult:
    ratios = [r.bound_ratio for r in rows]
    finite = [r for r in ratios if math.isfinite(r) and r > 0.0]
    span = (max(finite) / min(finite)) if len(finite) == len(ratios) else math.inf
    conv = sum(r.converged for r in rows) / len(rows)
    return SweepResult(
        kind=kind,
        profile_id=profile.id_string(),
        rows=tuple(rows),
        fit=fit,
        bound_ratio_max=max(ratios),
        span=span,
        converged_fraction=conv,
        degraded=conv < 0.8,
        checks=checks,
        meta=meta,
    )


_DEFAULT_SCHRODINGER_BETAS = tuple(np.logspace(3.0, 7.0, 9))
_DEFAULT_OS_BETAS = tuple(np.logspace(4.0, 7.0, 7))
_SCHRODINGER_BAND = (-0.72, -0.61)


def schrodinger_sweep(
    profile: Profile,
    betas=_DEFAULT_SCHRODINGER_BETAS,
    lam: complex = 0.0,
    margin_fraction: float = 0.5,
    **ladder_kwargs,
) -> SweepResult:
    """Resolvent norm of -d2 + i*b*U - b*lam across beta.

    The fitted slope of the norm should sit near -2/3, the critical-layer
    exponent.  Each row also carries the normalized bound ratio
    (norm + sqrt(r)*derivative norm) / r with r = min(margin/|mu*b|,
    b^(-2/3)), which the theory predicts stays bounded.
    """
    betas = [float(b) for b in betas]
    if not betas:
        raise ValueError("empty beta list")
    lam = complex(lam)
    upsilon = margin_constant(margin_fraction)
    rows = []
    for beta in betas:
        if lam.real * beta ** (1.0 / 3.0) >= upsilon:
            raise ValueError(
                f"shift real part {lam.real} exceeds the safe scale at beta {beta}"
            )
        params = SpectralParams(alpha=0.0, beta=beta, lam=lam)
        s = resolvent_sample(profile, params, "schrodinger", **ladder_kwargs)
        if lam.real == 0.0:
            r = beta ** (-2.0 / 3.0)
        else:
            r = min(upsilon / abs(lam.real * beta), beta ** (-2.0 / 3.0))
        ratio = (s.norm_inv + math.sqrt(r) * s.norm_d_inv) / r
        rows.append(
            SweepRow(
                beta=beta,
                alpha=0.0,
                lam=lam,
                n_used=s.n_used,
                converged=s.converged,
                metric=s.norm_inv,
                bound_ratio=ratio,
            )
        )
    fit = _try_fit([r.beta for r in rows], [r.metric for r in rows])
    checks = {"all_converged": all(r.converged for r in rows)}
    if fit is not None:
        checks["slope_in_band"] = _SCHRODINGER_BAND[0] <= fit.slope <= _SCHRODINGER_BAND[1]
    return _finish(
        "schrodinger",
        profile,
        rows,
        fit,
        checks,
        {"band": _SCHRODINGER_BAND, "upsilon": upsilon, "lam": lam},
    )


def _solve_ladder(profile, params, rhs_of, metric_of, rel_tol=1e-3, n_cap=2048):
    """Grid-double a direct solve of the advective operator until the given
    metric settles.  rhs_of(grid) -> full-grid data; metric_of(grid, w_full)
    -> float with w_full the zero-extended solution."""
    n = ladder_start(params.beta)
    prev = None
    while True:
        grid = build_grid(n)
        op = assemble_schrodinger(profile, params, grid)
        rhs = rhs_of(grid)
        w = solve(op.matrix, np.asarray(rhs, dtype=complex)[1:-1])
        full = np.zeros(grid.n + 1, dtype=complex)
        full[1:-1] = w
        metric = metric_of(grid, full)
        if prev is not None and abs(metric - prev) <= rel_tol * max(prev, 1e-300):
            return metric, grid, full, True
        if 2 * n > n_cap:
            return metric, grid, full, False
        prev = metric
        n *= 2


def l1_approximation_sweep(
    profile: Profile,
    betas=(1e4, 1e5, 1e6),
    lam: complex = 0.0,
    data: SmoothData | None = None,
) -> SweepResult:
    """Critical-layer comparator error in L1 across beta.

    Solves (-d2 + i*b*U - b*lam) w = f and compares w against the
    regularized advective response -i f(x_c) / (b [U - nu - i r]), r =
    max(-mu, b^(-1/3)), concentrated at the critical point x_c where
    U = nu.  The L1 error times b, normalized by the H1 norm of f, should
    stay bounded across beta.
    """
    lam = complex(lam)
    if lam.real > 0.0:
        raise ValueError("shift real part must be nonpositive")
    data = data or data_preset("exp")
    xc = x_of_nu(profile, lam.imag)
    f_at_xc = float(np.asarray(data.f(np.array([xc])))[0])
    rows = []
    meta_norms = {}
    for beta in [float(b) for b in betas]:
        params = SpectralParams(alpha=0.0, beta=beta, lam=lam)
        reg = max(-lam.real, beta ** (-1.0 / 3.0))

        def rhs_of(grid):
            return data.f(grid.nodes)

        def metric_of(grid, full, _beta=beta, _reg=reg):
            comp = (
                1j
                * f_at_xc
                / (_beta * (profile.u(grid.nodes) - lam.imag - 1j * _reg))
            )
            return float(np.sum(grid.weights * np.abs(full + comp)))

        metric, grid, _, converged = _solve_ladder(profile, params, rhs_of, metric_of)
        fv = np.asarray(data.f(grid.nodes), dtype=float)
        fpv = np.asarray(data.fp(grid.nodes), dtype=float)
        h1 = math.sqrt(np.sum(grid.weights * (fv**2 + fpv**2)))
        meta_norms[beta] = h1
        rows.append(
            SweepRow(
                beta=beta,
                alpha=0.0,
                lam=lam,
                n_used=grid.n,
                converged=converged,
                metric=metric,
                bound_ratio=metric * beta / h1,
            )
        )
    checks = {
        "all_converged": all(r.converged for r in rows),
        "span_under_5": (
            max(r.bound_ratio for r in rows) / min(r.bound_ratio for r in rows) < 5.0
        ),
    }
    return _finish(
        "l1_approximation",
        profile,
        rows,
        None,
        checks,
        {"data": data.name, "critical_point": xc, "h1_norms": meta_norms},
    )


def weighted_data_sweep(
    profile: Profile,
    betas=(1e4, 1e5, 1e6),
    lam: complex = 0.0,
    data: SmoothData | None = None,
) -> SweepResult:
    """Energy response to velocity-weighted data across beta.

    Solves (-d2 + i*b*U - b*lam) w = (U - nu) f.  Multiplying the data by
    the local advection speed cancels the critical-layer peak, so
    (||w||_2 + b^(-1/2) ||w'||_2) * b / ||f||_2 should stay bounded.
    """
    lam = complex(lam)
    if lam.real > 0.0:
        raise ValueError("shift real part must be nonpositive")
    data = data or data_preset("exp")
    rows = []
    for beta in [float(b) for b in betas]:
        params = SpectralParams(alpha=0.0, beta=beta, lam=lam)

        def rhs_of(grid):
            return (profile.u(grid.nodes) - lam.imag) * data.f(grid.nodes)

        def metric_of(grid, full, _beta=beta):
            dfull = grid.d1 @ full
            return weighted_norm(grid, full) + _beta ** (-0.5) * weighted_norm(
                grid, dfull
            )

        metric, grid, _, converged = _solve_ladder(profile, params, rhs_of, metric_of)
        l2 = weighted_norm(grid, np.asarray(data.f(grid.nodes), dtype=float))
        rows.append(
            SweepRow(
                beta=beta,
                alpha=0.0,
                lam=lam,
                n_used=grid.n,
                converged=converged,
                metric=metric,
                bound_ratio=metric * beta / l2,
            )
        )
    checks = {
        "all_converged": all(r.converged for r in rows),
        "span_under_5": (
            max(r.bound_ratio for r in rows) / min(r.bound_ratio for r in rows) < 5.0
        ),
    }
    return _finish(
        "weighted_data", profile, rows, None, checks, {"data": data.name}
    )


def os_boundary_sweep(
    profile: Profile,
    alpha: float = 1.0,
    betas=_DEFAULT_OS_BETAS,
    margin_fraction: float = 0.5,
    alpha_max: float = 5.0,
    slope_limit: float = -5.0 / 6.0 + 0.08,
    **ladder_kwargs,
) -> SweepResult:
    """Fourth-order operator norms at the boundary-layer shift.

    Sets lam = (margin constant) * b^(-1/3), where wall modes still decay,
    and sweeps b.  The combined solve + derivative norm should fall like
    b^(-5/6); the fitted slope must not exceed slope_limit, and every row
    must converge within a single grid doubling.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= alpha_max:
        raise ValueError(f"wavenumber {alpha} outside (0, {alpha_max}]")
    betas = [float(b) for b in betas]
    upsilon = margin_constant(margin_fraction)
    rows = []
    for beta in betas:
        lam = complex(upsilon * beta ** (-1.0 / 3.0))
        params = SpectralParams(alpha=alpha, beta=beta, lam=lam)
        s = resolvent_sample(profile, params, "orr_sommerfeld", **ladder_kwargs)
        rows.append(
            SweepRow(
                beta=beta,
                alpha=alpha,
                lam=lam,
                n_used=s.n_used,
                converged=s.converged,
                metric=s.combined,
                bound_ratio=s.combined * beta ** (5.0 / 6.0),
            )
        )
    fit = _try_fit([r.beta for r in rows], [r.metric for r in rows])
    checks = {
        "all_converged": all(r.converged for r in rows),
        "single_doubling": all(
            r.converged and r.n_used <= 2 * ladder_start(r.beta) for r in rows
        ),
    }
    if fit is not None:
        checks["slope_at_most"] = fit.slope <= slope_limit
    return _finish(
        "os_boundary",
        profile,
        rows,
        fit,
        checks,
        {"upsilon_eff": upsilon, "fraction": margin_fraction, "slope_limit": slope_limit},
    )


def os_large_alpha_sweep(
    profile: Profile,
    alphas,
    beta: float,
    margin_fraction: float = 0.5,
    alpha_min: float = 2.0,
    **ladder_kwargs,
) -> SweepResult:
    """Short-wave regime: solve norm times alpha^(1/2) b^(5/6) should flatten.

    Requires strictly increasing wavenumbers, all at least alpha_min, so the
    sweep actually probes the short-wave asymptotics.
    """
    alphas = [float(a) for a in alphas]
    beta = float(beta)
    if not alphas or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("wavenumbers must be strictly increasing")
    if alphas[0] < alpha_min:
        raise ValueError(f"short-wave sweep needs alpha >= {alpha_min}")
    upsilon = margin_constant(margin_fraction)
    lam = complex(upsilon * beta ** (-1.0 / 3.0))
    rows = []
    for alpha in alphas:
        params = SpectralParams(alpha=alpha, beta=beta, lam=lam)
        s = resolvent_sample(profile, params, "orr_sommerfeld", **ladder_kwargs)
        metric = s.norm_inv * math.sqrt(alpha) * beta ** (5.0 / 6.0)
        rows.append(
            SweepRow(
                beta=beta,
                alpha=alpha,
                lam=lam,
                n_used=s.n_used,
                converged=s.converged,
                metric=metric,
                bound_ratio=metric,
            )
        )
    fit = _try_fit([r.alpha for r in rows], [r.metric for r in rows])
    checks = {
        "all_converged": all(r.converged for r in rows),
        "span_under_10": (
            max(r.bound_ratio for r in rows) / min(r.bound_ratio for r in rows) < 10.0
        ),
    }
    return _finish(
        "os_large_alpha",
        profile,
        rows,
        fit,
        checks,
        {"upsilon_eff": upsilon, "beta": beta},
    )


def os_large_lambda_check(
    profile: Profile,
    alpha: float = 1.0,
    beta: float = 1e5,
    lams=(-10.0, complex(-30.0, 5.0), 40.0j),
    lam_min: float = 5.0,
    **ladder_kwargs,
) -> SweepResult:
    """Far-shift regime: combined norm times b |lam| should be O(1).

    Every shift must satisfy |lam| >= lam_min and Re(lam) < 1, keeping the
    check inside the falloff region of the resolvent.
    """
    lams = [complex(v) for v in lams]
    if not lams:
        raise ValueError("need at least one shift")
    for lam in lams:
        if abs(lam) < lam_min:
            raise ValueError(f"|{lam}| below the far-shift threshold {lam_min}")
        if lam.real >= 1.0:
            raise ValueError(f"shift {lam} has real part >= 1")
    beta = float(beta)
    rows = []
    for lam in lams:
        params = SpectralParams(alpha=alpha, beta=beta, lam=lam)
        s = resolvent_sample(profile, params, "orr_sommerfeld", **ladder_kwargs)
        metric = s.combined * beta * abs(lam)
        rows.append(
            SweepRow(
                beta=beta,
                alpha=float(alpha),
                lam=lam,
                n_used=s.n_used,
                converged=s.converged,
                metric=metric,
                bound_ratio=metric,
            )
        )
    checks = {
        "all_converged": all(r.converged for r in rows),
        "span_under_10": (
            max(r.bound_ratio for r in rows) / min(r.bound_ratio for r in rows) < 10.0
        ),
    }
    return _finish("os_large_lambda", profile, rows, None, checks, {"beta": beta})
