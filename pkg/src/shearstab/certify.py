"""Stability certificates and inviscid spectrum scans.

A monotone profile is certified when the Schrodinger-type operator
-d2 + U''/(U - nu) with Dirichlet walls is positive for every velocity nu
that the curvature vanishes at (the inflection set).  Positivity of the
smallest eigenvalue, uniformly over that set, rules out inviscid neutral
modes and with them the large-Reynolds instability route.

The Rayleigh scan complements the certificate: it computes the spectrum of
the inviscid evolution generator directly and measures how far eigenvalues
stray from the real segment [U(-1), U(1)], tracking which excursions
persist as the grid is refined.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chebdiff import build_grid
from .operators import SpectralParams, assemble_rayleigh
from .profile import InflectionSet, Profile, inflection_values
from .spectral import (
    ResolventSample,
    eig_floor_ladder,
    eigenvalues,
    resolvent_sample,
    thread_count,
)

__all__ = [
    "CertificateEntry",
    "CertificateResult",
    "certify_profile",
    "RayleighScan",
    "rayleigh_spectrum_scan",
    "rayleigh_resolvent_probe",
]


@dataclass(frozen=True)
class CertificateEntry:
    """Smallest certificate eigenvalue at one sampled velocity."""

    nu: float
    lam_min: float
    n_used: int
    converged: bool


@dataclass(frozen=True)
class CertificateResult:
    """Verdict over the whole inflection set.

    sigma0 is the infimum of the sampled smallest eigenvalues (inf when the
    inflection set is empty and the certificate holds vacuously).  Verdicts:
    'certified' when sigma0 clears the margin with every entry converged,
    'not_certified' when sigma0 is negative, 'inconclusive' otherwise.
    """

    profile_id: str
    verdict: str
    sigma0: float
    margin: float
    entries: tuple[CertificateEntry, ...]
    vacuous: bool
    interval_density: int

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def certify_profile(
    profile: Profile,
    interval_density: int = 33,
    margin: float = 1e-6,
    n0: int = 64,
    n_cap: int = 2048,
    singular_window: float = 1e-4,
    threads: int | None = None,
) -> CertificateResult:
    """Certify positivity of -d2 + U''/(U - nu) over the inflection set.

    Velocities come from the profile's inflection set: isolated inflection
    values directly, flat curvature intervals through an inclusive linspace
    of `interval_density` points each.  Each velocity gets an independent
    eigenvalue ladder; ladders run on a thread pool since the dense solvers
    drop the interpreter lock.
    """
    if margin < 0.0:
        raise ValueError(f"margin must be nonnegative, got {margin}")
    infset = inflection_values(profile)
    if infset.is_empty():
        return CertificateResult(
            profile_id=profile.id_string(),
            verdict="certified",
            sigma0=math.inf,
            margin=margin,
            entries=(),
            vacuous=True,
            interval_density=interval_density,
        )
    nus = infset.sample(interval_density=interval_density)

    def work(nu: float) -> CertificateEntry:
        lam_min, n_used, converged = eig_floor_ladder(
            profile,
            nu,
            n0=n0,
            n_cap=n_cap,
            singular_window=singular_window,
        )
        return CertificateEntry(
            nu=float(nu), lam_min=lam_min, n_used=n_used, converged=converged
        )

    with ThreadPoolExecutor(max_workers=thread_count(threads)) as pool:
        entries = tuple(pool.map(work, nus))

    sigma0 = min(e.lam_min for e in entries)
    if not all(e.converged for e in entries):
        verdict = "inconclusive"
    elif sigma0 > margin:
        verdict = "certified"
    elif sigma0 < 0.0:
        verdict = "not_certified"
    else:
        verdict = "inconclusive"
    return CertificateResult(
        profile_id=profile.id_string(),
        verdict=verdict,
        sigma0=sigma0,
        margin=margin,
        entries=entries,
        vacuous=False,
        interval_density=interval_density,
    )


def _segment_distance(z: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Euclidean distance from complex points to the segment [lo, hi] x {0}."""
    dx = np.maximum(np.maximum(lo - z.real, z.real - hi), 0.0)
    return np.hypot(dx, z.imag)


@dataclass(frozen=True)
class RayleighScan:
    """Inviscid generator spectrum versus grid resolution.

    max_distances[i] is the largest distance from any eigenvalue at degree
    n_list[i] to the real velocity segment; persistent_offsets collects
    finest-grid eigenvalues that stand off the segment AND reappear at every
    coarser degree, the signature of a genuine unstable mode rather than a
    discretization artifact.
    """

    profile_id: str
    alpha: float
    n_list: tuple[int, ...]
    segment: tuple[float, float]
    max_distances: tuple[float, ...]
    monotone: bool
    persistent_offsets: tuple[complex, ...]


def rayleigh_spectrum_scan(
    profile: Profile,
    alpha: float,
    n_list: tuple[int, ...] = (128, 256, 512),
    off_tol: float = 1e-3,
    match_rtol: float = 0.1,
    match_floor: float = 1e-3,
) -> RayleighScan:
    """Spectrum of H^-1(U H + U'') across resolutions, H = -d2 + alpha^2."""
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"n_list must be strictly increasing, got {n_list}")
    lo, hi = float(profile.u(-1.0)), float(profile.u(1.0))
    spectra = []
    for n in n_list:
        op = assemble_rayleigh(profile, alpha, build_grid(n))
        spectra.append(eigenvalues(op))
    dists = [_segment_distance(s, lo, hi) for s in spectra]
    max_dists = tuple(float(d.max()) for d in dists)
    monotone = all(b <= a for a, b in zip(max_dists, max_dists[1:]))

    fine = spectra[-1][dists[-1] > off_tol]
    persistent = []
    for z in fine:
        tol = match_rtol * abs(z) + match_floor
        if all(
            np.min(np.abs(eigs[dist > off_tol] - z), initial=math.inf) <= tol
            for eigs, dist in zip(spectra[:-1], dists[:-1])
        ):
            persistent.append(complex(z))
    return RayleighScan(
        profile_id=profile.id_string(),
        alpha=float(alpha),
        n_list=tuple(int(n) for n in n_list),
        segment=(lo, hi),
        max_distances=max_dists,
        monotone=monotone,
        persistent_offsets=tuple(persistent),
    )


def rayleigh_resolvent_probe(
    profile: Profile,
    alpha: float,
    mu_values,
    nu_values,
    **ladder_kwargs,
) -> tuple[ResolventSample, ...]:
    """Resolvent norms of (U + i lam)(-d2 + alpha^2) + U'' at shifts off the
    imaginary axis: lam = mu + i nu with every mu nonzero, since at mu = 0
    the advective factor may vanish inside the channel."""
    samples = []
    for mu in mu_values:
        if mu == 0.0:
            raise ValueError("shift real parts must be nonzero")
        for nu in nu_values:
            params = SpectralParams(alpha=alpha, beta=0.0, lam=complex(mu, nu))
            samples.append(
                resolvent_sample(profile, params, "rayleigh_shifted", **ladder_kwargs)
            )
    return tuple(samples)
