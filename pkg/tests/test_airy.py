"""Airy evaluation, the rotation identity, and tail-integral zero hunting."""

import math

import mpmath
import numpy as np
import pytest

import shearstab as ss
from shearstab.airy import (
    AI_AT_ZERO,
    AI_PRIME_AT_ZERO,
    TAIL_AT_ZERO,
    airy_ai,
    airy_ai_prime,
    airy_tail_integral,
    airy_tail_integral_prime,
    airy_zeros,
    rotation_identity_residual,
    smooth_step,
    tail_zero_margin,
)

mpmath.mp.dps = 30

# Verified locations of every zero of the rotated tail integral inside the
# search rectangle (0.05, 10) x (-10, 10); the margin is the smallest real
# part.  Found by winding-number bisection, verified by adaptive quadrature.
FROZEN_MARGIN = 1.0626257959756658
FROZEN_ZEROS = (
    1.0626257959756658 + 4.1288430029031975j,
    2.5026019962191395 + 6.404945421133896j,
    3.044370030763962 + 2.9846824354831867j,
    3.6759265141683213 + 8.305704748750411j,
    4.295544446445203 + 5.369789614854372j,
    5.354988051666741 + 7.3362981180897515j,
    6.306720835697342 + 9.077862528649002j,
)


def test_airy_constants_match_gamma_closed_forms():
    exact_ai = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    exact_aip = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
    assert abs(AI_AT_ZERO - exact_ai) < 1e-15
    assert abs(AI_PRIME_AT_ZERO - exact_aip) < 1e-15
    assert abs(airy_ai(0.0) - exact_ai) < 1e-12
    assert abs(airy_ai_prime(0.0) - exact_aip) < 1e-12


def test_airy_against_mpmath_on_complex_points():
    rng = np.random.default_rng(11)
    pts = 4.0 * (rng.standard_normal(20) + 1j * rng.standard_normal(20))
    for z in pts:
        exact = complex(mpmath.airyai(complex(z)))
        got = airy_ai(z)
        assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))


def test_airy_zeros_against_mpmath():
    got = airy_zeros(10)
    for k, z in enumerate(got, start=1):
        exact = float(mpmath.airyaizero(k))
        assert abs(z - exact) <= 1e-10, k


def test_airy_zeros_are_actual_roots():
    for z in airy_zeros(6):
        assert abs(airy_ai(float(z))) < 1e-13


def test_airy_zeros_validation():
    with pytest.raises(ValueError):
        airy_zeros(0)
    with pytest.raises(ValueError):
        airy_zeros(51)


def test_rotation_identity_seeded_points():
    rng = np.random.default_rng(20260819)
    u = rng.random(100)
    ang = rng.random(100)
    pts = 8.0 * np.sqrt(u) * np.exp(2j * np.pi * ang)
    worst = max(rotation_identity_residual(z) for z in pts)
    assert worst <= 1e-11


def test_tail_integral_at_zero_is_one_third():
    assert abs(airy_tail_integral(0.0) - TAIL_AT_ZERO) < 1e-10
    assert TAIL_AT_ZERO == pytest.approx(1.0 / 3.0, abs=0)


def test_tail_integral_against_mpmath_quadrature():
    rot = complex(mpmath.exp(1j * mpmath.pi / 6))
    for z in (0.5, 1.0 + 1.0j, 2.0 - 0.5j):
        exact = complex(
            rot
            * mpmath.quad(
                lambda t: mpmath.airyai(rot * (z + t)), [0, mpmath.inf]
            )
        )
        got = airy_tail_integral(z)
        assert abs(got - exact) <= 1e-10 * max(1.0, abs(exact)), z


def test_tail_integral_decays_along_real_axis():
    vals = [abs(airy_tail_integral(t)) for t in (0.0, 2.0, 4.0, 6.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_tail_integral_prime_matches_difference_quotient():
    h = 1e-6
    for z in (0.3 + 0.2j, 1.5, 2.0 + 1.0j):
        fd = (airy_tail_integral(z + h) - airy_tail_integral(z - h)) / (2 * h)
        exact = airy_tail_integral_prime(z)
        assert abs(fd - exact) <= 1e-7 * max(1.0, abs(exact))


def test_tail_zero_margin_frozen_values():
    res = tail_zero_margin()
    assert res.margin == pytest.approx(FROZEN_MARGIN, abs=1e-9)
    assert len(res.zeros) == len(FROZEN_ZEROS)
    for got, exp in zip(res.zeros, FROZEN_ZEROS):
        assert abs(got - exp) <= 1e-8, exp
    assert all(r <= 1e-10 for r in res.residuals)
    assert res.rectangle == (0.05, 10.0, -10.0, 10.0)


def test_tail_zero_margin_stable_under_refinement():
    coarse = tail_zero_margin()
    fine = tail_zero_margin(max_panel=0.35)
    assert abs(coarse.margin - fine.margin) < 1e-11
    assert len(coarse.zeros) == len(fine.zeros)


def test_tail_zeros_verified_by_quadrature_route():
    # Dual route: each reported zero must kill the integral computed by
    # adaptive quadrature, measured as a Newton step length.
    res = tail_zero_margin()
    for z in res.zeros[:3]:
        val = airy_tail_integral(1j * z)
        slope = abs(airy_tail_integral_prime(1j * z))
        assert abs(val) / slope < 1e-10


def test_smooth_step_plateaus_and_monotone():
    t = np.linspace(0.0, 1.2, 121)
    vals = smooth_step(t)
    assert np.all(vals[t <= 0.5] == 1.0)
    assert np.all(vals[t >= 1.0] == 0.0)
    mid = vals[(t > 0.5) & (t < 1.0)]
    assert np.all(np.diff(mid) <= 1e-12)
    assert np.all((mid >= 0.0) & (mid <= 1.0))


def test_smooth_step_scalar_input():
    assert smooth_step(0.25) == 1.0
    assert smooth_step(2.0) == 0.0
