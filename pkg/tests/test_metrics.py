import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from dsmin import (AngleRegion, ArrayConfig, DegenerateBeamError, InvalidArgumentError, WeightVector,
                   beam_function, build_moments, doppler_spread, equicos_directions,
                   normalized_doppler_spread, psd, quotient, radiation_efficiency, radiation_pattern,
                   window)
from dsmin.metrics import lobe_levels, to_db


@pytest.fixture(scope="module")
def mm8():
    return build_moments(AngleRegion.from_degrees(40, 75), ArrayConfig(8, 0.45))


def test_weight_vector_rejects_zero():
    with pytest.raises(InvalidArgumentError):
        WeightVector(np.zeros(3))


def test_single_antenna_spread_is_fixed():
    mm = build_moments(AngleRegion.from_degrees(40, 75), ArrayConfig(1, 0.45))
    expected = np.sqrt(mm.c2[0, 0].real / (2 * np.pi))
    for w in ([1.0], [3 - 2j]):
        assert normalized_doppler_spread(w, mm) == pytest.approx(expected, rel=1e-14)


@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
@settings(max_examples=50)
def test_metrics_scale_invariant(alpha):
    mm = _MM8
    w = np.exp(1j * np.arange(8)) * (1 + np.arange(8))
    for f in (lambda v: normalized_doppler_spread(v, mm), lambda v: radiation_efficiency(v, mm)[1]):
        assert f(alpha * w) == pytest.approx(f(w), rel=1e-12)


_MM8 = build_moments(AngleRegion.from_degrees(40, 75), ArrayConfig(8, 0.45))


def test_doppler_spread_units(mm8):
    w = np.ones(8)
    assert doppler_spread(w, mm8, 100.0) == pytest.approx(2 * np.pi * 100 * normalized_doppler_spread(w, mm8))


def test_spread_bounded_by_mu(mm8, rng):
    for _ in range(50):
        w = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        assert 0 <= normalized_doppler_spread(w, mm8) <= mm8.region.mu


def test_efficiency_dominant_eigenvector(mm8, rng):
    _, V = np.linalg.eigh(mm8.c0)
    assert radiation_efficiency(V[:, -1], mm8)[1] == pytest.approx(1.0, abs=1e-12)
    for _ in range(20):
        w = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        assert 0 < radiation_efficiency(w, mm8)[1] <= 1 + 1e-9


def test_degenerate_beam(ref_mm):
    # the bottom eigenvector of C0 radiates (numerically) nothing into the region
    lam, V = np.linalg.eigh(ref_mm.c0)
    assert lam[0] < 1e-15 * lam[-1]
    with pytest.raises(DegenerateBeamError):
        quotient(V[:, 0], ref_mm)


def test_beam_function_dirichlet():
    cfg = ArrayConfig(7, 0.45)
    w = np.ones(7)
    assert beam_function(w, 0.0, cfg) == pytest.approx(1.0)
    assert beam_function(w, 1 / (0.45 * 7), cfg) == pytest.approx(0.0, abs=1e-28)
    x = np.linspace(0.01, 0.9, 40)
    dirichlet = (np.sin(np.pi * 0.45 * 7 * x) / (7 * np.sin(np.pi * 0.45 * x))) ** 2
    np.testing.assert_allclose(beam_function(w, x, cfg), dirichlet, atol=1e-13)


def test_beam_function_triangle_bound(rng):
    cfg = ArrayConfig(9, 0.4)
    w = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    x = rng.uniform(-2, 2, 200)
    assert np.all(beam_function(w, x, cfg) <= (np.abs(w).sum() / 9) ** 2 + 1e-12)


def test_psd_support_and_symmetry():
    mm = build_moments(AngleRegion.centered(20), ArrayConfig(6, 0.45))
    fd = 300.0
    wd = 2 * np.pi * fd
    w = np.array([1, 2, 3, 3, 2, 1.0])
    assert psd(w, 1.01 * mm.region.mu * wd, mm, fd) == 0
    om = np.linspace(0, mm.region.mu * wd, 30)
    np.testing.assert_allclose(psd(w, om, mm, fd), psd(w, -om, mm, fd), rtol=1e-9, atol=1e-15)


def test_psd_second_moment_matches_quotient(mm8):
    # independent check: integrate the PSD directly and compare with the quadratic forms
    w = np.exp(0.3j * np.arange(8)) * np.linspace(1, 2, 8)
    fd = 1.0
    wd = 2 * np.pi * fd
    mu = mm8.region.mu
    f0 = lambda om: psd(w, om, mm8, fd)
    f2 = lambda om: (om / wd) ** 2 * psd(w, om, mm8, fd)
    p0 = sum(quad(f0, a, b, epsabs=0, epsrel=1e-12, limit=400)[0] for a, b in ((-mu * wd, 0), (0, mu * wd)))
    p2 = sum(quad(f2, a, b, epsabs=0, epsrel=1e-12, limit=400)[0] for a, b in ((-mu * wd, 0), (0, mu * wd)))
    assert p2 / p0 == pytest.approx(quotient(w, mm8), rel=1e-6)


def test_pattern_single_element_is_flat():
    region = AngleRegion.from_degrees(85, 95)
    bank = equicos_directions(region, 4)
    th, g, _ = radiation_pattern([1.0], bank, np.linspace(0.1, 3.0, 50), ArrayConfig(1, 0.45))
    np.testing.assert_allclose(g, g[0])


def test_pattern_matched_steering_peak():
    cfg = ArrayConfig(16, 0.45)
    region = AngleRegion.from_degrees(85, 95)
    bank = equicos_directions(region, 1)
    grid = np.deg2rad(np.arange(1, 1800) * 0.1)
    th, g, gdb = radiation_pattern(np.ones(16), bank, grid, cfg)
    assert np.rad2deg(th[np.argmax(g)]) == pytest.approx(90.0, abs=0.05)


def test_pattern_branch_flag_and_db_floor():
    cfg = ArrayConfig(4, 0.45)
    bank = equicos_directions(AngleRegion.from_degrees(85, 95), 3)
    grid = np.linspace(0.2, 2.9, 30)
    _, gall, _ = radiation_pattern(np.ones(4), bank, grid, cfg)
    parts = [radiation_pattern(np.ones(4), bank, grid, cfg, branch=q)[1] for q in range(3)]
    np.testing.assert_allclose(gall, np.sum(parts, axis=0), rtol=1e-12)
    assert to_db(np.array([0.0]))[0] == -200.0


def test_lobe_levels():
    region = AngleRegion.from_degrees(85, 95)
    th = np.deg2rad(np.array([80, 90, 100.0]))
    assert lobe_levels(th, np.array([1.0, 3.0, 2.0]), region) == (3.0, 2.0)
