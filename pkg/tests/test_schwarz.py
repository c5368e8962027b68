"""Pre-Schwarzian/Schwarzian data, boundary test, rectifiability."""

import math

import numpy as np
import pytest

from qcjohn import (
    CriticalPoint,
    HarmonicMap,
    Identity,
    SeriesFunction,
    catalog_get,
    preschwarzian_boundary_test,
    rectifiability_check,
    schwarz_pick_check,
    schwarzian_data,
    taylor_coefficients,
)

from conftest import disk_samples


def test_identity_data_vanishes():
    sd = schwarzian_data(catalog_get("identity"), 0.3 + 0.2j)
    for val in (sd.th, sd.sh, sd.pf, sd.sf, sd.omega, sd.omega1, sd.omega2):
        assert abs(val) < 1e-14


def test_koebe_data_at_origin():
    # S_k(z) = -6/(1 - z^2)^2, so S_k(0) = -6; conformal part makes
    # the harmonic quantities coincide with the analytic ones.
    sd = schwarzian_data(catalog_get("koebe"), 0.0)
    assert abs(sd.th - 4.0) < 1e-13
    assert abs(sd.sh + 6.0) < 1e-12
    assert sd.pf == sd.th and sd.sf == sd.sh


def test_koebe_schwarzian_matches_closed_form():
    koebe = catalog_get("koebe")
    rng = np.random.default_rng(41)
    for z in disk_samples(rng, 32, 0.8):
        sd = schwarzian_data(koebe, z)
        assert abs(sd.sh - (-6.0 / (1.0 - z * z) ** 2)) < 1e-10


def test_shear_pre_schwarzian_value():
    # h = z, g = z^2/2 has omega = z; at z = 0.5 the correction term gives
    # P_f = -(1 * 0.5)/(1 - 0.25) = -2/3.
    shear = catalog_get("shear_omega_bz", b=1.0)
    sd = schwarzian_data(shear, 0.5)
    assert abs(sd.pf + 2.0 / 3.0) < 1e-14
    assert abs(sd.omega - 0.5) < 1e-15


def test_critical_point_raises():
    # h' vanishes at z = 0 for h = z^2.
    degenerate = HarmonicMap(h=SeriesFunction([0.0, 0.0, 1.0]),
                             g=SeriesFunction([0.0]), label="critical")
    with pytest.raises(CriticalPoint):
        schwarzian_data(degenerate, 0.0)


def test_conformal_specialization(catalog_maps):
    rng = np.random.default_rng(42)
    for name in ("koebe", "cardioid", "lune"):
        mapping = catalog_maps[name]
        for z in disk_samples(rng, 16, 0.7):
            sd = schwarzian_data(mapping, z)
            assert abs(sd.pf - sd.th) < 1e-12, name
            assert abs(sd.sf - sd.sh) < 1e-12, name


def test_moebius_kernel():
    auto = catalog_get("analytic", expr="automorphism", a=0.4)
    rng = np.random.default_rng(43)
    for z in disk_samples(rng, 32, 0.9):
        assert abs(schwarzian_data(auto, z).sh) < 1e-10


def test_chain_consistency_series_vs_closed_form():
    # A degree-64 series re-expansion reproduces the Schwarzian data of the
    # closed form on |z| <= 0.7 (for maps whose geometric tail at 0.7 is
    # below the tolerance; a subdisk-scaled pole map qualifies).
    rng = np.random.default_rng(44)
    base = catalog_get("scaled", inner="koebe", r=0.7)
    series_map = HarmonicMap(
        h=SeriesFunction(taylor_coefficients(base.h, 64)),
        g=SeriesFunction(taylor_coefficients(base.g, 64)),
        label="series-twin", in_sh=base.in_sh, in_sh0=base.in_sh0,
        bounded_image=True,
    )
    for z in disk_samples(rng, 24, 0.7):
        sd_closed = schwarzian_data(base, z)
        sd_series = schwarzian_data(series_map, z)
        assert abs(sd_closed.pf - sd_series.pf) < 1e-8
        assert abs(sd_closed.sf - sd_series.sf) < 1e-8


def test_boundary_test_identity():
    bt = preschwarzian_boundary_test(catalog_get("identity"))
    assert np.max(np.abs(bt.maxima)) < 1e-14
    assert bt.passed


def test_boundary_test_shear_exact_maxima():
    # omega = z, h = z: (1 - r^2) Re(z P_f) = -r^2 at every angle.
    bt = preschwarzian_boundary_test(
        catalog_get("shear_omega_bz", b=1.0), ladder=[0.5, 0.9, 0.99]
    )
    assert np.max(np.abs(bt.maxima - np.array([-0.25, -0.81, -0.9801]))) < 1e-10
    assert bt.passed


def test_boundary_test_koebe_fails():
    bt = preschwarzian_boundary_test(catalog_get("koebe"))
    assert bt.estimate > 5.5
    assert not bt.passed


def test_boundary_maxima_rotation_invariant():
    from qcjohn import Affine, Compose, Scale

    mapping = catalog_get("cardioid")
    # grid-commensurate rotation so both maps sample identical points
    theta = 2.0 * np.pi * 100.0 / 512.0
    rot = HarmonicMap(
        h=Scale(np.exp(-1j * theta), Compose(mapping.h, Affine(np.exp(1j * theta)))),
        g=Scale(np.exp(1j * theta), Compose(mapping.g, Affine(np.exp(1j * theta)))),
        label="rotated-cardioid", bounded_image=True,
    )
    ladder = [0.5, 0.75, 0.9]
    base = preschwarzian_boundary_test(mapping, ladder, n_angles=512)
    rotated = preschwarzian_boundary_test(rot, ladder, n_angles=512)
    assert np.max(np.abs(base.maxima - rotated.maxima)) < 1e-10


def test_rectifiability_verdicts():
    finite = rectifiability_check(catalog_get("identity"), rays=[1.0, 1j])
    assert all(r.verdict == "finite" for r in finite)
    assert abs(finite[0].lengths[-1] - (1.0 - 2.0 ** -12)) < 1e-9
    aff = rectifiability_check(catalog_get("affine", a=0.5), rays=[1.0])
    assert aff[0].verdict == "finite"
    assert abs(aff[0].lengths[-1] - 1.5 * (1.0 - 2.0 ** -12)) < 1e-9
    # радial length of the Koebe image along +1 is int (1+t)/(1-t)^3 dt -> inf
    koebe = rectifiability_check(catalog_get("koebe"), rays=[1.0])
    assert koebe[0].verdict == "divergent"


def test_schwarz_pick_variants():
    rng = np.random.default_rng(45)
    # constant dilatation: derivative vanishes
    rep = schwarz_pick_check(catalog_get("affine", a=0.5), disk_samples(rng, 32, 0.9))
    assert rep.all_pass
    # omega(z) = z: equality everywhere
    rep_eq = schwarz_pick_check(
        catalog_get("shear_omega_bz", b=1.0), disk_samples(rng, 32, 0.9)
    )
    assert rep_eq.all_pass
    assert max(abs(s.lower) for s in rep_eq.samples) < 1e-12
    # omega = z^2/2 at z = 0.5: 0.5 <= (1 - 1/64)/0.75
    half_sq = HarmonicMap(
        h=Identity(), g=SeriesFunction([0.0, 0.0, 0.0, 1.0 / 6.0]),
        label="omega-z2-over-2", in_sh=True, in_sh0=True, bounded_image=True,
    )
    rep_sq = schwarz_pick_check(half_sq, [0.5])
    margin = (1.0 - (0.125) ** 2) / 0.75 - 0.5
    assert abs(rep_sq.samples[0].lower - margin) < 1e-12
    assert 0.8 < margin < 0.82
