"""Catalog maps, normalization flags, and map-spec parsing."""

import json

import numpy as np
import pytest

from qcjohn import (
    HarmonicMap,
    Identity,
    InvariantViolation,
    ParamOutOfRange,
    ParseError,
    SeriesFunction,
    UnknownCatalogEntry,
    boundary_mesh,
    catalog_get,
    load_map_spec,
)

from conftest import ALL_CATALOG


def test_affine_eval_and_constant():
    aff = catalog_get("affine", a=0.5)
    assert abs(aff.eval(1j) - 0.5j) < 1e-15
    assert aff.known_k == 3.0
    assert aff.in_sh and not aff.in_sh0 and aff.bounded_image


def test_shear_is_real_on_real_axis():
    shear = catalog_get("shear_omega_bz", b=1.0)
    for r in (0.1, 0.5, 0.9):
        val = shear.eval(r)
        assert abs(val.imag) < 1e-15
    assert shear.known_k is None  # |omega| -> 1, not quasiconformal
    assert shear.in_sh0


def test_cardioid_flags_and_univalence_screen():
    cardioid = catalog_get("analytic", expr="cardioid")
    assert cardioid.bounded_image and cardioid.known_k == 1.0
    geom = boundary_mesh(cardioid, 1e-3, 1024)
    assert not _polyline_self_intersects(geom.boundary)


def test_lune_flags_and_cusp_geometry():
    lune = catalog_get("analytic", expr="lune")
    assert lune.bounded_image and lune.john_failing_reference
    assert lune.in_sh0
    geom = boundary_mesh(lune, 1e-3, 2048)
    assert not _polyline_self_intersects(geom.boundary)
    # Outward cusp: the normalized image pinches toward i*pi/2 (the common
    # image of the boundary directions +1 and -1); the boundary approaches
    # it only logarithmically, so check monotone approach rather than
    # proximity, and check the tip is not an interior point.
    cusp = 1j * np.pi / 2.0
    assert not geom.contains(cusp)[0]
    gap_coarse = np.min(np.abs(geom.boundary - cusp))
    fine = boundary_mesh(lune, 1e-5, 2048)
    gap_fine = np.min(np.abs(fine.boundary - cusp))
    assert gap_fine < gap_coarse
    assert np.max(np.abs(geom.boundary)) < 5.0


def _polyline_self_intersects(poly):
    # O(n^2) proper-crossing screen between non-adjacent edges (decimated).
    pts = poly[:: max(1, poly.size // 512)]
    a = pts
    b = np.roll(pts, -1)
    n = a.size

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    for i in range(n):
        p, q = a[i], b[i]
        js = np.arange(n)
        mask = (js != i) & (js != (i - 1) % n) & (js != (i + 1) % n)
        aa, bb = a[mask], b[mask]
        d1 = cross(q - p, aa - p)
        d2 = cross(q - p, bb - p)
        e1 = cross(bb - aa, p - aa)
        e2 = cross(bb - aa, q - aa)
        if np.any((d1 * d2 < 0) & (e1 * e2 < 0)):
            return True
    return False


def test_harmonic_koebe_flags():
    hk = catalog_get("harmonic_koebe")
    assert hk.in_sh0 and not hk.bounded_image and hk.known_k is None


def test_automorphism_requires_small_parameter():
    with pytest.raises(ParamOutOfRange):
        catalog_get("analytic", expr="automorphism", a=1.0)


def test_unknown_entries_rejected():
    with pytest.raises(UnknownCatalogEntry):
        catalog_get("spiral")
    with pytest.raises(UnknownCatalogEntry):
        catalog_get("analytic", expr="spiral")


def test_affine_parameter_range():
    with pytest.raises(ParamOutOfRange):
        catalog_get("affine", a=1.0)
    with pytest.raises(ParamOutOfRange):
        catalog_get("scaled", inner="identity", r=1.0)


def test_scaled_preserves_normalization():
    scaled = catalog_get("scaled", inner="harmonic_koebe", r=0.5)
    hj = scaled.h.jet(0.0)
    gj = scaled.g.jet(0.0)
    assert abs(hj.value) < 1e-14 and abs(hj.d1 - 1.0) < 1e-14
    assert abs(gj.value) < 1e-14 and abs(gj.d1) < 1e-14
    assert scaled.in_sh0 and scaled.bounded_image
    # dilatation of the harmonic Koebe map is z, so the restriction to the
    # half-disk has constant bound 0.5 and distortion (1+0.5)/(1-0.5)
    assert abs(scaled.known_k - 3.0) < 1e-6


def test_sense_preservation_on_grid(catalog_maps):
    k_grid = np.arange(1, 65)
    radii = 0.95 * k_grid / 64.0
    theta = 2.0 * np.pi * np.arange(64) / 64.0
    grid = radii[:, None] * np.exp(1j * theta)[None, :]
    for name, params in ALL_CATALOG:
        mapping = catalog_maps[name]
        if mapping.known_k is None:
            continue
        hj, gj = mapping.jets(grid)
        jac = np.abs(hj.d1) ** 2 - np.abs(gj.d1) ** 2
        assert np.all(jac > 0), name


def test_normalization_validation():
    with pytest.raises(InvariantViolation):
        HarmonicMap(h=Identity(), g=SeriesFunction([0.5]), label="bad-g0")
    with pytest.raises(InvariantViolation):
        HarmonicMap(h=SeriesFunction([0.1, 1.0]), g=SeriesFunction([0.0]),
                    in_sh=True, label="bad-h0")
    with pytest.raises(InvariantViolation):
        HarmonicMap(h=Identity(), g=SeriesFunction([0.0, 0.5]),
                    in_sh=True, in_sh0=True, label="bad-g1")


def test_load_map_spec_catalog():
    mapping = load_map_spec(b'{"kind": "catalog", "name": "identity"}')
    assert mapping.label == "identity" and mapping.known_k == 1.0


def test_load_map_spec_series_infers_flags():
    doc = {"kind": "series", "h": [[0, 0], [1, 0]],
           "g": [[0, 0], [0, 0], [0.25, 0]]}
    mapping = load_map_spec(json.dumps(doc))
    assert mapping.in_sh and mapping.in_sh0
    assert abs(mapping.eval(0.4) - (0.4 + 0.04)) < 1e-15


def test_load_map_spec_rejects_claimed_normalization():
    doc = {"kind": "series", "h": [[1, 0]], "flags": {"in_SH": True}}
    with pytest.raises(InvariantViolation):
        load_map_spec(json.dumps(doc))


def test_load_map_spec_parse_errors():
    with pytest.raises(ParseError):
        load_map_spec(b"not json")
    with pytest.raises(ParseError):
        load_map_spec({"kind": "wavelet"})
    with pytest.raises(ParseError):
        load_map_spec({"kind": "series", "h": [[float("nan"), 0]]})


def test_eval_matches_parts(catalog_maps):
    rng = np.random.default_rng(3)
    zs = 0.7 * np.exp(1j * rng.uniform(0, 2 * np.pi, 16))
    for mapping in catalog_maps.values():
        hj, gj = mapping.jets(zs)
        assert np.allclose(mapping.eval(zs), hj.value + np.conj(gj.value))
