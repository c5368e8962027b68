"""Differential frames, distortion constants, and the self-map bounds."""

import math

import numpy as np
import pytest

from qcjohn import (
    Affine,
    Compose,
    HarmonicMap,
    Identity,
    NotSensePreserving,
    Scale,
    SeriesFunction,
    catalog_get,
    check_selfmap_distortion,
    frame_at,
    frame_fields,
    lower_growth_exponent_fit,
    qc_constant,
)

from conftest import disk_samples


def test_identity_frame():
    fr = frame_at(catalog_get("identity"), 0.3 + 0.1j)
    assert fr.fz == 1.0 and fr.fzbar == 0.0
    assert fr.opnorm == 1.0 and fr.lnorm == 1.0
    assert fr.jacobian == 1.0 and fr.local_k == 1.0


def test_affine_frame_constant():
    fr = frame_at(catalog_get("affine", a=0.5), -0.2 + 0.4j)
    assert abs(fr.opnorm - 1.5) < 1e-15
    assert abs(fr.lnorm - 0.5) < 1e-15
    assert abs(fr.jacobian - 0.75) < 1e-15
    assert abs(fr.local_k - 3.0) < 1e-14
    assert abs(fr.dilatation - 0.5) < 1e-15


def test_harmonic_koebe_normalized_frame():
    fr = frame_at(catalog_get("harmonic_koebe"), 0.0)
    assert abs(fr.opnorm - 1.0) < 1e-12


def test_frame_identities_random(catalog_maps):
    rng = np.random.default_rng(5)
    for name, mapping in catalog_maps.items():
        zs = disk_samples(rng, 500, 0.9)
        fields = frame_fields(mapping, zs)
        prod = fields["opnorm"] * fields["lnorm"]
        assert np.all(
            np.abs(prod - np.abs(fields["jacobian"])) <= 1e-12 * np.maximum(prod, 1e-30)
        ), name
        finite = np.isfinite(fields["local_k"])
        omega = np.abs(fields["dilatation"][finite])
        expect = (1.0 + omega) / (1.0 - omega)
        assert np.all(
            np.abs(fields["local_k"][finite] - expect) <= 1e-12 * expect
        ), name


def test_conformal_specialization():
    koebe = catalog_get("koebe")
    rng = np.random.default_rng(6)
    zs = disk_samples(rng, 64, 0.9)
    fields = frame_fields(koebe, zs)
    assert np.allclose(fields["opnorm"], fields["lnorm"], rtol=1e-15)
    assert np.all(fields["local_k"] == 1.0)


def test_qc_constant_examples():
    assert qc_constant(catalog_get("identity")) == 1.0
    assert abs(qc_constant(catalog_get("affine", a=0.5)) - 3.0) < 1e-14
    ring = 0.9 * np.exp(2j * np.pi * np.arange(128) / 128)
    got = qc_constant(catalog_get("shear_omega_bz", b=0.5), grid=ring)
    assert abs(got - 29.0 / 11.0) < 1e-12


def test_qc_constant_rejects_folding():
    # h = z, g = 2z has negative Jacobian everywhere.
    folded = HarmonicMap(h=Identity(), g=SeriesFunction([0.0, 2.0]), label="folded")
    with pytest.raises(NotSensePreserving):
        qc_constant(folded)


def test_selfmap_distortion_identity_equality():
    rng = np.random.default_rng(9)
    rep = check_selfmap_distortion(catalog_get("identity"), 1.0, disk_samples(rng, 100, 0.9))
    assert rep.all_pass
    assert abs(rep.worst_lower) < 1e-14 and abs(rep.worst_upper) < 1e-14


def test_selfmap_distortion_automorphism_equality():
    # |phi'| = (1 - |phi|^2)/(1 - |z|^2) holds exactly for disk automorphisms.
    rng = np.random.default_rng(10)
    auto = catalog_get("analytic", expr="automorphism", a=0.3)
    rep = check_selfmap_distortion(auto, 1.0, disk_samples(rng, 200, 0.95))
    assert abs(rep.worst_lower) < 1e-12 and abs(rep.worst_upper) < 1e-12


def test_selfmap_distortion_flags_non_surjective_map():
    # f(z) = (z + 0.5 conj(z)) / 1.5 maps the disk INTO itself (image is an
    # ellipse), so the two-sided bound for self-homeomorphisms need not
    # hold: the sweep finds genuine lower-margin violations while the upper
    # bound stays intact.  (Numeric sweep: |f_z| = 2/3 but the lower bound
    # exceeds it wherever |f| stays small relative to |z|.)
    selfmap = HarmonicMap(
        h=Scale(1 / 1.5, Identity()), g=SeriesFunction([0.0, 0.5 / 1.5]),
        label="affine-into-map", bounded_image=True, known_k=3.0,
    )
    rng = np.random.default_rng(11)
    rep = check_selfmap_distortion(selfmap, 3.0, disk_samples(rng, 1000, 0.99))
    assert not rep.all_pass
    assert rep.worst_lower < -1e-3
    assert all(s.upper >= -1e-12 for s in rep.samples)


def test_selfmap_margins_rotation_invariant():
    mapping = catalog_get("analytic", expr="automorphism", a=0.2)
    rng = np.random.default_rng(12)
    zs = disk_samples(rng, 50, 0.9)
    base = check_selfmap_distortion(mapping, 1.0, zs)
    theta = 1.234
    rot = HarmonicMap(
        h=Scale(np.exp(1j * theta), Compose(mapping.h, Affine(np.exp(-1j * theta)))),
        g=Scale(np.exp(-1j * theta), Compose(mapping.g, Affine(np.exp(-1j * theta)))),
        label="rotated", bounded_image=True, known_k=1.0,
    )
    rotated = check_selfmap_distortion(rot, 1.0, np.exp(1j * theta) * zs)
    for s0, s1 in zip(base.samples, rotated.samples):
        assert abs(s0.lower - s1.lower) < 1e-12
        assert abs(s0.upper - s1.upper) < 1e-12


def test_margin_report_serialization_shape():
    rng = np.random.default_rng(13)
    rep = check_selfmap_distortion(catalog_get("identity"), 1.0, disk_samples(rng, 5, 0.5))
    rows = rep.to_jsonable()
    assert len(rows) == 5
    for row in rows:
        assert list(row) == ["z", "lower", "upper", "pass"]
        assert len(row["z"]) == 2 and isinstance(row["pass"], bool)


def test_lower_growth_exponent_identity_and_affine():
    assert lower_growth_exponent_fit(catalog_get("identity")) <= 1.0
    assert lower_growth_exponent_fit(catalog_get("affine", a=0.5)) <= 1.0


def test_lower_growth_exponent_koebe_ray():
    # Along the direction -1 the derivative is (1-t)/(1+t)^3; brute-check
    # first that the exponent 2 satisfies the lower bound on this ladder.
    ladder = [0.0, 0.5, 0.9, 0.99]

    def kprime(t):
        return (1.0 - t) / (1.0 + t) ** 3

    c1 = 2.0
    for i, r3 in enumerate(ladder):
        for r4 in ladder[i:]:
            x = (1.0 - r4) / (1.0 - r3)
            assert kprime(r4) >= 2.0 ** -(1 + c1) * kprime(r3) * x ** (c1 - 1.0) - 1e-12
    got = lower_growth_exponent_fit(
        catalog_get("koebe"), rays=[-1.0], ladder=ladder
    )
    assert got <= 2.0
