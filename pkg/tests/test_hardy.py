"""Integral means, norm estimates, coefficient sums, critical exponents."""

import math

import numpy as np
import pytest

from qcjohn import (
    CoefficientTable,
    QuadratureFailure,
    beta_critical,
    catalog_get,
    coefficient_sum,
    coefficient_table,
    derivative_energy_series,
    energy_field,
    hardy_norm,
    integral_mean,
    opnorm_field,
    radius_ladder,
)


def test_mean_of_identity_map():
    for r in (0.25, 0.37, 0.9):
        assert abs(integral_mean(catalog_get("identity"), 2.0, r) - r) < 1e-12


def test_mean_of_constant_fields():
    ident = catalog_get("identity")
    assert abs(integral_mean(opnorm_field(ident), 1.0, 0.5) - 1.0) < 1e-12
    aff = catalog_get("affine", a=0.5)
    assert abs(integral_mean(opnorm_field(aff), 1.0, 0.7) - 1.5) < 1e-12


def test_mean_sup_norm():
    aff = catalog_get("affine", a=0.5)
    got = integral_mean(aff, math.inf, 0.5)
    assert abs(got - 0.75) < 1e-10  # max |z + 0.5 conj z| on |z| = 0.5


def test_mean_rejects_bad_arguments():
    with pytest.raises(QuadratureFailure):
        integral_mean(catalog_get("identity"), 1.0, 1.5)
    with pytest.raises(QuadratureFailure):
        integral_mean(catalog_get("identity"), 0.0, 0.5)


def test_hardy_norm_examples():
    assert hardy_norm(opnorm_field(catalog_get("identity")), 1.0) == 1.0
    assert abs(hardy_norm(opnorm_field(catalog_get("affine", a=0.5)), 1.0) - 1.5) < 1e-12
    assert hardy_norm(opnorm_field(catalog_get("koebe")), 1.0) == math.inf


def test_energy_series_identity():
    for r in (0.0, 0.3, 0.8):
        es = derivative_energy_series(catalog_get("identity"), r)
        assert abs(es.value - 1.0) < 1e-12


def test_energy_series_vanishing_powers_at_origin():
    for name, params in (("harmonic_koebe", {}), ("shear_omega_bz", {"b": 0.5}),
                         ("lune", {})):
        es = derivative_energy_series(catalog_get(name, **params), 0.0)
        assert abs(es.value - 1.0) < 1e-10, name


def test_energy_series_cardioid_closed_form():
    # h = z + z^2/2: 1 + 4 |a_2|^2 r^2 = 1 + r^2.
    es = derivative_energy_series(catalog_get("cardioid"), 0.5)
    assert abs(es.value - 1.25) < 1e-12
    quad = integral_mean(energy_field(catalog_get("cardioid")), 1.0, 0.5)
    assert abs(es.value - quad) < 1e-10


def test_parseval_consistency(catalog_maps):
    for name, mapping in catalog_maps.items():
        for r in (0.25, 0.5, 0.75):
            series_side = derivative_energy_series(mapping, r).value
            quad_side = integral_mean(energy_field(mapping), 1.0, r)
            assert abs(series_side - quad_side) <= 1e-8 * max(quad_side, 1.0), (name, r)


def test_means_nondecreasing_in_radius(catalog_maps):
    ladder = [r for r in radius_ladder(8) if r > 0]
    for name in ("cardioid", "harmonic_koebe", "lune", "shear_omega_bz"):
        field = energy_field(catalog_maps[name])
        means = [integral_mean(field, 1.0, r) for r in ladder]
        assert all(b >= a - 1e-10 for a, b in zip(means, means[1:])), name


def test_coefficient_sums_trivial_maps():
    ident_table = coefficient_table(catalog_get("identity"), 128)
    cs = coefficient_sum(ident_table, 0.5)
    assert cs.partial_sums[-1] == 0.0 and cs.convergent
    aff_table = coefficient_table(catalog_get("affine", a=0.5), 128)
    cs_aff = coefficient_sum(aff_table, 0.5)
    assert cs_aff.partial_sums[-1] == 0.0 and cs_aff.convergent


def test_harmonic_koebe_coefficients_and_divergence(catalog_maps):
    table = coefficient_table(catalog_maps["harmonic_koebe"], 256)
    n = np.arange(1, 257)
    a_oracle = (2 * n + 1) * (n + 1) / 6.0
    b_oracle = (n - 1) * (2 * n - 1) / 6.0
    # top-order Cauchy extraction carries ~1e-7 relative noise
    assert np.max(np.abs(table.a - a_oracle) / a_oracle) < 1e-6
    assert np.max(np.abs(table.b - b_oracle) / np.maximum(b_oracle, 1.0)) < 1e-6
    for beta in (0.1, 0.5, 1.0):
        assert not coefficient_sum(table, beta).convergent


def test_beta_critical_cases():
    assert beta_critical(coefficient_table(catalog_get("identity"), 256)) == 4.0
    n = np.arange(1, 513, dtype=float)
    # terms n^(1+beta) |a_n|^2 with |a_n| = n^-1.5 form blocks ~ 2^(k(beta-1)):
    # dyadic decay threshold sits just below beta = 1
    t32 = CoefficientTable(a=n ** -1.5, b=np.zeros(512))
    assert abs(beta_critical(t32) - 1.0) <= 0.25
    # |a_n| = n^-2 moves the threshold to beta = 2
    t2 = CoefficientTable(a=n ** -2.0, b=np.zeros(512))
    assert abs(beta_critical(t2) - 2.0) <= 0.25
    assert beta_critical(coefficient_table(catalog_get("harmonic_koebe"), 256)) == 0.0


def test_block_rule_coheres_with_energy_blowup():
    # A table whose beta = 0 sum converges must have bounded derivative
    # energy toward the rim, and a strongly divergent one must not.
    n = np.arange(1, 513, dtype=float)
    tame = CoefficientTable(a=n ** -1.5, b=np.zeros(512))
    wild = CoefficientTable(a=np.ones(512), b=np.zeros(512))
    assert coefficient_sum(tame, 0.0).convergent
    assert not coefficient_sum(wild, 0.0).convergent

    def energy(table, r):
        idx = np.arange(1, table.order + 1)
        return float(np.sum(idx ** 2 * table.a ** 2 * r ** (2 * idx - 2)))

    assert energy(tame, 0.99) < 60.0
    assert energy(wild, 0.99) > 1e3
