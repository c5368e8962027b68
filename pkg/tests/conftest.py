"""Shared fixtures: catalog maps, meshes, and the (expensive) John reports."""

import numpy as np
import pytest

from qcjohn import JohnConfig, boundary_mesh, catalog_get, john_report

# The six bounded catalog base entries; every John-verdict comparison runs
# over this list (unbounded entries cannot mesh their image boundary).
BOUNDED_SET = (
    ("identity", {}),
    ("affine", {"a": 0.5}),
    ("shear_omega_bz", {"b": 0.5}),
    ("cardioid", {}),
    ("lune", {}),
    ("automorphism", {"a": 0.3}),
)

ALL_CATALOG = BOUNDED_SET + (
    ("koebe", {}),
    ("harmonic_koebe", {}),
    ("scaled", {"inner": "harmonic_koebe", "r": 0.5}),
)


def disk_samples(rng, count, r_max=0.8):
    radii = np.sqrt(rng.uniform(0.0, r_max ** 2, count))
    return radii * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, count))


@pytest.fixture(scope="session")
def catalog_maps():
    return {name: catalog_get(name, **params) for name, params in ALL_CATALOG}


@pytest.fixture(scope="session")
def bounded_maps(catalog_maps):
    return {name: catalog_maps[name] for name, _ in BOUNDED_SET}


@pytest.fixture(scope="session")
def meshes(bounded_maps):
    return {
        name: boundary_mesh(mapping, 1e-3, 2048)
        for name, mapping in bounded_maps.items()
    }


@pytest.fixture(scope="session")
def john_reports(bounded_maps):
    """Full John reports for the bounded catalog at the default resolution."""
    return {
        name: john_report(mapping, JohnConfig())
        for name, mapping in bounded_maps.items()
    }
