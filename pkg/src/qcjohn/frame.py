"""Pointwise differential frame of a harmonic map and distortion checks.

For f = h + conj(g) the Wirtinger derivatives are f_z = h' and
f_zbar = conj(g'), so the operator norm of the differential is
|h'| + |g'|, the minimal stretch is ||h'| - |g'||, and the Jacobian is
|h'|^2 - |g'|^2.  ``local_k`` is the pointwise distortion
(|h'| + |g'|) / ||h'| - |g'||, infinite where the two stretches collide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSelfMap, NotSensePreserving
from .maps import HarmonicMap
from .margins import MarginReport, MarginSample

# Below this ratio of lnorm to opnorm the pointwise distortion is reported
# as infinity instead of a meaningless huge float.
_NEAR_CRITICAL = 1e-14


@dataclass(frozen=True)
class DerivativeFrame:
    """Differential data of a harmonic map at one point.

    ``dilatation`` and ``local_k`` are ``None`` where h' vanishes (critical
    point); ``local_k`` is ``math.inf`` where the minimal stretch underflows
    relative to the operator norm.
    """

    z: complex
    fz: complex
    fzbar: complex
    opnorm: float
    lnorm: float
    jacobian: float
    dilatation: complex | None
    local_k: float | None


def frame_fields(mapping: HarmonicMap, z) -> dict:
    """Vectorized frame data over an array of points.

    Returns a dict of arrays: ``fz``, ``fzbar``, ``opnorm``, ``lnorm``,
    ``jacobian``, ``dilatation`` (nan where undefined) and ``local_k``
    (inf where undefined or unbounded).
    """
    hj, gj = mapping.jets(z)
    fz = np.asarray(hj.d1)
    gz = np.asarray(gj.d1)
    afz = np.abs(fz)
    agz = np.abs(gz)
    opnorm = afz + agz
    lnorm = np.abs(afz - agz)
    jacobian = afz * afz - agz * agz
    with np.errstate(divide="ignore", invalid="ignore"):
        dilatation = np.where(fz != 0, gz / np.where(fz != 0, fz, 1.0), np.nan + 0j)
        local_k = np.where(
            lnorm > _NEAR_CRITICAL * opnorm, opnorm / np.maximum(lnorm, 1e-300), np.inf
        )
    return {
        "fz": fz,
        "fzbar": np.conj(gz),
        "opnorm": opnorm,
        "lnorm": lnorm,
        "jacobian": jacobian,
        "dilatation": dilatation,
        "local_k": local_k,
    }


def frame_at(mapping: HarmonicMap, z) -> DerivativeFrame:
    """Frame at a single point; critical points yield undefined fields."""
    hj, gj = mapping.jets(complex(z))
    fz = hj.d1
    fzbar = np.conj(gj.d1)
    opnorm = abs(fz) + abs(fzbar)
    lnorm = abs(abs(fz) - abs(fzbar))
    jacobian = abs(fz) ** 2 - abs(fzbar) ** 2
    if fz == 0:
        dilatation = None
        local_k = None
    else:
        dilatation = gj.d1 / fz
        if lnorm <= _NEAR_CRITICAL * opnorm:
            local_k = math.inf
        else:
            local_k = opnorm / lnorm
    return DerivativeFrame(
        z=complex(z), fz=complex(fz), fzbar=complex(fzbar),
        opnorm=float(opnorm), lnorm=float(lnorm), jacobian=float(jacobian),
        dilatation=None if dilatation is None else complex(dilatation),
        local_k=local_k,
    )


def opnorm_at(mapping: HarmonicMap, z):
    """|f_z| + |f_zbar| at scalar or array ``z`` (cheap field access)."""
    hj, gj = mapping.jets(z)
    return np.abs(hj.d1) + np.abs(gj.d1)


def polar_grid(n_radii: int = 64, n_angles: int = 128) -> np.ndarray:
    """Default evaluation grid: radii accumulate geometrically toward 1.

    r_k = 1 - 2**(-k/8) for k = 1..n_radii, times n_angles equispaced
    directions.  The geometric spacing matches the radial ladders used by
    every boundary-growth criterion.
    """
    k = np.arange(1, n_radii + 1)
    radii = 1.0 - 2.0 ** (-k / 8.0)
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return radii[:, None] * np.exp(1j * theta)[None, :]


def qc_constant(mapping: HarmonicMap, grid: np.ndarray | None = None) -> float:
    """Supremum of the pointwise distortion over a grid.

    Raises ``NotSensePreserving`` if the Jacobian is nonpositive anywhere on
    the grid.  For constant-dilatation maps this equals the true constant;
    in general it is a grid lower bound for it.
    """
    if grid is None:
        grid = polar_grid()
    fields = frame_fields(mapping, grid)
    if np.any(fields["jacobian"] <= 0):
        bad = np.asarray(grid)[fields["jacobian"] <= 0]
        raise NotSensePreserving(f"Jacobian <= 0 at {bad.ravel()[0]}")
    return float(np.max(fields["local_k"]))


def check_selfmap_distortion(
    mapping: HarmonicMap, k: float, samples, tol: float = 1e-9
) -> MarginReport:
    """Two-sided |f_z| bound for K-quasiconformal self-maps of the disk.

    At each sample the quantity Q = (1 - |f(z)|^2) / (1 - |z|^2) must satisfy
    (1+K)/(2K) * Q <= |f_z| <= (K+1)/2 * Q.  The report carries the lower
    margin |f_z| - (1+K)/(2K) Q and the upper margin (K+1)/2 Q - |f_z|;
    a sample passes iff both are >= -tol.  Raises ``NotSelfMap`` when an
    image point leaves the unit disk.
    """
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    hj, gj = mapping.jets(samples)
    fvals = hj.value + np.conj(gj.value)
    if np.any(np.abs(fvals) >= 1.0):
        bad = samples[np.abs(fvals) >= 1.0][0]
        raise NotSelfMap(f"|f({bad})| >= 1")
    q = (1.0 - np.abs(fvals) ** 2) / (1.0 - np.abs(samples) ** 2)
    afz = np.abs(hj.d1)
    lower = afz - (1.0 + k) / (2.0 * k) * q
    upper = (k + 1.0) / 2.0 * q - afz
    entries = [
        MarginSample(z=complex(zi), lower=float(lo), upper=float(up),
                     passed=bool(lo >= -tol and up >= -tol))
        for zi, lo, up in zip(samples, lower, upper)
    ]
    return MarginReport(label="selfmap-distortion", tol=tol, samples=tuple(entries))


def lower_growth_exponent_fit(
    mapping: HarmonicMap,
    rays=None,
    ladder=None,
    exponent_grid=None,
    slack: float = 1e-12,
) -> float:
    """Smallest grid exponent c for which the universal radial lower bound
    ``opnorm(r4) >= 2**-(1+c) * opnorm(r3) * ((1-r4)/(1-r3))**(c-1)``
    holds for every sampled radius pair on every ray.

    The exponent is searched on a fixed grid (0.05 step up to 8) so the
    verdict is reproducible; returns ``math.inf`` when no grid value works.
    """
    from .john import radius_ladder, unit_rays

    if rays is None:
        rays = unit_rays(64, extra=mapping.singular_rays)
    if ladder is None:
        ladder = radius_ladder(12)
    if exponent_grid is None:
        exponent_grid = np.arange(0.05, 8.0 + 1e-9, 0.05)
    rays = np.asarray(rays, dtype=complex).reshape(-1)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    pts = ladder[None, :] * rays[:, None]
    norms = opnorm_at(mapping, pts)

    i, j = np.triu_indices(ladder.size)
    keep = norms[:, i] > 0
    log_ratio = np.full(norms[:, i].shape, np.nan)
    log_ratio[keep] = np.log(norms[:, j][keep]) - np.log(norms[:, i][keep])
    log_x = np.log1p(-ladder[j]) - np.log1p(-ladder[i])
    ln2 = math.log(2.0)
    for c in exponent_grid:
        lhs = log_ratio + (1.0 + c) * ln2 - (c - 1.0) * log_x[None, :]
        if np.all(lhs[keep] >= -slack):
            return float(c)
    return math.inf
