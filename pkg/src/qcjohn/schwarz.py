"""Harmonic pre-Schwarzian and Schwarzian, boundary test, rectifiability.

For f = h + conj(g) with dilatation w = g'/h', the harmonic pre-Schwarzian
and Schwarzian are

    P_f = h''/h' - w' conj(w) / (1 - |w|^2)
    S_f = S_h + conj(w)/(1 - |w|^2) * ((h''/h') w' - w'') - 1.5 * (w' conj(w)/(1 - |w|^2))^2

with S_h = (h''/h')' - (h''/h')^2 / 2 the analytic Schwarzian.  When g
vanishes both reduce to their analytic counterparts.  The boundary test
estimates lim sup (1 - |z|^2) Re(z P_f(z)) from circle maxima; staying
strictly below 1 (with a margin a finite computation must carry) is the
sufficient condition for a radial John image that this module checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalPoint, DegenerateDilatation
from .geometry import radial_speed, _adaptive_integral
from .john import radius_ladder, unit_rays
from .maps import HarmonicMap
from .margins import MarginReport, MarginSample


@dataclass(frozen=True)
class SchwarzianData:
    """Pointwise second-order data of a harmonic map."""

    z: complex
    th: complex          # h''/h'
    sh: complex          # analytic Schwarzian of h
    pf: complex          # harmonic pre-Schwarzian
    sf: complex          # harmonic Schwarzian
    omega: complex
    omega1: complex
    omega2: complex


def _dilatation_jets(hj, gj):
    """omega, omega', omega'' from the jets of h and g (quotient rule)."""
    h1, h2, h3 = hj.d1, hj.d2, hj.d3
    g1, g2, g3 = gj.d1, gj.d2, gj.d3
    omega = g1 / h1
    omega1 = (g2 * h1 - g1 * h2) / h1 ** 2
    omega2 = (g3 * h1 - g1 * h3) / h1 ** 2 - 2.0 * h2 * (g2 * h1 - g1 * h2) / h1 ** 3
    return omega, omega1, omega2


def schwarzian_data(mapping: HarmonicMap, z: complex) -> SchwarzianData:
    """Pre-Schwarzian and Schwarzian of the map at one point.

    Raises ``CriticalPoint`` where h' vanishes and ``DegenerateDilatation``
    where |omega| >= 1 (the formulas divide by 1 - |omega|^2).
    """
    hj, gj = mapping.jets(complex(z))
    if hj.d1 == 0:
        raise CriticalPoint(f"h'({z}) = 0")
    th = hj.d2 / hj.d1
    sh = hj.d3 / hj.d1 - 1.5 * th * th
    omega, omega1, omega2 = _dilatation_jets(hj, gj)
    if abs(omega) >= 1.0:
        raise DegenerateDilatation(f"|omega({z})| >= 1")
    denom = 1.0 - abs(omega) ** 2
    corr = omega1 * np.conj(omega) / denom
    pf = th - corr
    sf = sh + np.conj(omega) / denom * (th * omega1 - omega2) - 1.5 * corr ** 2
    return SchwarzianData(
        z=complex(z), th=complex(th), sh=complex(sh), pf=complex(pf),
        sf=complex(sf), omega=complex(omega), omega1=complex(omega1),
        omega2=complex(omega2),
    )


def _pf_field(mapping: HarmonicMap, zs: np.ndarray) -> np.ndarray:
    hj, gj = mapping.jets(zs)
    th = hj.d2 / hj.d1
    omega, omega1, _ = _dilatation_jets(hj, gj)
    return th - omega1 * np.conj(omega) / (1.0 - np.abs(omega) ** 2)


@dataclass(frozen=True)
class BoundaryTestResult:
    """Circle maxima of (1 - r^2) Re(z P_f(z)) and the plateau estimate.

    ``estimate`` is the maximum over the last three ladder circles; the test
    passes when it stays below 1 by at least ``margin``.  No extrapolation is
    attempted: a finite computation certifies the strict inequality only up
    to a margin.
    """

    radii: np.ndarray
    maxima: np.ndarray
    estimate: float
    margin: float
    passed: bool

    def rows(self):
        return list(zip(self.radii, self.maxima))


def preschwarzian_boundary_test(
    mapping: HarmonicMap,
    ladder=None,
    n_angles: int = 256,
    margin: float = 0.05,
) -> BoundaryTestResult:
    """Estimate lim sup of (1 - |z|^2) Re(z P_f(z)) from circle maxima."""
    if ladder is None:
        ladder = radius_ladder(12)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    ladder = ladder[ladder > 0]
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    ring = np.exp(1j * theta)
    maxima = np.empty(ladder.size)
    for i, r in enumerate(ladder):
        zs = r * ring
        vals = (1.0 - r * r) * np.real(zs * _pf_field(mapping, zs))
        maxima[i] = vals.max()
    estimate = float(maxima[-3:].max())
    return BoundaryTestResult(
        radii=ladder, maxima=maxima, estimate=estimate, margin=margin,
        passed=bool(estimate < 1.0 - margin),
    )


@dataclass(frozen=True)
class RayRectifiability:
    ray: complex
    lengths: np.ndarray
    verdict: str  # "finite", "divergent", or "inconclusive"


def rectifiability_check(
    mapping: HarmonicMap,
    rays=None,
    ladder=None,
    cauchy_tol: float = 1e-3,
    rel_tol: float = 1e-9,
) -> list:
    """Per-ray verdict on the length of radial image curves.

    The cumulative lengths T_k up to the ladder radii are examined for
    Cauchy behavior: decreasing increments with a final increment below
    ``cauchy_tol`` relative to the total produce ``finite``; growing
    increments produce ``divergent``; anything else is ``inconclusive``
    (slowly convergent tails cannot be distinguished at fixed depth).
    """
    if rays is None:
        rays = unit_rays(16, extra=mapping.singular_rays)
    if ladder is None:
        ladder = radius_ladder(12)
    rays = np.asarray(rays, dtype=complex).reshape(-1)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    out = []
    for ray in rays:
        speed = radial_speed(mapping, ray)
        acc = 0.0
        lengths = [0.0]
        for k in range(1, ladder.size):
            acc += _adaptive_integral(speed, ladder[k - 1], ladder[k], rel_tol)
            lengths.append(acc)
        lengths = np.asarray(lengths)
        incr = np.diff(lengths[-4:])
        total = lengths[-1]
        if incr.size >= 2 and incr[-1] > 1.25 * incr[-2]:
            verdict = "divergent"
        elif incr[-1] <= cauchy_tol * (1.0 + total) and np.all(np.diff(incr) <= 0):
            verdict = "finite"
        else:
            verdict = "inconclusive"
        out.append(RayRectifiability(ray=complex(ray), lengths=lengths, verdict=verdict))
    return out


def schwarz_pick_check(
    mapping: HarmonicMap, samples, tol: float = 1e-12
) -> MarginReport:
    """Dilatation bound |omega'(z)| <= (1 - |omega(z)|^2) / (1 - |z|^2).

    The dilatation of a sense-preserving harmonic map is an analytic
    self-map of the disk, so it inherits the classical derivative bound;
    equality holds exactly for disk automorphisms.
    """
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    hj, gj = mapping.jets(samples)
    omega, omega1, _ = _dilatation_jets(hj, gj)
    if np.any(np.abs(omega) >= 1.0):
        bad = samples[np.abs(omega) >= 1.0][0]
        raise DegenerateDilatation(f"|omega({bad})| >= 1")
    bound = (1.0 - np.abs(omega) ** 2) / (1.0 - np.abs(samples) ** 2)
    slack = bound - np.abs(omega1)
    entries = [
        MarginSample(z=complex(zi), lower=float(s), upper=math.inf,
                     passed=bool(s >= -tol))
        for zi, s in zip(samples, slack)
    ]
    return MarginReport(label="dilatation-derivative-bound", tol=tol,
                        samples=tuple(entries))
