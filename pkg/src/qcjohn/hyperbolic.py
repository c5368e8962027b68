"""Hyperbolic metric on the disk and the distortion estimates built on it.

The two-point distance is computed through the pseudo-hyperbolic distance
with a log1p-stable artanh, so it stays accurate when points approach the
boundary.  The distortion checks compare |h'| and the frame norm against
envelopes driven by a configurable growth constant ``alpha`` (the supremum
of |h''(0)|/2 over the normalized class is finite but its sharp value is
unknown, so it is an input here, not a constant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParamOutOfRange
from .frame import opnorm_at
from .maps import HarmonicMap
from .margins import MarginReport, MarginSample

DEFAULT_ALPHA = 2.5


@dataclass(frozen=True)
class AlphaConfig:
    """Configured growth constant for the normalized-class envelopes.

    The default 2.5 is the second Taylor coefficient of the analytic part of
    the harmonic Koebe map; all alpha-dependent verdicts are reported
    relative to the configured value, never as absolute statements.
    """

    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ParamOutOfRange("alpha must be positive")


def _check_disk(*points):
    for p in points:
        if np.any(np.abs(np.asarray(p, dtype=complex)) >= 1.0):
            raise DomainError("hyperbolic metric is defined inside the unit disk")


def pseudo_hyperbolic(z1, z2):
    """|(z1 - z2) / (1 - conj(z1) z2)| for points of the open disk."""
    _check_disk(z1, z2)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    out = np.abs((z1 - z2) / (1.0 - np.conj(z1) * z2))
    return float(out) if out.ndim == 0 else out


def hyperbolic_distance(z1, z2):
    """Poincare distance; tanh of the result is the pseudo-hyperbolic distance."""
    p = pseudo_hyperbolic(z1, z2)
    # artanh(p) = 0.5 * log((1+p)/(1-p)), written with log1p for p near 1.
    out = 0.5 * np.log1p(2.0 * p / (1.0 - p))
    return float(out) if np.ndim(out) == 0 else out


def check_analytic_envelope(
    mapping: HarmonicMap, alpha: AlphaConfig, samples, tol: float = 1e-12
) -> MarginReport:
    """Two-sided envelope for |h'| of a normalized univalent harmonic map:

        (1-|z|)^(a-1) / (1+|z|)^(a+1)  <=  |h'(z)|  <=  (1+|z|)^(a-1) / (1-|z|)^(a+1)

    with a the configured alpha.  Margins are the slack on each side; the
    verdict is relative to the configured alpha.
    """
    a = alpha.alpha
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    _check_disk(samples)
    hj, _ = mapping.jets(samples)
    mod = np.abs(samples)
    lo = (1.0 - mod) ** (a - 1.0) / (1.0 + mod) ** (a + 1.0)
    hi = (1.0 + mod) ** (a - 1.0) / (1.0 - mod) ** (a + 1.0)
    val = np.abs(hj.d1)
    entries = [
        MarginSample(z=complex(zi), lower=float(v - l), upper=float(h - v),
                     passed=bool(v - l >= -tol and h - v >= -tol))
        for zi, v, l, h in zip(samples, val, lo, hi)
    ]
    return MarginReport(label="analytic-derivative-envelope", tol=tol,
                        samples=tuple(entries))


def check_frame_comparability(
    mapping: HarmonicMap, alpha: AlphaConfig, pairs, tol: float = 1e-12
) -> MarginReport:
    """Two-point comparability of the frame norm through the disk metric:

        0.5 * N(z1) * q**(1+a) <= N(z2) <= 2 * N(z1) * q**-(1+a)

    with q = (1 - p)/(1 + p) and p the pseudo-hyperbolic distance of the
    pair (q = exp(-2 * lambda) for the hyperbolic distance lambda).  This is
    the factor the derivative envelope yields after moving one point to the
    origin by a disk automorphism; a single-lambda exponent would be
    strictly stronger and fails numerically already for conformal members
    of the class.
    """
    a = alpha.alpha
    entries = []
    for z1, z2 in pairs:
        p = pseudo_hyperbolic(z1, z2)
        q = (1.0 - p) / (1.0 + p)
        n1 = float(opnorm_at(mapping, complex(z1)))
        n2 = float(opnorm_at(mapping, complex(z2)))
        lo = 0.5 * n1 * q ** (1.0 + a)
        hi = 2.0 * n1 * q ** -(1.0 + a)
        entries.append(MarginSample(
            z=complex(z1), lower=n2 - lo, upper=hi - n2,
            passed=bool(n2 - lo >= -tol and hi - n2 >= -tol),
        ))
    return MarginReport(label="frame-comparability", tol=tol, samples=tuple(entries))


def neighborhood_comparability_constant(
    a1: float, a2: float, a3: float, alpha: AlphaConfig
) -> float:
    """Frame-comparability constant for a boundary box neighborhood.

    For base point at distance delta from the boundary and any point of the
    annular box {1 - a2*delta <= |z| <= 1 - a1*delta, angular offset <=
    a3*delta}, the frame norms are comparable within the factor

        2 * exp((1 + alpha) * (a3 + 0.5 * log((2*a2 - a1) / a1))).
    """
    if not (a1 > 0 and a2 >= a1 and a3 >= 0):
        raise ParamOutOfRange("need a1 > 0, a2 >= a1, a3 >= 0")
    return 2.0 * math.exp(
        (1.0 + alpha.alpha) * (a3 + 0.5 * math.log((2.0 * a2 - a1) / a1))
    )
