"""John-disk diagnostics: radial constants, decay fits, box criteria, tails.

Every criterion here contrasts boundary-approach growth of the map against
distance-to-boundary in the image.  Sampling runs over a geometric radius
ladder r_k = 1 - 2**-k and a fan of boundary rays (declared singular
directions are always included).  Suprema over a ladder can only be
observed, not proven, so divergence is reported by two documented numeric
triggers:

* blowup: the running supremum grows more than ``blowup_factor`` across the
  last two ladder levels, and
* non-saturation: a geometric extrapolation of the recent increments
  projects more than ``saturation_tol`` of remaining growth (with a
  ``growth_floor`` below which drift never counts).

All thresholds live in :class:`JohnThresholds` and are echoed into every
report so a verdict can be reproduced exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergentTail, UnboundedImage
from .frame import opnorm_at, qc_constant
from .geometry import (
    ImageGeometry,
    boundary_mesh,
    diam_image_of_arc,
    diam_image_of_box,
    diameter_of_points,
    dist_to_boundary,
    radial_speed,
    refined_boundary_distance,
    _adaptive_integral,
)
from .maps import HarmonicMap
from .margins import MarginReport, MarginSample, _num


def radius_ladder(depth: int = 12) -> np.ndarray:
    """Geometric radius ladder r_k = 1 - 2**-k for k = 0..depth."""
    if depth < 1:
        raise ValueError("ladder depth must be positive")
    return 1.0 - 2.0 ** (-np.arange(depth + 1, dtype=float))


def unit_rays(n: int = 64, extra=()) -> np.ndarray:
    """n equispaced boundary directions plus any extra (e.g. singular) rays."""
    base = np.exp(2j * np.pi * np.arange(int(n)) / int(n))
    extras = np.asarray(list(extra), dtype=complex)
    if extras.size:
        extras = extras / np.abs(extras)
        base = np.concatenate([base, extras])
    angles = np.round(np.angle(base), 12)
    _, keep = np.unique(angles, return_index=True)
    out = base[np.sort(keep)]
    return out[np.argsort(np.round(np.angle(out), 12))]


@dataclass(frozen=True)
class JohnThresholds:
    """Numeric decision rules shared by every divergence-prone supremum."""

    blowup_factor: float = 10.0
    saturation_tol: float = 0.10
    growth_floor: float = 0.05
    growth_window: int = 3
    stability_tol: float = 0.10
    delta_floor: float = 0.01

    def to_jsonable(self) -> dict:
        return {
            "blowup_factor": self.blowup_factor,
            "saturation_tol": self.saturation_tol,
            "growth_floor": self.growth_floor,
            "growth_window": self.growth_window,
            "stability_tol": self.stability_tol,
            "delta_floor": self.delta_floor,
        }


@dataclass(frozen=True)
class JohnConfig:
    """Sampling resolution for the John diagnostics."""

    ladder_depth: int = 12
    rays: int = 64
    epsilon: float = 1e-3
    mesh_n: int = 2048
    alpha: float = 2.5
    box_samples: int = 48
    pairs_per_circle: int = 512
    pommerenke_fine: int = 4096
    pommerenke_radii: tuple = (0.25, 0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375)
    thresholds: JohnThresholds = field(default_factory=JohnThresholds)

    def doubled(self) -> "JohnConfig":
        """One refinement doubling: rays, meshes, box sampling, and circle
        discretization all double; the subarc pair anchors stay fixed so the
        connection-distance family remains comparable across refinements."""
        return replace(
            self,
            rays=2 * self.rays,
            mesh_n=2 * self.mesh_n,
            box_samples=2 * self.box_samples,
            pommerenke_fine=2 * self.pommerenke_fine,
        )


def flagged_divergent(level_sups, thresholds: JohnThresholds) -> bool:
    """Apply the blowup and non-saturation triggers to per-level suprema.

    Blowup: the running supremum grows more than ``blowup_factor`` across
    the last two levels.  Non-saturation: the recent increments of the
    running supremum are extrapolated geometrically; if they are not
    shrinking (ratio >= 1) or the projected remaining growth exceeds
    ``saturation_tol`` of the current value, the supremum is treated as
    divergent.  Saturating sequences (increments dying geometrically, as a
    finite supremum sampled on a geometric ladder produces) pass untouched.
    """
    if any(not np.isfinite(v) for v in level_sups):
        return True
    vals = [v for v in level_sups if v > 0]
    if len(vals) < 3:
        return False
    running = np.maximum.accumulate(np.asarray(vals, dtype=float))
    if running[-1] > thresholds.blowup_factor * running[-3]:
        return True
    incr = np.diff(running)
    w = min(thresholds.growth_window, incr.size)
    if w < 2:
        return False
    recent = incr[-w:]
    flat = 1e-9 * running[-1]
    if recent[-1] <= flat or np.any(recent <= 0.0):
        return False
    # Immaterial drift is never divergence, whatever its shape.
    if running[-1] / running[-1 - w] - 1.0 < thresholds.growth_floor:
        return False
    # The decay rate is the minimum of the recent increment ratios: a
    # supremum realized as a max over saturating branches can show one
    # spuriously large ratio when the active branch switches, but not two.
    ratios = recent[1:] / recent[:-1]
    q = float(ratios.min())
    if q >= 1.0:
        return True
    projected = recent[-1] * q / (1.0 - q)
    return projected > thresholds.saturation_tol * running[-1]


def _cumulative_lengths(mapping, rays, ladder, rel_tol=1e-9) -> np.ndarray:
    """lengths[i, k] = image length of [0, r_k] along ray i."""
    out = np.zeros((len(rays), len(ladder)))
    for i, ray in enumerate(rays):
        speed = radial_speed(mapping, ray)
        acc = 0.0
        for k in range(1, len(ladder)):
            acc += _adaptive_integral(speed, ladder[k - 1], ladder[k], rel_tol)
            out[i, k] = acc
    return out


def radial_john_constant(
    mapping: HarmonicMap,
    geom: ImageGeometry,
    rays=None,
    ladder=None,
    thresholds: JohnThresholds | None = None,
) -> float:
    """Supremum of remaining-length over distance-to-boundary on radial images.

    For base radius r and outer radius rho on a common ray, the ratio is
    (image length of [r, rho]) / d(f(r), boundary), with the depth-refined
    boundary distance in the denominator.  Returns ``math.inf`` when a
    divergence trigger fires.
    """
    thresholds = thresholds or JohnThresholds()
    if rays is None:
        rays = unit_rays(64, extra=mapping.singular_rays)
    if ladder is None:
        ladder = radius_ladder(12)
    rays = np.asarray(rays, dtype=complex).reshape(-1)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    lengths = _cumulative_lengths(mapping, rays, ladder)
    dists = np.empty((rays.size, ladder.size))
    for a, ray in enumerate(rays):
        for b, r in enumerate(ladder):
            dists[a, b] = refined_boundary_distance(mapping, geom, r * ray)

    per_ray = np.empty((rays.size, ladder.size - 1))
    for k in range(1, ladder.size):
        sigma = lengths[:, k][:, None] - lengths[:, :k]
        per_ray[:, k - 1] = (sigma / dists[:, :k]).max(axis=1)
    level_sups = per_ray.max(axis=0)
    # Divergence along any single ray must not be masked by a larger but
    # saturating supremum on other rays, so every ray profile is tested.
    if flagged_divergent(level_sups, thresholds):
        return math.inf
    if any(flagged_divergent(row, thresholds) for row in per_ray):
        return math.inf
    return float(level_sups.max(initial=0.0))


@dataclass(frozen=True)
class JohnFit:
    """Fitted decay exponent and constant for the radial derivative bound
    ``opnorm(rho * zeta) <= m_hat * opnorm(r * zeta) * x**(delta_hat - 1)``
    with x = (1 - rho)/(1 - r).

    ``delta_raw`` is the unclipped exponent; ``max_ratio`` is the raw
    supremum of opnorm ratios (the constant of the trivial exponent-1 bound)
    which grows without bound exactly when no positive exponent works.
    Every sampled pair satisfies the fitted bound by construction.
    """

    delta_hat: float
    m_hat: float
    worst_ray: complex
    worst_pair: tuple
    violation_curve: np.ndarray
    max_ratio: float
    delta_raw: float


def radial_decay_fit(
    mapping: HarmonicMap,
    rays=None,
    ladder=None,
    delta_floor: float = 0.01,
) -> JohnFit:
    """Fit the boundary decay exponent of the frame norm along rays.

    delta_hat = min(1, 1 + inf over pairs with x < 1/2 of log R / log x),
    clipped below at ``delta_floor``; m_hat is the supremum of
    R / x**(delta_hat - 1) over all sampled pairs.
    """
    if rays is None:
        rays = unit_rays(64, extra=mapping.singular_rays)
    if ladder is None:
        ladder = radius_ladder(12)
    rays = np.asarray(rays, dtype=complex).reshape(-1)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    pts = ladder[None, :] * rays[:, None]
    norms = np.asarray(opnorm_at(mapping, pts), dtype=float)

    i, j = np.triu_indices(ladder.size, k=1)
    x = (1.0 - ladder[j]) / (1.0 - ladder[i])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = norms[:, j] / norms[:, i]
    valid = np.isfinite(ratio) & (ratio > 0)
    log_x = np.log(x)

    slope_mask = valid & (x[None, :] < 0.5)
    delta_raw = 1.0
    worst_ray = complex(rays[0])
    worst_pair = (float(ladder[0]), float(ladder[-1]))
    ray_index = 0
    if np.any(slope_mask):
        slopes = np.where(
            slope_mask, np.log(np.where(valid, ratio, 1.0)) / log_x[None, :], np.inf
        )
        flat = int(np.argmin(slopes))
        ray_index, pair_index = np.unravel_index(flat, slopes.shape)
        delta_raw = 1.0 + float(slopes[ray_index, pair_index])
        worst_ray = complex(rays[ray_index])
        worst_pair = (float(ladder[i[pair_index]]), float(ladder[j[pair_index]]))
    delta_hat = min(1.0, max(delta_floor, delta_raw))

    bound_pow = x[None, :] ** (delta_hat - 1.0)
    fitted = np.where(valid, ratio / bound_pow, 0.0)
    m_hat = float(fitted.max())
    max_ratio = float(np.where(valid, ratio, 0.0).max())

    order = np.argsort(x)
    curve = np.column_stack([x[order], ratio[ray_index][order]])
    return JohnFit(
        delta_hat=delta_hat,
        m_hat=m_hat,
        worst_ray=worst_ray,
        worst_pair=worst_pair,
        violation_curve=curve,
        max_ratio=max_ratio,
        delta_raw=delta_raw,
    )


def box_diameter_sup(
    mapping: HarmonicMap,
    geom: ImageGeometry,
    rays=None,
    ladder=None,
    box_samples: int = 48,
    thresholds: JohnThresholds | None = None,
) -> float:
    """Supremum over base points of diam f(box) / d(f(z), boundary)."""
    thresholds = thresholds or JohnThresholds()
    if rays is None:
        rays = unit_rays(64, extra=mapping.singular_rays)
    if ladder is None:
        ladder = radius_ladder(12)
    rays = np.asarray(rays, dtype=complex).reshape(-1)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)

    def box_ratio(z: complex) -> float:
        diam = diam_image_of_box(mapping, z, box_samples)
        return diam / refined_boundary_distance(mapping, geom, z)

    per_ray = np.empty((rays.size, ladder.size))
    for b, r in enumerate(ladder):
        if r == 0:
            per_ray[:, b] = box_ratio(0.0 + 0.0j)
            continue
        for a, ray in enumerate(rays):
            per_ray[a, b] = box_ratio(complex(r * ray))

    # Fixed rays can miss base points whose angular offset from a cusp
    # direction shrinks with the depth, so each singular direction also
    # gets probes at angles proportional to 1 - r.
    probe_rows = []
    for sing in mapping.singular_rays:
        phi0 = math.atan2(complex(sing).imag, complex(sing).real)
        for mult in (-1.0, -0.5, 0.5, 1.0):
            row = []
            for r in ladder:
                if r == 0:
                    row.append(per_ray[0, 0])
                    continue
                z = r * np.exp(1j * (phi0 + mult * math.pi * (1.0 - r)))
                row.append(box_ratio(complex(z)))
            probe_rows.append(row)

    all_rows = [row for row in per_ray] + probe_rows
    level_sups = np.max(np.asarray(all_rows), axis=0)
    if flagged_divergent(level_sups, thresholds):
        return math.inf
    if any(flagged_divergent(row, thresholds) for row in all_rows):
        return math.inf
    return float(level_sups.max(initial=0.0))


def _chords_cross_polyline(w1s, w2s, poly, trim: float = 0.02):
    """Whether each chord (trimmed 2% off the endpoints) properly crosses
    any edge of the closed polyline.

    The trim keeps the test meaningful when the chord endpoints lie on the
    curve itself; the strict sign tests ignore touching contacts.
    """
    p = w1s + trim * (w2s - w1s)
    q = w2s - trim * (w2s - w1s)
    a = poly
    b = np.roll(poly, -1)

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    r = (q - p)[:, None]
    s = (b - a)[None, :]
    ap = a[None, :] - p[:, None]
    d1 = cross(r, ap)
    d2 = cross(r, b[None, :] - p[:, None])
    e1 = cross(s, -ap)
    e2 = cross(s, q[:, None] - a[None, :])
    return np.any((d1 * d2 < 0) & (e1 * e2 < 0), axis=1)


def _mask_path_diameter(mask, xs, ys, w1, w2):
    """Diameter of an inside-the-mask grid path from w1 to w2 (or None)."""
    n_y, n_x = mask.shape

    def locate(w):
        ix = int(np.clip(round((w.real - xs[0]) / (xs[1] - xs[0])), 0, n_x - 1))
        iy = int(np.clip(round((w.imag - ys[0]) / (ys[1] - ys[0])), 0, n_y - 1))
        for radius in range(6):
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    jx, jy = ix + dx, iy + dy
                    if 0 <= jx < n_x and 0 <= jy < n_y and mask[jy, jx]:
                        return jx, jy
        return None

    start = locate(w1)
    goal = locate(w2)
    if start is None or goal is None:
        return None
    prev = {start: None}
    queue = deque([start])
    found = False
    while queue:
        cur = queue.popleft()
        if cur == goal:
            found = True
            break
        cx, cy = cur
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                nxt = (cx + dx, cy + dy)
                if nxt in prev:
                    continue
                jx, jy = nxt
                if 0 <= jx < n_x and 0 <= jy < n_y and mask[jy, jx]:
                    prev[nxt] = cur
                    queue.append(nxt)
    if not found:
        return None
    pts = [w1, w2]
    node = goal
    while node is not None:
        pts.append(xs[node[0]] + 1j * ys[node[1]])
        node = prev[node]
    cell = math.hypot(xs[1] - xs[0], ys[1] - ys[0])
    return diameter_of_points(np.asarray(pts)) + cell


def pommerenke_interior(
    mapping: HarmonicMap,
    radii=None,
    pairs_per_circle: int = 512,
    thresholds: JohnThresholds | None = None,
    n_fine: int | None = None,
):
    """Bracket for the supremum of subarc length over connection diameter.

    For sampled pairs w1, w2 on the image of |z| = r, the numerator is the
    length of the smaller image subarc; the connection diameter is bracketed
    below by |w1 - w2| and above by the diameter of an explicit connecting
    path (the chord when it verifiably stays inside, otherwise a grid path).
    Returns ``(lo, hi)`` bracketing the double supremum, or ``math.inf``
    when the certified lower end diverges across the radius levels.
    """
    from .geometry import erode_mask, mask_lookup, rasterize_region

    thresholds = thresholds or JohnThresholds()
    if not mapping.bounded_image:
        raise UnboundedImage(f"map {mapping.label!r} is not flagged bounded")
    if radii is None:
        radii = (0.25, 0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375)
    pairs_per_circle = int(pairs_per_circle)

    if n_fine is None:
        n_fine = max(4096, 8 * pairs_per_circle)
    n_fine = int(n_fine)

    lo_levels = []
    hi_levels = []
    for r in radii:
        if r <= 0.0:
            continue
        theta = np.linspace(0.0, 2.0 * np.pi, n_fine, endpoint=False)
        zs = r * np.exp(1j * theta)
        hj, gj = mapping.jets(zs)
        pts = hj.value + np.conj(gj.value)
        speed = r * np.abs(np.exp(1j * theta) * hj.d1 - np.exp(-1j * theta) * np.conj(gj.d1))
        dtheta = 2.0 * np.pi / n_fine
        seg = 0.5 * (speed + np.roll(speed, -1)) * dtheta
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        total = cum[-1]

        mask, xs, ys = rasterize_region(pts, n=512)
        safe_mask = erode_mask(mask)
        coarse = mask.reshape(128, 4, 128, 4).all(axis=(1, 3))
        coarse_xs = xs.reshape(128, 4).mean(axis=1)
        coarse_ys = ys.reshape(128, 4).mean(axis=1)
        circle_diam = diameter_of_points(pts[:: max(1, n_fine // 1024)])
        test_poly = pts[:: max(1, n_fine // 2048)]

        step = n_fine // pairs_per_circle
        base = np.arange(pairs_per_circle) * step
        offsets = [2 ** p for p in range(int(math.log2(pairs_per_circle)) + 1)]

        lo_best = 0.0
        hi_best = 0.0
        for off in offsets:
            partner = (base + off * step) % n_fine
            arcs_raw = np.abs(cum[partner] - cum[base])
            arcs = np.minimum(arcs_raw, total - arcs_raw)
            w1 = pts[base]
            w2 = pts[partner]
            chord = np.abs(w1 - w2)
            ok = chord > 0
            # The chord is an admissible connecting arc iff it does not
            # cross the image circle (touching at its own endpoints is
            # fine) and its midpoint really is on the inside.
            crosses = _chords_cross_polyline(w1, w2, test_poly)
            mid_in = mask_lookup(safe_mask, xs, ys, 0.5 * (w1 + w2))
            admissible = ok & ~crosses & mid_in
            hi_d = np.where(admissible, chord, np.nan)
            for idx in np.flatnonzero(ok & ~admissible):
                via = _mask_path_diameter(coarse, coarse_xs, coarse_ys, w1[idx], w2[idx])
                hi_d[idx] = max(chord[idx], via) if via is not None else circle_diam
            with np.errstate(divide="ignore", invalid="ignore"):
                lo_ratio = np.where(ok, arcs / hi_d, 0.0)
                hi_ratio = np.where(ok, arcs / np.where(ok, chord, 1.0), 0.0)
            lo_best = max(lo_best, float(np.nanmax(lo_ratio)))
            hi_best = max(hi_best, float(np.nanmax(hi_ratio)))
        lo_levels.append(lo_best)
        hi_levels.append(hi_best)

    if flagged_divergent(lo_levels, thresholds):
        return math.inf
    return (float(max(lo_levels, default=0.0)), float(max(hi_levels, default=0.0)))


@dataclass(frozen=True)
class ArcBoundResult:
    """Outcome of the boundary-arc diameter bound at one base point."""

    status: str  # "pass", "fail", or "hypothesis-violation"
    lhs: float
    rhs: float
    constant: float
    margin: float


def arc_bound_constant(k: float, alpha: float, m_const: float, delta: float) -> float:
    """Arc-diameter bound constant 32K(2e^(1+a) + 2Me^(1+a)/delta + M/delta)."""
    e_term = 2.0 * math.exp(1.0 + alpha)
    return 32.0 * k * (e_term + m_const * e_term / delta + m_const / delta)


def check_arc_diameter_bound(
    mapping: HarmonicMap,
    geom: ImageGeometry,
    a: complex,
    m_const: float,
    delta: float,
    alpha: float,
    k: float,
    delta_floor: float = 0.01,
) -> ArcBoundResult:
    """Verify diam f(arc at a) <= constant * d(f(a), boundary).

    The constant is valid only when the supplied (m_const, delta) actually
    satisfy the radial decay bound; a delta at the failing floor or a
    non-finite m_const reports a hypothesis violation instead of a verdict.
    """
    if not math.isfinite(m_const) or delta <= delta_floor:
        return ArcBoundResult(
            status="hypothesis-violation",
            lhs=math.nan, rhs=math.nan,
            constant=math.nan, margin=math.nan,
        )
    const = arc_bound_constant(k, alpha, m_const, delta)
    lhs = diam_image_of_arc(mapping, a, epsilon=geom.epsilon)
    rhs = const * float(dist_to_boundary(geom, complex(mapping.eval(a))))
    return ArcBoundResult(
        status="pass" if lhs <= rhs else "fail",
        lhs=lhs, rhs=rhs, constant=const, margin=rhs - lhs,
    )


@dataclass(frozen=True)
class TailDiagnostics:
    """Radial tail integrals along one ray.

    Per ladder radius r: T = integral of opnorm over [r, 1), E = integral of
    (1 - x) * opnorm^2, and the scaled tail S = (1 - r)**(-1/m0) * T which
    must be nonincreasing whenever T <= m0 (1 - r) opnorm(r).
    """

    ray: complex
    radii: np.ndarray
    t_vals: np.ndarray
    e_vals: np.ndarray
    s_vals: np.ndarray
    m0: float
    bound_ok: tuple
    s_nonincreasing: bool

    def rows(self):
        return list(zip(self.radii, self.t_vals, self.e_vals, self.s_vals))


def tail_diagnostics(
    mapping: HarmonicMap,
    zeta: complex,
    ladder=None,
    m0: float | None = None,
    c: float | None = None,
    k: float | None = None,
    tail_eps: float = 1e-6,
    rel_tol: float = 1e-9,
) -> TailDiagnostics:
    """Tail integrals of the frame norm along a ray, with the scaled-tail check.

    ``m0`` defaults to 4 c K^2 / (1 + K) from a supplied (or implied) radial
    John constant and distortion bound; the integrals are truncated at
    1 - tail_eps with an endpoint tail estimate added.
    """
    if not mapping.bounded_image:
        raise DivergentTail(f"map {mapping.label!r} is not flagged bounded")
    if ladder is None:
        ladder = radius_ladder(12)
    ladder = np.asarray(ladder, dtype=float).reshape(-1)
    if m0 is None:
        if c is None or k is None:
            raise ValueError("supply m0 or both c and k")
        m0 = 4.0 * c * k * k / (1.0 + k)
    zeta = complex(zeta) / abs(complex(zeta))
    speed_fn = radial_speed(mapping, zeta)

    def opn(t):
        return np.asarray(opnorm_at(mapping, np.asarray(t) * zeta), dtype=float)

    def energy(t):
        n = opn(t)
        return (1.0 - np.asarray(t)) * n * n

    top = 1.0 - tail_eps
    grid = np.concatenate([ladder[ladder < top], [top]])
    t_segments = [
        _adaptive_integral(opn, grid[i], grid[i + 1], rel_tol)
        for i in range(grid.size - 1)
    ]
    e_segments = [
        _adaptive_integral(energy, grid[i], grid[i + 1], rel_tol)
        for i in range(grid.size - 1)
    ]
    n_top = float(opn(np.array([top]))[0])
    t_tail = tail_eps * n_top
    e_tail = 0.5 * tail_eps ** 2 * n_top ** 2
    t_cum = np.concatenate([[0.0], np.cumsum(t_segments)])
    e_cum = np.concatenate([[0.0], np.cumsum(e_segments)])
    t_total = t_cum[-1] + t_tail
    e_total = e_cum[-1] + e_tail

    radii = ladder[ladder < top]
    t_vals = t_total - t_cum[: radii.size]
    e_vals = e_total - e_cum[: radii.size]
    s_vals = (1.0 - radii) ** (-1.0 / m0) * t_vals
    norms = opn(radii)
    bound_ok = tuple(
        bool(t <= m0 * (1.0 - r) * n * (1.0 + 1e-9) + 1e-12)
        for r, t, n in zip(radii, t_vals, norms)
    )
    slack = 1e-9 * (1.0 + np.abs(s_vals[:-1]))
    s_noninc = bool(np.all(s_vals[1:] <= s_vals[:-1] + slack))
    return TailDiagnostics(
        ray=zeta, radii=radii, t_vals=t_vals, e_vals=e_vals, s_vals=s_vals,
        m0=float(m0), bound_ok=bound_ok, s_nonincreasing=s_noninc,
    )


def check_frame_distance_bound(
    mapping: HarmonicMap,
    geom: ImageGeometry,
    samples,
    k: float | None = None,
    tol: float = 0.0,
) -> MarginReport:
    """Two-sided bound (1+K)/(2K) <= (1-|z|^2) opnorm / d(f(z)) <= 16K."""
    if k is None:
        k = mapping.known_k if mapping.known_k is not None else qc_constant(mapping)
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    hj, gj = mapping.jets(samples)
    ws = hj.value + np.conj(gj.value)
    dists = np.atleast_1d(dist_to_boundary(geom, ws))
    opn = np.abs(hj.d1) + np.abs(gj.d1)
    ratio = (1.0 - np.abs(samples) ** 2) * opn / dists
    lo = (1.0 + k) / (2.0 * k)
    hi = 16.0 * k
    entries = [
        MarginSample(z=complex(zi), lower=float(rt - lo), upper=float(hi - rt),
                     passed=bool(rt - lo >= -tol and hi - rt >= -tol))
        for zi, rt in zip(samples, ratio)
    ]
    return MarginReport(label="frame-distance-bound", tol=tol, samples=tuple(entries))


@dataclass(frozen=True)
class JohnReport:
    """Consolidated verdict for one map.

    ``verdict`` is ``john-consistent`` only when every finite component is
    stable (relative change below the stability tolerance) under one
    refinement doubling; any divergence trigger or an exponent fit that
    keeps sliding down between the half-depth and full-depth ladders yields
    ``john-failing``.  In the failing branch the reported exponent is the
    failing floor and the reported constant is the raw ratio supremum,
    which grows without bound under ladder refinement; the raw fits stay
    available in ``fit_full`` / ``fit_half``.
    """

    label: str
    c: float
    m1: float
    delta_hat: float
    m_hat: float
    mgamma: tuple | float
    verdict: str
    config: JohnConfig
    fit_full: JohnFit
    fit_half: JohnFit
    k_hat: float
    stability: dict

    def to_jsonable(self) -> dict:
        if isinstance(self.mgamma, tuple):
            mg = [_num(self.mgamma[0]), _num(self.mgamma[1])]
        else:
            mg = _num(self.mgamma)
        return {
            "label": self.label,
            "c": _num(self.c),
            "M1": _num(self.m1),
            "delta_hat": _num(self.delta_hat),
            "M_hat": _num(self.m_hat),
            "Mgamma": mg,
            "verdict": self.verdict,
            "config": {
                "ladder": [float(r) for r in radius_ladder(self.config.ladder_depth)],
                "rays": self.config.rays,
                "epsilon": self.config.epsilon,
                "alpha": self.config.alpha,
                "thresholds": self.config.thresholds.to_jsonable(),
            },
        }


def _mgamma_hi(value) -> float:
    if isinstance(value, tuple):
        return value[1]
    return value


def _john_pass(mapping: HarmonicMap, config: JohnConfig):
    geom = boundary_mesh(mapping, config.epsilon, config.mesh_n)
    rays = unit_rays(config.rays, extra=mapping.singular_rays)
    ladder = radius_ladder(config.ladder_depth)
    c = radial_john_constant(mapping, geom, rays, ladder, config.thresholds)
    b_sup = box_diameter_sup(
        mapping, geom, rays, ladder, config.box_samples, config.thresholds
    )
    mgamma = pommerenke_interior(
        mapping, config.pommerenke_radii, config.pairs_per_circle,
        config.thresholds, max(config.pommerenke_fine, 8 * config.pairs_per_circle),
    )
    return geom, c, b_sup, mgamma


def john_report(mapping: HarmonicMap, config: JohnConfig | None = None) -> JohnReport:
    """Run all John diagnostics for one bounded map and assemble the verdict."""
    config = config or JohnConfig()
    thresholds = config.thresholds
    rays = unit_rays(config.rays, extra=mapping.singular_rays)
    fit_full = radial_decay_fit(
        mapping, rays, radius_ladder(config.ladder_depth), thresholds.delta_floor
    )
    fit_half = radial_decay_fit(
        mapping, rays, radius_ladder(max(4, config.ladder_depth // 2)),
        thresholds.delta_floor,
    )
    geom, c, b_sup, mgamma = _john_pass(mapping, config)

    k_hat = mapping.known_k if mapping.known_k is not None else qc_constant(mapping)
    fit_sliding = (
        fit_half.delta_hat - fit_full.delta_hat
        > thresholds.stability_tol * max(fit_half.delta_hat, thresholds.delta_floor)
    )
    diverged = (
        not math.isfinite(c)
        or not math.isfinite(b_sup)
        or not (isinstance(mgamma, tuple) and math.isfinite(mgamma[1]))
        or fit_full.delta_hat <= thresholds.delta_floor
    )

    stability = {}
    if diverged or fit_sliding:
        verdict = "john-failing"
        delta_rep = thresholds.delta_floor
        m_rep = fit_full.max_ratio
    else:
        delta_rep = fit_full.delta_hat
        m_rep = fit_full.m_hat
        _, c2, b2, mg2 = _john_pass(mapping, config.doubled())
        stability = {
            "c": _rel_change(c, c2),
            "M1": _rel_change(b_sup, b2),
            "Mgamma_hi": _rel_change(_mgamma_hi(mgamma), _mgamma_hi(mg2)),
        }
        stable = all(
            v is not None and v < thresholds.stability_tol for v in stability.values()
        )
        verdict = "john-consistent" if stable else "inconclusive"

    return JohnReport(
        label=mapping.label,
        c=c,
        m1=b_sup,
        delta_hat=delta_rep,
        m_hat=m_rep,
        mgamma=mgamma,
        verdict=verdict,
        config=config,
        fit_full=fit_full,
        fit_half=fit_half,
        k_hat=float(k_hat),
        stability=stability,
    )


def _rel_change(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        return None
    denom = max(abs(a), 1e-12)
    return abs(b - a) / denom
