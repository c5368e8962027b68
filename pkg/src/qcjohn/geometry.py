"""Image-side geometry: boundary meshes, distances, arclength, diameters.

The image boundary is discretized as a closed polyline traced at radius
1 - epsilon; all distance queries are made against that polyline and every
report should therefore budget an O(epsilon * sup opnorm) correction near
the boundary.  Arclength along radial image curves uses an adaptive
nested Gauss pair with interval bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from matplotlib.path import Path as _MplPath
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    OutsideDomain,
    QuadratureFailure,
    RefinementOverflow,
    UnboundedImage,
)
from .maps import HarmonicMap

_MAX_MESH_VERTICES = 2 ** 20
_REFINE_FRACTION = 256  # refine edges longer than bbox diagonal / 256


@dataclass(frozen=True)
class ImageGeometry:
    """Sampled image boundary f((1 - epsilon) * e^{i theta}).

    ``boundary`` is a closed polyline (the segment from the last vertex back
    to the first is implicit).  ``orientation`` is +1 for a counterclockwise
    trace, which sense-preserving maps produce.
    """

    boundary: np.ndarray
    theta: np.ndarray
    epsilon: float
    orientation: int
    bounding_box: tuple
    source_label: str = ""
    _path_cache: list = field(default_factory=list, repr=False, compare=False)

    @property
    def max_edge(self) -> float:
        edges = np.abs(np.roll(self.boundary, -1) - self.boundary)
        return float(edges.max())

    @property
    def diagonal(self) -> float:
        x0, x1, y0, y1 = self.bounding_box
        return math.hypot(x1 - x0, y1 - y0)

    def _path(self) -> _MplPath:
        if not self._path_cache:
            pts = np.column_stack([self.boundary.real, self.boundary.imag])
            self._path_cache.append(_MplPath(pts, closed=False))
        return self._path_cache[0]

    def contains(self, w) -> np.ndarray:
        """Winding-number inside test for scalar or array query points."""
        arr = np.asarray(w, dtype=complex).reshape(-1)
        pts = np.column_stack([arr.real, arr.imag])
        return self._path().contains_points(pts)


def boundary_mesh(
    mapping: HarmonicMap, epsilon: float = 1e-3, n: int = 2048
) -> ImageGeometry:
    """Mesh the image boundary at radius 1 - epsilon.

    Starts from ``n`` equispaced angles and bisects in angle wherever two
    consecutive image points are farther apart than the bounding-box
    diagonal / 256, up to a hard budget of 2**20 vertices.
    """
    if not mapping.bounded_image:
        raise UnboundedImage(f"map {mapping.label!r} is not flagged bounded")
    if not (0.0 < epsilon <= 0.05):
        raise OutsideDomain("epsilon must lie in (0, 0.05]")
    if n < 512:
        raise OutsideDomain("mesh needs at least 512 vertices")

    theta = np.linspace(0.0, 2.0 * np.pi, int(n), endpoint=False)
    r = 1.0 - epsilon
    pts = mapping.eval(r * np.exp(1j * theta))
    for _ in range(40):
        x0, x1 = pts.real.min(), pts.real.max()
        y0, y1 = pts.imag.min(), pts.imag.max()
        diag = math.hypot(x1 - x0, y1 - y0)
        gaps = np.abs(np.roll(pts, -1) - pts)
        bad = np.flatnonzero(gaps > diag / _REFINE_FRACTION)
        if bad.size == 0:
            break
        if theta.size + bad.size > _MAX_MESH_VERTICES:
            raise RefinementOverflow("boundary mesh exceeded vertex budget")
        nxt = np.where(bad + 1 < theta.size, theta[(bad + 1) % theta.size], 2.0 * np.pi)
        mid_theta = 0.5 * (theta[bad] + nxt)
        mid_pts = mapping.eval(r * np.exp(1j * mid_theta))
        theta = np.concatenate([theta, mid_theta])
        pts = np.concatenate([pts, mid_pts])
        order = np.argsort(theta)
        theta = theta[order]
        pts = pts[order]
    else:
        raise RefinementOverflow("boundary refinement did not settle")

    area2 = float(np.sum(pts.real * np.roll(pts.imag, -1) - np.roll(pts.real, -1) * pts.imag))
    pts.flags.writeable = False
    theta.flags.writeable = False
    return ImageGeometry(
        boundary=pts,
        theta=theta,
        epsilon=float(epsilon),
        orientation=1 if area2 >= 0 else -1,
        bounding_box=(float(pts.real.min()), float(pts.real.max()),
                      float(pts.imag.min()), float(pts.imag.max())),
        source_label=mapping.label,
    )


def _segment_distances(ws: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Min distance from each query point to the closed polyline."""
    a = polyline
    b = np.roll(polyline, -1)
    seg = b - a
    seg_len2 = (seg.real ** 2 + seg.imag ** 2)
    seg_len2 = np.where(seg_len2 == 0, 1.0, seg_len2)
    out = np.empty(ws.size, dtype=float)
    chunk = max(1, int(4e6 // max(a.size, 1)))
    for start in range(0, ws.size, chunk):
        w = ws[start:start + chunk, None]
        d = w - a[None, :]
        t = (d.real * seg.real[None, :] + d.imag * seg.imag[None, :]) / seg_len2[None, :]
        t = np.clip(t, 0.0, 1.0)
        proj = a[None, :] + t * seg[None, :]
        dist = np.abs(w - proj)
        out[start:start + chunk] = dist.min(axis=1)
    return out


def dist_to_boundary(geom: ImageGeometry, w) -> float | np.ndarray:
    """Euclidean distance from interior point(s) to the meshed boundary.

    Raises ``OutsideDomain`` if any query point fails the winding-number
    inside test.  The result underestimates the true boundary distance by at
    most epsilon times the local boundary stretch plus the sagitta of one
    mesh edge.
    """
    arr = np.asarray(w, dtype=complex).reshape(-1)
    inside = geom.contains(arr)
    if not np.all(inside):
        raise OutsideDomain(f"point {arr[~inside][0]} is outside the meshed image")
    d = _segment_distances(arr, geom.boundary)
    return float(d[0]) if np.ndim(w) == 0 else d


@lru_cache(maxsize=None)
def _gauss_pair(n_low: int = 7, n_high: int = 15):
    from scipy.special import roots_legendre

    xl, wl = roots_legendre(n_low)
    xh, wh = roots_legendre(n_high)
    return xl, wl, xh, wh


def _adaptive_integral(func, a: float, b: float, rel_tol: float, max_depth: int = 40):
    """Adaptive nested Gauss pair (7/15 points) with interval bisection.

    ``func`` maps an ndarray of abscissae to an ndarray of nonnegative
    values.  Error per interval is the difference of the two rules; an
    interval is accepted once that difference is below the relative
    tolerance locally, which keeps the global relative error of the same
    order for additive integrands.
    """
    if b <= a:
        return 0.0
    xl, wl, xh, wh = _gauss_pair()
    stack = [(a, b, 0)]
    total = 0.0
    while stack:
        lo, hi, depth = stack.pop()
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        f_hi = func(mid + half * xh)
        coarse = half * float(np.dot(wl, func(mid + half * xl)))
        fine = half * float(np.dot(wh, f_hi))
        err = abs(fine - coarse)
        if err <= rel_tol * max(abs(fine), 1e-300) + 1e-15 or depth >= max_depth:
            if depth >= max_depth and err > 1e3 * rel_tol * max(abs(fine), 1e-300):
                raise QuadratureFailure(
                    f"quadrature tolerance unmet on [{lo:g}, {hi:g}]"
                )
            total += fine
        else:
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total


def refined_boundary_distance(mapping: HarmonicMap, geom: ImageGeometry, z) -> float:
    """Distance from f(z) to the boundary, refined near the rim.

    The global mesh sits at radius 1 - epsilon, so its distances degrade for
    points much closer to the boundary than that.  Here a local boundary arc
    is traced at the depth-matched offset (1 - |z|)/64 around the direction
    of ``z`` and the larger of the two lower estimates wins; the local value
    is only trusted when its minimizer is interior to the traced window.
    """
    z = complex(z)
    w = complex(mapping.eval(z))
    depth = 1.0 - abs(z)
    inside_global = bool(geom.contains(w)[0])
    d_global = float(dist_to_boundary(geom, w)) if inside_global else None
    eps_loc = depth / 64.0
    if eps_loc >= geom.epsilon or depth <= 1e-9:
        if d_global is None:
            raise OutsideDomain(f"point {w} is outside the meshed image")
        return d_global

    theta0 = math.atan2(z.imag, z.real) if abs(z) > 0 else 0.0
    r_loc = 1.0 - eps_loc
    d_local = None
    for half, n_arc in ((min(math.pi, 32.0 * depth), 512), (math.pi, 2048)):
        closed = half >= math.pi * 0.999
        thetas = theta0 + np.linspace(-half, half, n_arc, endpoint=not closed)
        arc = mapping.eval(r_loc * np.exp(1j * thetas))
        a = arc if closed else arc[:-1]
        b = np.roll(arc, -1) if closed else arc[1:]
        seg = b - a
        seg_len2 = np.where(np.abs(seg) == 0, 1.0, seg.real ** 2 + seg.imag ** 2)
        d = w - a
        t = np.clip((d.real * seg.real + d.imag * seg.imag) / seg_len2, 0.0, 1.0)
        dist = np.abs(w - (a + t * seg))
        idx = int(np.argmin(dist))
        if closed or (2 <= idx <= dist.size - 3):
            d_local = float(dist[idx])
            break
    candidates = [v for v in (d_global, d_local) if v is not None]
    if not candidates:
        raise OutsideDomain(f"point {w} has no usable boundary estimate")
    return max(candidates)


def radial_speed(mapping: HarmonicMap, zeta: complex):
    """Integrand |d/dt f(t * zeta)| as a vectorized function of t."""
    zeta = complex(zeta) / abs(complex(zeta))

    def speed(t: np.ndarray) -> np.ndarray:
        hj, gj = mapping.jets(np.asarray(t, dtype=float) * zeta)
        return np.abs(zeta * hj.d1 + np.conj(zeta * gj.d1))

    return speed


def radial_arclength(
    mapping: HarmonicMap, zeta: complex, r0: float, r1: float,
    rel_tol: float = 1e-9,
) -> float:
    """Length of the image of the radial segment [r0, r1] * zeta.

    The integrand |zeta h'(t zeta) + conj(zeta g'(t zeta))| is sandwiched
    between the minimal stretch and the operator norm of the differential,
    so lengths inherit every frame bound.
    """
    if not (0.0 <= r0 <= r1 < 1.0):
        raise OutsideDomain("need 0 <= r0 <= r1 < 1")
    if r0 == r1:
        return 0.0
    return _adaptive_integral(radial_speed(mapping, zeta), r0, r1, rel_tol)


def diameter_of_points(points: np.ndarray) -> float:
    """Exact diameter of a finite point set.

    Builds the convex hull first for all but tiny sets and takes the
    pairwise maximum over hull vertices (equivalent to a rotating-calipers
    sweep but simpler); degenerate (collinear) sets fall back to the direct
    pairwise sweep.
    """
    pts = np.asarray(points, dtype=complex).reshape(-1)
    if pts.size < 2:
        return 0.0
    if pts.size >= 256:
        xy = np.column_stack([pts.real, pts.imag])
        try:
            hull = ConvexHull(xy)
            pts = pts[hull.vertices]
        except QhullError:
            pass
    diff = np.abs(pts[:, None] - pts[None, :])
    return float(diff.max())


def rasterize_region(polyline: np.ndarray, n: int = 512, pad: float = 0.02):
    """Even-odd scanline fill of the polygon bounded by ``polyline``.

    Returns ``(mask, xs, ys)`` where ``mask[j, i]`` says whether the cell
    center (xs[i], ys[j]) lies inside.  Used for fast membership tests of
    many points against one image region.
    """
    poly = np.asarray(polyline, dtype=complex).reshape(-1)
    x0, x1 = poly.real.min(), poly.real.max()
    y0, y1 = poly.imag.min(), poly.imag.max()
    dx = (x1 - x0) * pad + 1e-12
    dy = (y1 - y0) * pad + 1e-12
    xs = np.linspace(x0 - dx, x1 + dx, n)
    ys = np.linspace(y0 - dy, y1 + dy, n)
    ax, ay = poly.real, poly.imag
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    keep = ay != by
    ax, ay, bx, by = ax[keep], ay[keep], bx[keep], by[keep]
    mask = np.zeros((n, n), dtype=bool)
    for j, y in enumerate(ys):
        hit = (np.minimum(ay, by) <= y) & (y < np.maximum(ay, by))
        if not np.any(hit):
            continue
        t = (y - ay[hit]) / (by[hit] - ay[hit])
        crossings = np.sort(ax[hit] + t * (bx[hit] - ax[hit]))
        mask[j] = (np.searchsorted(crossings, xs, side="right") % 2) == 1
    return mask, xs, ys


def erode_mask(mask: np.ndarray) -> np.ndarray:
    """Shrink an inside-mask by one cell in the 4-neighborhood (conservative)."""
    out = mask.copy()
    out[1:, :] &= mask[:-1, :]
    out[:-1, :] &= mask[1:, :]
    out[:, 1:] &= mask[:, :-1]
    out[:, :-1] &= mask[:, 1:]
    return out


def mask_lookup(mask: np.ndarray, xs: np.ndarray, ys: np.ndarray, pts) -> np.ndarray:
    """Membership of points in a rasterized region (outside the grid = False)."""
    pts = np.asarray(pts, dtype=complex)
    shape = pts.shape
    flat = pts.reshape(-1)
    step_x = xs[1] - xs[0]
    step_y = ys[1] - ys[0]
    ix = np.round((flat.real - xs[0]) / step_x).astype(int)
    iy = np.round((flat.imag - ys[0]) / step_y).astype(int)
    ok = (ix >= 0) & (ix < xs.size) & (iy >= 0) & (iy < ys.size)
    out = np.zeros(flat.size, dtype=bool)
    out[ok] = mask[iy[ok], ix[ok]]
    return out.reshape(shape)


# Radial clip for boundary boxes: the true box touches the unit circle, so
# its outer edge is sampled at 1 - (1 - |z|) / _BOX_CLIP instead.  The value
# keeps the clipped diameter within ~0.1% of the open-box limit.
_BOX_CLIP = 1024.0


@dataclass(frozen=True)
class BoxRegion:
    """Annular boundary box at base point z.

    Radii run from |z| to the clipped outer radius, angles stay within
    pi * (1 - |z|) of arg z (with arg 0 := 0, so the box at the origin is
    the whole disk).
    """

    base: complex
    r_lo: float
    r_hi: float
    theta_center: float
    half_width: float

    def sample(self, m: int) -> np.ndarray:
        m = max(int(m), 16)
        radii = np.linspace(self.r_lo, self.r_hi, m)
        angles = self.theta_center + np.linspace(-self.half_width, self.half_width, m)
        return radii[:, None] * np.exp(1j * angles)[None, :]


def box_region(z: complex) -> BoxRegion:
    z = complex(z)
    mod = abs(z)
    if mod >= 1.0:
        raise OutsideDomain("box base point must lie inside the disk")
    theta = math.atan2(z.imag, z.real) if mod > 0 else 0.0
    return BoxRegion(
        base=z,
        r_lo=mod,
        r_hi=1.0 - (1.0 - mod) / _BOX_CLIP,
        theta_center=theta,
        half_width=min(math.pi, math.pi * (1.0 - mod)),
    )


def diam_image_of_box(mapping: HarmonicMap, z: complex, m: int = 64) -> float:
    """Diameter of the image of the boundary box at z, sampled at m x m points.

    Sampling only underestimates the diameter, so the value is monotone
    nondecreasing under refinement of ``m``.
    """
    box = box_region(z)
    return diameter_of_points(mapping.eval(box.sample(m)))


@dataclass(frozen=True)
class BoundaryArc:
    """Boundary arc centered at arg a with half-width 1 - |a|."""

    base: complex
    theta_center: float
    half_width: float

    def sample(self, n: int, radius: float) -> np.ndarray:
        angles = self.theta_center + np.linspace(-self.half_width, self.half_width, int(n))
        return radius * np.exp(1j * angles)


def boundary_arc(a: complex) -> BoundaryArc:
    a = complex(a)
    mod = abs(a)
    if not (0.0 < mod < 1.0):
        raise OutsideDomain("arc base point must satisfy 0 < |a| < 1")
    return BoundaryArc(
        base=a,
        theta_center=math.atan2(a.imag, a.real),
        half_width=1.0 - mod,
    )


def diam_image_of_arc(
    mapping: HarmonicMap, a: complex, epsilon: float = 1e-3, n: int = 512
) -> float:
    """Diameter of f over the boundary arc at a, traced at radius 1 - epsilon."""
    if not mapping.bounded_image:
        raise UnboundedImage(f"map {mapping.label!r} is not flagged bounded")
    arc = boundary_arc(a)
    return diameter_of_points(mapping.eval(arc.sample(n, 1.0 - epsilon)))


def polar_cells(
    r0: float, r1: float, theta0: float, theta1: float, nr: int, ntheta: int
) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints and areas of a polar product grid (midpoint rule cells)."""
    r_edges = np.linspace(r0, r1, nr + 1)
    t_edges = np.linspace(theta0, theta1, ntheta + 1)
    r_mid = 0.5 * (r_edges[:-1] + r_edges[1:])
    t_mid = 0.5 * (t_edges[:-1] + t_edges[1:])
    dr = np.diff(r_edges)
    dt = np.diff(t_edges)
    pts = r_mid[:, None] * np.exp(1j * t_mid)[None, :]
    areas = (r_mid * dr)[:, None] * dt[None, :]
    return pts.ravel(), areas.ravel()


def disk_cells(radius: float, n: int = 256) -> tuple[np.ndarray, np.ndarray]:
    return polar_cells(0.0, radius, 0.0, 2.0 * np.pi, n, n)


def corner_cells(r: float, theta: float, n: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint cells of the rotated corner triangle at base radius r.

    The region is {(x + i y) e^{i theta} : r <= x < 1, 0 <= y <= 1 - x},
    clipped to the open disk used by the box diagnostics.
    """
    x_edges = np.linspace(r, 1.0 - (1.0 - r) / _BOX_CLIP, n + 1)
    x_mid = 0.5 * (x_edges[:-1] + x_edges[1:])
    dx = np.diff(x_edges)
    pts = []
    areas = []
    for xm, dxi in zip(x_mid, dx):
        height = 1.0 - xm
        if height <= 0:
            continue
        y_edges = np.linspace(0.0, height, n + 1)
        y_mid = 0.5 * (y_edges[:-1] + y_edges[1:])
        dy = np.diff(y_edges)
        pts.append(xm + 1j * y_mid)
        areas.append(dxi * dy)
    pts = np.concatenate(pts) * np.exp(1j * theta)
    areas = np.concatenate(areas)
    keep = np.abs(pts) < 1.0
    return pts[keep], areas[keep]


def region_area(mapping: HarmonicMap, points, weights) -> float:
    """Midpoint-rule area of the image of a sampled region: sum J_f * weight."""
    pts = np.asarray(points, dtype=complex).reshape(-1)
    wts = np.asarray(weights, dtype=float).reshape(-1)
    if pts.size == 0:
        return 0.0
    if pts.size != wts.size:
        raise OutsideDomain("points and weights must have matching lengths")
    hj, gj = mapping.jets(pts)
    jac = np.abs(hj.d1) ** 2 - np.abs(gj.d1) ** 2
    return float(np.dot(jac, wts))
