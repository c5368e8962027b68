"""Harmonic maps f = h + conj(g), the example catalog, and map-spec files.

A :class:`HarmonicMap` pairs two analytic representations with normalization
flags.  The catalog provides closed-form examples chosen to exercise the
diagnostics: conformal and genuinely harmonic, bounded and unbounded, and a
bounded reference domain with an outward boundary cusp (``lune``) that fails
the John property.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .analytic import (
    Affine,
    AnalyticFunction,
    Compose,
    Constant,
    Identity,
    Jet3,
    Log,
    Mobius,
    OneMinusPower,
    Product,
    Reciprocal,
    Scale,
    SeriesFunction,
    Sum,
)
from .errors import (
    DomainError,
    InvariantViolation,
    ParamOutOfRange,
    ParseError,
    UnknownCatalogEntry,
)

_NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicMap:
    """Sense-preserving planar harmonic map of the unit disk.

    ``f(z) = h(z) + conj(g(z))`` with ``h``, ``g`` analytic.  Flags record
    membership claims that the constructor validates at the origin:
    ``in_sh`` requires h(0) = 0, h'(0) = 1 (and always g(0) = 0);
    ``in_sh0`` additionally requires g'(0) = 0.  ``known_k`` is an a-priori
    bound on the quasiconformality constant when one is available.
    ``singular_rays`` lists boundary directions along which the map is
    degenerate or extremal; radial diagnostics always include them.
    """

    h: AnalyticFunction
    g: AnalyticFunction
    label: str = ""
    in_sh: bool = False
    in_sh0: bool = False
    bounded_image: bool = False
    known_k: float | None = None
    john_failing_reference: bool = False
    singular_rays: tuple = ()

    def __post_init__(self):
        hj = self.h.jet(0.0)
        gj = self.g.jet(0.0)
        if abs(gj.value) > _NORMALIZATION_TOL:
            raise InvariantViolation(f"g(0) = {gj.value:g} must vanish")
        if self.in_sh0 and not self.in_sh:
            raise InvariantViolation("in_sh0 requires in_sh")
        if self.in_sh:
            if abs(hj.value) > _NORMALIZATION_TOL:
                raise InvariantViolation("in_sh claimed but h(0) != 0")
            if abs(hj.d1 - 1.0) > _NORMALIZATION_TOL:
                raise InvariantViolation("in_sh claimed but h'(0) != 1")
        if self.in_sh0 and abs(gj.d1) > _NORMALIZATION_TOL:
            raise InvariantViolation("in_sh0 claimed but g'(0) != 0")
        if self.known_k is not None and self.known_k < 1.0:
            raise InvariantViolation("known_k must be >= 1")

    @property
    def rho_valid(self) -> float:
        return min(self.h.rho_valid, self.g.rho_valid)

    def jets(self, z) -> tuple[Jet3, Jet3]:
        """Jets of both analytic parts with a common domain check."""
        arr = np.asarray(z, dtype=complex)
        if np.any(np.abs(arr) >= self.rho_valid):
            raise DomainError(
                f"point outside common validity radius {self.rho_valid:g}"
            )
        return self.h.jet(z), self.g.jet(z)

    def eval(self, z):
        """f(z) = h(z) + conj(g(z)) for scalar or array ``z``."""
        hj, gj = self.jets(z)
        return hj.value + np.conj(gj.value)

    def __call__(self, z):
        return self.eval(z)


def eval_map(mapping: HarmonicMap, z):
    """Module-level alias for :meth:`HarmonicMap.eval`."""
    return mapping.eval(z)


_ZERO = SeriesFunction([0.0])


def _require(cond: bool, message: str):
    if not cond:
        raise ParamOutOfRange(message)


def _identity_map() -> HarmonicMap:
    return HarmonicMap(
        h=Identity(), g=_ZERO, label="identity",
        in_sh=True, in_sh0=True, bounded_image=True, known_k=1.0,
    )


def _affine_map(a) -> HarmonicMap:
    a = complex(a)
    _require(abs(a) < 1.0, "affine parameter needs |a| < 1")
    k = (1.0 + abs(a)) / (1.0 - abs(a))
    return HarmonicMap(
        h=Identity(), g=Scale(a, Identity()),
        label=f"affine(a={a:g})" if a.imag == 0 else f"affine(a={a})",
        in_sh=True, in_sh0=(a == 0), bounded_image=True, known_k=k,
    )


def _shear_map(b) -> HarmonicMap:
    # h = z, g = b z^2 / 2, dilatation omega(z) = b z.  |b| = 1 is allowed:
    # the map stays univalent and sense-preserving on the open disk but is
    # no longer quasiconformal, so known_k is omitted there.
    b = complex(b)
    _require(abs(b) <= 1.0, "shear parameter needs |b| <= 1")
    g = SeriesFunction([0.0, 0.0, b / 2.0])
    known_k = None
    if abs(b) < 1.0:
        known_k = (1.0 + abs(b)) / (1.0 - abs(b))
    return HarmonicMap(
        h=Identity(), g=g, label=f"shear_omega_bz(b={b:g})" if b.imag == 0 else f"shear_omega_bz(b={b})",
        in_sh=True, in_sh0=True, bounded_image=True, known_k=known_k,
    )


def _koebe_h() -> AnalyticFunction:
    return Product(Identity(), OneMinusPower(Identity(), -2.0))


def _lune_h() -> AnalyticFunction:
    # Disk -> right half-plane -> horizontal strip (log) -> shift the strip
    # off the origin -> inversion.  The two strip edges invert onto two
    # internally tangent circles, so the image is a bounded lune with an
    # outward cusp at the tangency point; post-composition normalizes
    # h(0) = 0, h'(0) = 1.
    half_plane = Mobius(1.0, 1.0, -1.0, 1.0)  # (1+z)/(1-z)
    strip = Log(half_plane)
    shifted = Sum(strip, Constant(1j * np.pi))
    u = Reciprocal(shifted)
    u0 = u.jet(0.0)
    return Scale(1.0 / u0.d1, Sum(u, Constant(-u0.value)))


def _analytic_map(expr: str, **params) -> HarmonicMap:
    if expr == "koebe":
        return HarmonicMap(
            h=_koebe_h(), g=_ZERO, label="koebe",
            in_sh=True, in_sh0=True, bounded_image=False, known_k=1.0,
            singular_rays=(1.0 + 0.0j,),
        )
    if expr == "cardioid":
        return HarmonicMap(
            h=SeriesFunction([0.0, 1.0, 0.5]), g=_ZERO, label="cardioid",
            in_sh=True, in_sh0=True, bounded_image=True, known_k=1.0,
            singular_rays=(-1.0 + 0.0j,),
        )
    if expr == "lune":
        return HarmonicMap(
            h=_lune_h(), g=_ZERO, label="lune",
            in_sh=True, in_sh0=True, bounded_image=True, known_k=1.0,
            john_failing_reference=True,
            singular_rays=(1.0 + 0.0j, -1.0 + 0.0j),
        )
    if expr == "automorphism":
        a = complex(params.get("a", 0.0))
        _require(abs(a) < 1.0, "automorphism parameter needs |a| < 1")
        return HarmonicMap(
            h=Mobius(1.0, -a, -np.conj(a), 1.0), g=_ZERO,
            label=f"automorphism(a={a})",
            in_sh=(a == 0), in_sh0=(a == 0), bounded_image=True, known_k=1.0,
        )
    raise UnknownCatalogEntry(f"unknown analytic expression {expr!r}")


def _harmonic_koebe() -> HarmonicMap:
    pole3 = OneMinusPower(Identity(), -3.0)
    h = Product(SeriesFunction([0.0, 1.0, -0.5, 1.0 / 6.0]), pole3)
    g = Product(SeriesFunction([0.0, 0.0, 0.5, 1.0 / 6.0]), pole3)
    return HarmonicMap(
        h=h, g=g, label="harmonic_koebe",
        in_sh=True, in_sh0=True, bounded_image=False,
        singular_rays=(1.0 + 0.0j,),
    )


def _scaled_map(inner: str, r: float, inner_params: dict | None = None) -> HarmonicMap:
    _require(0.0 < r < 1.0, "scale radius needs r in (0, 1)")
    base = catalog_get(inner, **(inner_params or {}))
    squeeze = Affine(r, 0.0)
    h = Scale(1.0 / r, Compose(base.h, squeeze))
    g = Scale(1.0 / r, Compose(base.g, squeeze))
    # Restriction to the closed subdisk keeps the image bounded; the
    # dilatation bound is estimated on the circle |z| = r by the maximum
    # principle (omega is analytic wherever h' does not vanish).
    known_k = _dilatation_bound_k(base, r)
    return HarmonicMap(
        h=h, g=g, label=f"scaled({base.label}, r={r:g})",
        in_sh=base.in_sh, in_sh0=base.in_sh0, bounded_image=True,
        known_k=known_k,
        singular_rays=base.singular_rays,
    )


def _dilatation_bound_k(mapping: HarmonicMap, r: float, n: int = 512) -> float | None:
    theta = 2.0 * np.pi * np.arange(n) / n
    hj, gj = mapping.jets(r * np.exp(1j * theta))
    if np.any(hj.d1 == 0):
        return None
    m = float(np.max(np.abs(gj.d1 / hj.d1)))
    if m >= 1.0:
        return None
    return (1.0 + m) / (1.0 - m)


_CATALOG = {
    "identity": lambda **p: _identity_map(),
    "affine": lambda **p: _affine_map(p.pop("a")),
    "shear_omega_bz": lambda **p: _shear_map(p.pop("b")),
    "analytic": lambda **p: _analytic_map(p.pop("expr"), **p),
    "harmonic_koebe": lambda **p: _harmonic_koebe(),
    "scaled": lambda **p: _scaled_map(
        p.pop("inner"), p.pop("r"), p.pop("inner_params", None)
    ),
}

# Direct shorthands for the analytic expressions, kept for CLI convenience.
_SHORTHANDS = {"koebe", "cardioid", "lune", "automorphism"}


def catalog_names() -> tuple:
    return tuple(sorted(set(_CATALOG) | _SHORTHANDS))


def catalog_get(name: str, **params) -> HarmonicMap:
    """Build a catalog map by name.

    Raises ``UnknownCatalogEntry`` for unknown names and ``ParamOutOfRange``
    for parameters outside their admissible range (for example |a| >= 1 for
    the affine family or a scale radius outside (0, 1)).
    """
    if name in _SHORTHANDS:
        return _analytic_map(name, **params)
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise UnknownCatalogEntry(
            f"unknown catalog entry {name!r}; known: {', '.join(catalog_names())}"
        ) from None
    try:
        return builder(**dict(params))
    except UnknownCatalogEntry:
        raise
    except KeyError as exc:
        raise ParamOutOfRange(f"missing parameter {exc} for catalog map {name!r}") from None


def _parse_complex_pairs(raw, what: str) -> np.ndarray:
    try:
        arr = np.asarray([[float(re), float(im)] for re, im in raw], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what} must be a list of [re, im] pairs") from exc
    if arr.size and not np.all(np.isfinite(arr)):
        raise ParseError(f"{what} contains non-finite entries")
    if arr.size == 0:
        return np.zeros(1, dtype=complex)
    return arr[:, 0] + 1j * arr[:, 1]


def load_map_spec(document) -> HarmonicMap:
    """Parse a map-spec document (bytes, str, file-like, or dict).

    Series specs infer the normalization flags from the coefficients; claimed
    flags in an optional ``"flags"`` object are validated and raise
    ``InvariantViolation`` on mismatch.  Catalog specs delegate to
    :func:`catalog_get`.
    """
    if isinstance(document, (bytes, bytearray)):
        text = bytes(document).decode("utf-8")
    elif isinstance(document, str):
        text = document
    elif isinstance(document, io.IOBase) or hasattr(document, "read"):
        text = document.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    elif isinstance(document, dict):
        text = None
    else:
        raise ParseError(f"unsupported document type {type(document)!r}")

    if text is not None:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ParseError("map spec must be a JSON object")

    kind = doc.get("kind")
    if kind == "catalog":
        name = doc.get("name")
        if not isinstance(name, str):
            raise ParseError("catalog spec needs a string 'name'")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise ParseError("'params' must be an object")
        return catalog_get(name, **params)
    if kind != "series":
        raise ParseError(f"unknown map-spec kind {kind!r}")

    h_coeffs = _parse_complex_pairs(doc.get("h", []), "'h'")
    g_coeffs = _parse_complex_pairs(doc.get("g", []), "'g'")
    rho = float(doc.get("rho_valid", 1.0))
    h = SeriesFunction(h_coeffs, rho_valid=rho)
    g = SeriesFunction(g_coeffs, rho_valid=rho)

    inferred_sh = (
        abs(h_coeffs[0]) <= _NORMALIZATION_TOL
        and h_coeffs.size > 1
        and abs(h_coeffs[1] - 1.0) <= _NORMALIZATION_TOL
        and abs(g_coeffs[0]) <= _NORMALIZATION_TOL
    )
    inferred_sh0 = inferred_sh and (
        g_coeffs.size < 2 or abs(g_coeffs[1]) <= _NORMALIZATION_TOL
    )
    flags = doc.get("flags", {})
    if not isinstance(flags, dict):
        raise ParseError("'flags' must be an object")
    in_sh = bool(flags.get("in_SH", inferred_sh))
    in_sh0 = bool(flags.get("in_SH0", inferred_sh0))
    # Truncated series are polynomials, hence bounded on the disk.
    bounded = bool(flags.get("bounded_image", True))
    label = doc.get("name", "series")
    return HarmonicMap(
        h=h, g=g, label=str(label),
        in_sh=in_sh, in_sh0=in_sh0, bounded_image=bounded,
        known_k=flags.get("known_K"),
    )
