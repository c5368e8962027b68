"""Analytic functions on the disk with exact derivatives up to order three.

Two representations are supported:

* truncated power series (coefficient list with a validity radius), and
* closed-form expression DAGs built from a fixed node set (constants,
  Moebius maps, powers, ``exp``/``log``, sums, products, compositions).

Every representation evaluates a :class:`Jet3` -- value plus the first three
derivatives -- at scalar or array arguments.  Derivatives of composite nodes
are assembled with the order-three chain rule, so closed forms are exact to
rounding.  Taylor coefficients of closed forms are recovered with a discrete
Cauchy integral on a circle well inside the validity radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularNode


@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of an analytic function at a point.

    Fields are python complex numbers for scalar evaluation or complex
    ndarrays (matching the argument shape) for batched evaluation.
    """

    value: complex
    d1: complex
    d2: complex
    d3: complex

    def __iter__(self):
        return iter((self.value, self.d1, self.d2, self.d3))


def _compose_jets(outer: Jet3, inner: Jet3) -> Jet3:
    """Chain rule to order three: jet of F(g) from the jet of F at g(z)."""
    g1, g2, g3 = inner.d1, inner.d2, inner.d3
    return Jet3(
        outer.value,
        outer.d1 * g1,
        outer.d2 * g1 * g1 + outer.d1 * g2,
        outer.d3 * g1 * g1 * g1 + 3.0 * outer.d2 * g1 * g2 + outer.d1 * g3,
    )


def _mul_jets(a: Jet3, b: Jet3) -> Jet3:
    return Jet3(
        a.value * b.value,
        a.d1 * b.value + a.value * b.d1,
        a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2,
        a.d3 * b.value + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.value * b.d3,
    )


class AnalyticFunction:
    """Base class for analytic-function representations.

    ``rho_valid`` is the radius (in the disk variable) within which jet
    evaluation is guaranteed meaningful; closed forms built for the unit
    disk use 1.0.
    """

    kind = "closed-form"
    rho_valid = 1.0

    def _jet(self, z: np.ndarray) -> Jet3:
        raise NotImplementedError

    def jet(self, z) -> Jet3:
        """Evaluate value and derivatives at ``z`` (scalar or ndarray)."""
        arr = np.asarray(z, dtype=complex)
        if arr.ndim == 0:
            out = self._jet(arr.reshape(1))
            return Jet3(
                complex(out.value[0]), complex(out.d1[0]),
                complex(out.d2[0]), complex(out.d3[0]),
            )
        return self._jet(arr)

    def __call__(self, z):
        return self.jet(z).value


class Constant(AnalyticFunction):
    rho_valid = float("inf")

    def __init__(self, c):
        self.c = complex(c)
        if not np.isfinite(self.c):
            raise DomainError("constant node must be finite")

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(np.full_like(z, self.c), zero, zero.copy(), zero.copy())


class Identity(AnalyticFunction):
    rho_valid = float("inf")

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(z.copy(), np.ones_like(z), zero, zero.copy())


class Affine(AnalyticFunction):
    """a*z + b as a leaf node in the disk variable."""

    rho_valid = float("inf")

    def __init__(self, a, b=0.0):
        self.a = complex(a)
        self.b = complex(b)

    def _jet(self, z):
        zero = np.zeros_like(z)
        return Jet3(self.a * z + self.b, np.full_like(z, self.a), zero, zero.copy())


class Mobius(AnalyticFunction):
    """(a*z + b) / (c*z + d) with ad - bc != 0; the pole is guarded at eval."""

    rho_valid = float("inf")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (complex(v) for v in (a, b, c, d))
        self.det = self.a * self.d - self.b * self.c
        if self.det == 0:
            raise DomainError("degenerate Moebius map (ad - bc = 0)")

    def _jet(self, z):
        q = self.c * z + self.d
        if np.any(q == 0):
            raise SingularNode("Moebius pole hit during evaluation")
        q2 = q * q
        return Jet3(
            (self.a * z + self.b) / q,
            self.det / q2,
            -2.0 * self.c * self.det / (q2 * q),
            6.0 * self.c * self.c * self.det / (q2 * q2),
        )


class _Unary(AnalyticFunction):
    def __init__(self, child: AnalyticFunction):
        self.child = child
        self.rho_valid = child.rho_valid

    def _outer_jet(self, w: np.ndarray) -> Jet3:
        raise NotImplementedError

    def _jet(self, z):
        inner = self.child._jet(z)
        return _compose_jets(self._outer_jet(inner.value), inner)


class Exp(_Unary):
    def _outer_jet(self, w):
        e = np.exp(w)
        return Jet3(e, e.copy(), e.copy(), e.copy())


class Log(_Unary):
    """Principal branch; the cut along the closed negative real axis is rejected."""

    def _outer_jet(self, w):
        if np.any(w == 0):
            raise SingularNode("log of zero inside expression")
        if np.any((w.real < 0) & (w.imag == 0)):
            raise DomainError("log argument on the principal branch cut")
        iw = 1.0 / w
        iw2 = iw * iw
        return Jet3(np.log(w), iw, -iw2, 2.0 * iw2 * iw)


class Reciprocal(_Unary):
    def _outer_jet(self, w):
        if np.any(w == 0):
            raise SingularNode("division by zero inside expression")
        iw = 1.0 / w
        iw2 = iw * iw
        return Jet3(iw, -iw2, 2.0 * iw2 * iw, -6.0 * iw2 * iw2)


class Power(_Unary):
    """Integer power of a subexpression (negative exponents allowed)."""

    def __init__(self, child, n: int):
        super().__init__(child)
        self.n = int(n)

    def _outer_jet(self, w):
        n = self.n
        if n < 3 and np.any(w == 0):
            raise SingularNode("power node would divide by zero")
        c1 = n
        c2 = n * (n - 1)
        c3 = n * (n - 1) * (n - 2)
        return Jet3(
            w ** n,
            c1 * w ** (n - 1) if c1 else np.zeros_like(w),
            c2 * w ** (n - 2) if c2 else np.zeros_like(w),
            c3 * w ** (n - 3) if c3 else np.zeros_like(w),
        )


class OneMinusPower(_Unary):
    """(1 - child)**p with real exponent p, principal branch."""

    def __init__(self, child, p: float):
        super().__init__(child)
        self.p = float(p)

    def _outer_jet(self, w):
        u = 1.0 - w
        p = self.p
        if p < 3 and np.any(u == 0):
            raise SingularNode("(1 - w)**p singular at w = 1")
        if p != int(p) and np.any((u.real < 0) & (u.imag == 0)):
            raise DomainError("(1 - w)**p on the principal branch cut")
        c1 = -p
        c2 = p * (p - 1)
        c3 = -p * (p - 1) * (p - 2)
        return Jet3(
            u ** p,
            c1 * u ** (p - 1),
            c2 * u ** (p - 2),
            c3 * u ** (p - 3),
        )


class Scale(AnalyticFunction):
    """Scalar multiple c * f."""

    def __init__(self, c, child: AnalyticFunction):
        self.c = complex(c)
        self.child = child
        self.rho_valid = child.rho_valid

    def _jet(self, z):
        j = self.child._jet(z)
        c = self.c
        return Jet3(c * j.value, c * j.d1, c * j.d2, c * j.d3)


class Sum(AnalyticFunction):
    def __init__(self, *terms: AnalyticFunction):
        if not terms:
            raise DomainError("empty sum")
        self.terms = terms
        self.rho_valid = min(t.rho_valid for t in terms)

    def _jet(self, z):
        jets = [t._jet(z) for t in self.terms]
        return Jet3(
            sum(j.value for j in jets),
            sum(j.d1 for j in jets),
            sum(j.d2 for j in jets),
            sum(j.d3 for j in jets),
        )


class Product(AnalyticFunction):
    def __init__(self, left: AnalyticFunction, right: AnalyticFunction):
        self.left = left
        self.right = right
        self.rho_valid = min(left.rho_valid, right.rho_valid)

    def _jet(self, z):
        return _mul_jets(self.left._jet(z), self.right._jet(z))


class Compose(AnalyticFunction):
    """outer(inner(z)); the caller guarantees inner maps into outer's domain."""

    def __init__(self, outer: AnalyticFunction, inner: AnalyticFunction):
        self.outer = outer
        self.inner = inner
        self.rho_valid = inner.rho_valid

    def _jet(self, z):
        inner = self.inner._jet(z)
        return _compose_jets(self.outer._jet(inner.value), inner)


class SeriesFunction(AnalyticFunction):
    """Truncated power series sum(c_n z^n, n = 0..N) valid on |z| < rho_valid.

    Evaluation is simultaneous Horner recursion for the value and three
    derivatives.  The truncation error on |z| = r < rho_valid is reported by
    :meth:`truncation_bound` with a geometric-tail model calibrated on the
    last eight coefficients.
    """

    kind = "series"

    def __init__(self, coefficients, rho_valid: float = 1.0):
        coeffs = np.asarray(coefficients, dtype=complex).reshape(-1)
        if coeffs.size < 1:
            raise DomainError("series needs at least one coefficient")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("series coefficients must be finite")
        if not (0.0 < rho_valid <= 1.0):
            raise DomainError("series validity radius must lie in (0, 1]")
        self.coefficients = coeffs
        self.coefficients.flags.writeable = False
        self.rho_valid = float(rho_valid)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def _jet(self, z):
        if np.any(np.abs(z) >= self.rho_valid):
            raise DomainError("series evaluation outside validity radius")
        p0 = np.zeros_like(z)
        p1 = np.zeros_like(z)
        p2 = np.zeros_like(z)
        p3 = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            p3 = p3 * z + p2
            p2 = p2 * z + p1
            p1 = p1 * z + p0
            p0 = p0 * z + c
        return Jet3(p0, p1, 2.0 * p2, 6.0 * p3)

    def truncation_bound(self, r: float) -> float:
        """Geometric bound on the dropped tail at radius ``r``.

        Models |c_n| for n beyond the truncation by the largest of the last
        eight stored magnitudes, decaying like (r / rho_valid)^n.  Cheap and
        conservative for coefficients produced by Cauchy extraction.
        """
        if r >= self.rho_valid:
            raise DomainError("radius outside validity region")
        tail_mags = np.abs(self.coefficients[-8:])
        m = float(tail_mags.max(initial=0.0))
        if m == 0.0:
            return 0.0
        q = r / self.rho_valid
        if q == 0.0:
            return 0.0
        n = self.degree + 1
        return m * q ** n / (1.0 - q)


def eval_jet(rep: AnalyticFunction, z) -> Jet3:
    """Jet of ``rep`` at ``z`` after checking the validity radius.

    Raises ``DomainError`` if any point satisfies |z| >= rho_valid, and
    propagates ``SingularNode`` from poles inside closed forms.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(arr) >= rep.rho_valid):
        raise DomainError(
            f"evaluation at |z| >= validity radius {rep.rho_valid:g}"
        )
    return rep.jet(z)


def taylor_coefficients(rep: AnalyticFunction, n_coeffs: int) -> np.ndarray:
    """First ``n_coeffs + 1`` Taylor coefficients c_0..c_N of ``rep`` at 0.

    Series representations are copied (and zero-padded or truncated).
    Closed forms use the discrete Cauchy integral with 4 * max(N, 32)
    nodes; the trapezoid rule is spectrally accurate there, so aliasing
    from beyond the node count is negligible for disk-analytic functions.

    The circle radius adapts to the order: the n-th coefficient divides
    the quadrature by rho**n, which amplifies rounding noise like
    rho**-n, so deep extractions move the circle outward
    (rho = 0.5**min(1, 32/N), capped at 0.9 * rho_valid).  Coefficients
    below the resulting noise floor carry no information and are snapped
    to exact zero.
    """
    if n_coeffs < 0:
        raise DomainError("coefficient count must be nonnegative")
    if isinstance(rep, SeriesFunction):
        out = np.zeros(n_coeffs + 1, dtype=complex)
        take = min(n_coeffs + 1, rep.coefficients.size)
        out[:take] = rep.coefficients[:take]
        return out
    rho = min(0.9 * rep.rho_valid, 0.5 ** min(1.0, 32.0 / max(n_coeffs, 1)))
    if rho <= 0.0:
        raise DomainError("no admissible extraction circle")
    m = 4 * max(n_coeffs, 32)
    theta = 2.0 * np.pi * np.arange(m) / m
    values = rep.jet(rho * np.exp(1j * theta)).value
    hat = np.fft.fft(values) / m
    n = np.arange(n_coeffs + 1)
    coeffs = hat[: n_coeffs + 1] / rho ** n
    noise_floor = 32.0 * np.finfo(float).eps * np.abs(values).max() / rho ** n
    coeffs[np.abs(coeffs) < noise_floor] = 0.0
    return coeffs
