"""Exception types shared across the toolkit."""


class QCJohnError(Exception):
    """Base class for every error this package raises on purpose."""


class DomainError(QCJohnError, ValueError):
    """Evaluation requested outside a representation's validity region."""


class SingularNode(QCJohnError, ArithmeticError):
    """A closed-form expression hit a pole or other exact singularity."""


class UnknownCatalogEntry(QCJohnError, KeyError):
    """Requested catalog map name does not exist."""


class ParamOutOfRange(QCJohnError, ValueError):
    """A catalog or configuration parameter violates its admissible range."""


class ParseError(QCJohnError, ValueError):
    """A map-spec document could not be parsed."""


class InvariantViolation(QCJohnError, ValueError):
    """Constructed object breaks a structural invariant (normalization etc.)."""


class CriticalPoint(QCJohnError, ArithmeticError):
    """The analytic part has vanishing derivative where it must not."""


class NotSensePreserving(QCJohnError, ValueError):
    """Jacobian is nonpositive at a point where sense preservation is required."""


class NotSelfMap(QCJohnError, ValueError):
    """A disk self-map check found an image point outside the unit disk."""


class OutsideDomain(QCJohnError, ValueError):
    """Query point lies outside the meshed image domain."""


class UnboundedImage(QCJohnError, ValueError):
    """Operation needs a bounded image but the map is not flagged bounded."""


class RefinementOverflow(QCJohnError, RuntimeError):
    """Adaptive refinement exceeded its hard vertex budget."""


class QuadratureFailure(QCJohnError, RuntimeError):
    """Adaptive quadrature could not meet its tolerance at maximum depth."""


class DivergentTail(QCJohnError, ArithmeticError):
    """Tail integral requested for a map whose tail cannot converge."""


class DegenerateDilatation(QCJohnError, ArithmeticError):
    """Dilatation modulus reached one where strict inequality is required."""


class TruncationTooCoarse(QCJohnError, RuntimeError):
    """Series truncation error bound exceeds the requested accuracy."""


class ConfigError(QCJohnError, ValueError):
    """Run configuration violates its invariants."""
