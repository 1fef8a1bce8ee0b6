"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` so that the command
line front-end can map failures onto exit statuses and report payloads.
"""


class ToeplitzChainsError(Exception):
    """Base class for all package errors."""

    code = "error"


class ValidationError(ToeplitzChainsError, ValueError):
    """Input rejected before any computation took place."""

    code = "validation"


class NumericalError(ToeplitzChainsError, ArithmeticError):
    """A computation could not be carried out to the requested accuracy."""

    code = "numerical"


# model
class ZeroOnUnitCircle(ValidationError):
    code = "zero_on_unit_circle"


class ConjugationViolation(ValidationError):
    code = "conjugation_violation"


class BadPhase(ValidationError):
    code = "bad_phase"


class SubsetExplosion(ValidationError):
    code = "subset_explosion"


class UnitCircleRoot(ValidationError):
    code = "unit_circle_root"


class OddMultiplicity(ValidationError):
    code = "odd_multiplicity"


# engine
class DegenerateRoots(NumericalError):
    code = "degenerate_roots"


class StructureViolation(NumericalError):
    code = "structure_violation"


class ExtrapolationUnstable(NumericalError):
    code = "extrapolation_unstable"


# correlators
class NonGenericNeedsLimit(NumericalError):
    code = "non_generic_needs_limit"


# correlation matrix
class SingularM0(NumericalError):
    code = "singular_m0"


class NonConvergent(NumericalError):
    code = "non_convergent"


# transfer spectrum
class NotStronglyGeneric(ValidationError):
    code = "not_strongly_generic"


class OddWindingUnsupported(ValidationError):
    code = "odd_winding_unsupported"


class DegenerateQuartic(ValidationError):
    code = "degenerate_quartic"


# approximation
class SubsetCapExceeded(ValidationError):
    code = "subset_cap_exceeded"
