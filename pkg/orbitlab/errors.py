"""
Exception hierarchy for orbitlab.

Every domain error derives from ValueError so the CLI maps it to the
precondition exit code without special cases.
"""


class OrbitlabError(ValueError):
    """Base class for all orbitlab errors."""

    kind = "error"

    def to_dict(self):
        return {"kind": self.kind, "message": str(self)}


class PreconditionError(OrbitlabError):
    kind = "precondition"


class ResolutionError(OrbitlabError):
    """A bounded search (shift, factor choice) found nothing."""

    kind = "resolution"


class IndeterminateError(OrbitlabError):
    """A numeric decision margin fell below the requested epsilon."""

    kind = "indeterminate"


class PrecisionError(OrbitlabError):
    kind = "raise_precision"


class HenselError(OrbitlabError):
    kind = "hensel_inapplicable"


class ConvergenceError(OrbitlabError):
    kind = "convergence"


class InconclusiveTruncationError(OrbitlabError):
    kind = "inconclusive_truncation"


class NotPolydiskSelfMapError(OrbitlabError):
    kind = "not_polydisk_self_map"


class NormalFormRequiredError(OrbitlabError):
    kind = "normal_form_required"


class FieldCapError(OrbitlabError):
    kind = "field_cap"


class IndeterminatePointError(OrbitlabError):
    kind = "indeterminate_point"


class DegenerateLocusError(OrbitlabError):
    kind = "positive_dimensional_fixed_locus"


class HypothesisViolatedError(OrbitlabError):
    kind = "hypothesis_violated"


class UnknownCommandError(OrbitlabError):
    kind = "unknown_command"


class ManifestError(OrbitlabError):
    kind = "malformed_spec"
