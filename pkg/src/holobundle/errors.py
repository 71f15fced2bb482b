"""Exception hierarchy shared by all holobundle modules."""


class HolobundleError(Exception):
    """Base class for every error raised by the toolkit."""


class AlgebraMismatchError(HolobundleError, ValueError):
    """Operands live in different algebras (matrix sizes disagree)."""


class SingularElementError(HolobundleError, ValueError):
    """A group element (or a grid value of a gauge map) is not invertible."""


class LogBranchError(HolobundleError, ValueError):
    """Matrix logarithm requested for a spectrum touching the branch cut."""


class GeometryMismatchError(HolobundleError, ValueError):
    """Fields or forms defined on different tori / grids were combined."""


class BidegreeError(HolobundleError, ValueError):
    """A form of the wrong degree or (p, q) type was supplied."""


class CurvatureObstructionError(HolobundleError):
    """Periods were requested for a form that does not satisfy F(omega) = 0."""


class IntegrationError(HolobundleError):
    """The geometric ODE integrator failed its accuracy check."""


class AbelianOnlyError(HolobundleError, ValueError):
    """The operation is only defined for the abelian algebra gl(1)."""


class NotCommutingError(HolobundleError, ValueError):
    """A pair of group elements does not commute."""


class ConfigError(HolobundleError, ValueError):
    """Scenario configuration failed validation.

    ``problems`` lists every violated field, one message each.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
