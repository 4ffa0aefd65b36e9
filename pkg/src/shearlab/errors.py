"""Exception hierarchy.

Configuration problems (bad names, parameters outside a family's validity
region, violated preconditions) derive from :class:`ConfigurationError`;
failures that only show up while computing derive from :class:`NumericalError`.
The CLI maps the two branches to exit codes 2 and 3.
"""


class ShearlabError(Exception):
    pass


class ConfigurationError(ShearlabError, ValueError):
    pass


class NumericalError(ShearlabError, ArithmeticError):
    pass


class UnknownName(ConfigurationError):
    pass


class ParamOutOfRange(ConfigurationError):
    pass


class InvalidC(ConfigurationError):
    pass


class InsufficientSamples(ConfigurationError):
    pass


class PreconditionViolated(ConfigurationError):
    pass


class DomainError(ConfigurationError):
    pass


class OutsideDisc(ConfigurationError):
    pass


class NearZeroConstantTerm(NumericalError):
    pass


class NotUnitConstantTerm(NumericalError):
    pass


class NotZeroConstantTerm(NumericalError):
    pass


class DegenerateDilatation(NumericalError):
    pass


class VanishingDerivative(NumericalError):
    pass


class TransformUndefined(NumericalError):
    """The transformed map vanishes away from the origin."""
