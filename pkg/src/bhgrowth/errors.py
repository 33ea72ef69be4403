"""Exception hierarchy shared by the library and the command line harness."""


class BHGrowthError(ValueError):
    """Base class for all library errors."""


class InvalidRuleError(BHGrowthError):
    """A sequence rule produced a value outside its admissible range."""


class DegenerateError(BHGrowthError):
    """Input is well formed but too degenerate for the requested computation."""


class RejectedSpecError(BHGrowthError):
    """A growth specification violates its structural requirements."""


class DomainError(BHGrowthError):
    """Argument lies outside the domain of a function."""
