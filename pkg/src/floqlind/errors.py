"""Exception types raised across the package."""


class FloqlindError(Exception):
    """Base class for all package errors."""


class DimensionError(FloqlindError, ValueError):
    pass


class DomainError(FloqlindError, ValueError):
    pass


class UnsupportedModelError(FloqlindError, ValueError):
    pass


class IntegrationAccuracyError(FloqlindError, RuntimeError):
    """Step doubling hit the cap before the convergence gate passed."""

    def __init__(self, message, defect_coarse, defect_fine):
        super().__init__(message)
        self.defect_coarse = defect_coarse
        self.defect_fine = defect_fine


class InvalidGeneratorError(FloqlindError, ValueError):
    pass


class NearDefectiveError(FloqlindError, ArithmeticError):
    pass


class BranchAmbiguityError(FloqlindError, ArithmeticError):
    pass


class SingularMapError(FloqlindError, ArithmeticError):
    pass


class ClassificationError(FloqlindError, ArithmeticError):
    pass


class UnreachableNoiseError(FloqlindError, ArithmeticError):
    pass


class DegenerateTrainingError(FloqlindError, ValueError):
    pass


class DataError(FloqlindError, ValueError):
    pass


class SchemaError(FloqlindError, ValueError):
    pass


class ParseError(FloqlindError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# flag names recorded on labeled points instead of raising
FLAG_NEAR_DEFECTIVE = "near-defective"
FLAG_BRANCH_AMBIGUITY = "branch-ambiguity"
FLAG_CONVERGENCE = "convergence"
FLAG_SINGULAR = "singular"
FLAG_CLASSIFICATION = "classification"
FLAG_UNREACHABLE_NOISE = "unreachable-noise"
FLAG_DEGENERATE_EIGENSYSTEM = "degenerate-eigensystem"
