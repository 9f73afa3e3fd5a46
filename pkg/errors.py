"""
Error hierarchy for the bispectral toolkit.

Every error carries a stable machine-readable ``code`` and the process exit
status the CLI maps it to. Extra context goes into ``details``.
"""

VERIFICATION_FAILED = 1
USAGE_ERROR = 2
COMPUTATION_ERROR = 3


class ToolkitError(Exception):
    code = "TOOLKIT_ERROR"
    exit_status = COMPUTATION_ERROR

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def to_dict(self):
        return {
            "code": self.code,
            "message": self.message,
            "details": dict(self.details),
        }


# --- exactnum ---

class ReducibleMinimalPolynomial(ToolkitError):
    code = "REDUCIBLE_MINIMAL_POLYNOMIAL"
    exit_status = USAGE_ERROR


class UnsupportedFieldSplit(ToolkitError):
    code = "UNSUPPORTED_FIELD_SPLIT"


class ZeroArgument(ToolkitError):
    code = "ZERO_ARGUMENT"


class PrecisionUnderflow(ToolkitError):
    code = "PRECISION_UNDERFLOW"


class IntegrationObstruction(ToolkitError):
    code = "INTEGRATION_OBSTRUCTION"


# --- diffop ---

class ZeroOperator(ToolkitError):
    code = "ZERO_OPERATOR"


class NotNormalized(ToolkitError):
    code = "NOT_NORMALIZED"


class CoefficientNotVanishing(ToolkitError):
    code = "COEFFICIENT_NOT_VANISHING"


class GrowingCoefficient(ToolkitError):
    code = "GROWING_COEFFICIENT"


class NonMonicDivisor(ToolkitError):
    code = "NON_MONIC_DIVISOR"


# --- psdo ---

class NonUnitLeadingCoefficient(ToolkitError):
    code = "NON_UNIT_LEADING_COEFFICIENT"


class DepthExhausted(ToolkitError):
    code = "DEPTH_EXHAUSTED"


class UnsupportedCoefficient(ToolkitError):
    code = "UNSUPPORTED_COEFFICIENT"


# --- bessel ---

class ResonantBeta(ToolkitError):
    code = "RESONANT_BETA"


# --- darboux ---

class NotInKernel(ToolkitError):
    code = "NOT_IN_KERNEL"
    exit_status = VERIFICATION_FAILED


class MonodromyNotClosed(ToolkitError):
    code = "MONODROMY_NOT_CLOSED"
    exit_status = VERIFICATION_FAILED


class ZeroWronskian(ToolkitError):
    code = "ZERO_WRONSKIAN"


class LogResidue(ToolkitError):
    code = "LOG_RESIDUE"
    exit_status = VERIFICATION_FAILED


class NotARightFactor(ToolkitError):
    code = "NOT_A_RIGHT_FACTOR"
    exit_status = VERIFICATION_FAILED


class NotAPerfectPower(ToolkitError):
    code = "NOT_A_PERFECT_POWER"
    exit_status = VERIFICATION_FAILED


class ResonanceBelowMinimal(ToolkitError):
    code = "RESONANCE_BELOW_MINIMAL"


class NonzeroRemainder(ToolkitError):
    code = "NONZERO_REMAINDER"
    exit_status = VERIFICATION_FAILED


class InvarianceLost(ToolkitError):
    code = "INVARIANCE_LOST"
    exit_status = VERIFICATION_FAILED


class ReconstructionFailed(ToolkitError):
    code = "RECONSTRUCTION_FAILED"


# --- bispectral ---

class NotFound(ToolkitError):
    code = "NOT_FOUND"
    exit_status = VERIFICATION_FAILED


class TailNotVanishing(ToolkitError):
    code = "TAIL_NOT_VANISHING"
    exit_status = VERIFICATION_FAILED


class ResidualNonzero(ToolkitError):
    code = "RESIDUAL_NONZERO"
    exit_status = VERIFICATION_FAILED


class NoStringNumber(ToolkitError):
    code = "NO_STRING_NUMBER"
    exit_status = VERIFICATION_FAILED


class IdentityFailed(ToolkitError):
    code = "IDENTITY_FAILED"
    exit_status = VERIFICATION_FAILED


# --- classify ---

class StepLimitExceeded(ToolkitError):
    code = "STEP_LIMIT_EXCEEDED"


class NonzeroStringNumberAtTermination(ToolkitError):
    code = "NONZERO_STRING_NUMBER_AT_TERMINATION"
    exit_status = VERIFICATION_FAILED


class NotAdmissible(ToolkitError):
    code = "NOT_ADMISSIBLE"
    exit_status = VERIFICATION_FAILED


# --- parser / cli ---

class OperatorSyntaxError(ToolkitError):
    code = "SYNTAX_ERROR"
    exit_status = USAGE_ERROR

    def __init__(self, message, position, text=""):
        super().__init__(f"{message} at position {position}", position=position, text=text)
        self.position = position


class UnknownSymbol(ToolkitError):
    code = "UNKNOWN_SYMBOL"
    exit_status = USAGE_ERROR
