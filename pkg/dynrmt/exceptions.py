##########################################################################
# Errors raised by the laboratory.
#
# The command line maps ConfigError to exit code 2 and NumericalFailure
# to exit code 3; everything else is a programming error.
##########################################################################


class ConfigError(ValueError):
    "An experiment configuration or Fourier spec is invalid."


class MeanNonzeroError(ConfigError):
    def __init__(self, c0):
        self.c0 = c0
        super().__init__(
            "mean-zero rule violated: evaluation functions need c_0 = 0, got c_0 = %r" % (c0,)
        )


class DomainError(ValueError):
    "A spectral point lies outside the domain of the requested transform."


class WindowError(ValueError):
    "An energy window is empty or leaves the bulk of the spectrum."


class SampleSizeError(ValueError):
    "Too few eigenvalues, gaps or spacings for the requested statistic."


class NumericalFailure(RuntimeError):
    "Base class for failures of a numerical routine on valid input."


class NonConvergence(NumericalFailure):
    def __init__(self, z, best, residual, iterations):
        self.z = z
        self.best = best
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            "self-consistent equation did not converge at z=%r after %d iterations "
            "(best iterate %r, residual %.3e)" % (z, iterations, best, residual)
        )


class CovarianceError(NumericalFailure):
    def __init__(self, minor, eigenvalue):
        self.minor = minor
        self.eigenvalue = eigenvalue
        super().__init__(
            "covariance is not positive semidefinite: leading minor of size %d "
            "has eigenvalue %.3e" % (minor, eigenvalue)
        )


class SolverError(NumericalFailure):
    def __init__(self, fingerprint, reason):
        self.fingerprint = fingerprint
        super().__init__("eigensolver failed on matrix %s: %s" % (fingerprint, reason))


class SingularMatrixError(NumericalFailure):
    "A matrix that must be inverted is numerically singular."


##########################################################################
# Warnings
##########################################################################

class AdmissibilityWarning(UserWarning):
    "A matrix was built from an evaluation function that is not admissible."


class CorrelationMismatchWarning(UserWarning):
    "Closed-form correlations disagree with their orbit-average estimate."


class UnfoldingWarning(UserWarning):
    "The unfolding density does not match the spectrum's own scale."


class ResamplingWarning(UserWarning):
    "The resampling window keeps every evaluated digit, so H_Y equals H_X."
