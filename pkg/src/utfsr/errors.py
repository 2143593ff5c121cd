"""Exception hierarchy shared by all modules."""


class UtfsrError(Exception):
    """Base class for every error raised by this package."""


class DenominatorVanishes(UtfsrError):
    def __init__(self, k):
        super().__init__(f"transfer denominator vanishes at grid index {k}")
        self.k = k


class SingularAtFrequency(UtfsrError):
    def __init__(self, k, cond=None):
        msg = f"matrix is singular at grid index {k}"
        if cond is not None:
            msg += f" (condition estimate {cond:.3g})"
        super().__init__(msg)
        self.k = k
        self.cond = cond


class ResolutionTooCoarse(UtfsrError):
    """Frequency grid too small for the memory of the model."""


class AlgebraicLoop(UtfsrError):
    """The zero-lag dependency graph contains a directed cycle."""


class DivergenceDetected(UtfsrError):
    """Simulation blew up; the loop dynamics are unstable."""


class SingularRegressorSpectrum(UtfsrError):
    pass


class GramSingular(UtfsrError):
    pass


class TailTooHeavy(UtfsrError):
    """Filter energy has not decayed within the lag window; increase the
    grid size or the maximum lag."""


class NumericalInconsistency(UtfsrError):
    pass


class SearchBudgetExceeded(UtfsrError):
    pass


class GenerationFailed(UtfsrError):
    pass
