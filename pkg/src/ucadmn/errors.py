"""Exception hierarchy shared by all ucadmn modules."""


class UcaDmnError(Exception):
    """Base class for every error raised by this package."""


class SingularConversion(UcaDmnError):
    """A representation change would invert an ill-conditioned matrix."""


class SingularTermination(UcaDmnError):
    """Terminating a multiport hit a numerically singular block."""


class SingularImpedance(UcaDmnError):
    pass


class SingularOverlap(UcaDmnError):
    pass


class SingularComposition(UcaDmnError):
    pass


class EmptySweep(UcaDmnError):
    pass


class StubResonance(UcaDmnError):
    """An open stub sits at an odd multiple of a quarter wavelength."""


class StarResonance(UcaDmnError):
    pass


class ResonantAngle(UcaDmnError):
    pass


class GeometryInvalid(UcaDmnError):
    pass


class UnrealizableImpedance(UcaDmnError):
    """A line impedance came out non-positive or outside the realizable window."""


class QuadratureNotConverged(UcaDmnError):
    pass


class SynthesisError(UcaDmnError):
    """Base for closed-form synthesis failures (CLI exit code 2)."""


class Infeasible(SynthesisError):
    def __init__(self, deficit: float):
        self.deficit = deficit
        super().__init__(
            f"two-stage synthesis infeasible: a^2 + 2ab - 3b^2 = {deficit:.6g} < 0"
        )


class NoRealRoot(SynthesisError):
    def __init__(self, roots):
        self.roots = list(roots)
        super().__init__(f"no real root for the augmentation quartic; roots = {self.roots}")


class AllRootsDegenerate(SynthesisError):
    def __init__(self, roots):
        self.roots = list(roots)
        super().__init__(
            "every real root implies an infinite augmentation susceptance; "
            f"roots = {self.roots}"
        )


class CmsInconsistent(UcaDmnError):
    pass


class BudgetExhaustedNoFeasible(UcaDmnError):
    pass


class ParseError(UcaDmnError):
    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class ArityError(ParseError):
    pass


class UnsupportedVersion(ParseError):
    pass


class IoError(UcaDmnError, OSError):
    """A result file could not be written."""
