"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so callers (and the
CLI) can react without string matching.
"""


class GopsError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class InstanceError(GopsError):
    """A problem instance (or one of its parts) violates a semantic rule."""


class ParseError(GopsError):
    """An instance document is malformed; ``path`` points at the offender."""

    def __init__(self, code: str, message: str, path: str = "$"):
        super().__init__(code, f"{path}: {message}")
        self.path = path


class LimitReachedError(GopsError):
    """A solver exhausted its node or time budget. ``best`` holds the best
    feasible result found so far, when one exists (not proven optimal)."""

    def __init__(self, message: str, best=None):
        super().__init__("limit-reached", message)
        self.best = best


class UncoverableAtomsError(GopsError):
    """Goal atoms that no admissible action-point pair can produce; the
    instance is infeasible before any search starts."""

    def __init__(self, atoms):
        self.atoms = tuple(atoms)
        listing = ", ".join(str(a) for a in self.atoms)
        super().__init__("uncoverable-atoms", f"no admissible pair produces: {listing}")


class BoundViolationError(GopsError):
    """A benchmark instance fell below its guaranteed approximation ratio.
    Carries the full report for inspection."""

    def __init__(self, message: str, report):
        super().__init__("bound-violation", message)
        self.report = report
