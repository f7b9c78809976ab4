"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Requested system size exceeds what dense storage supports."""


class ValidationError(ValueError):
    """A numerical object violates one of its physical invariants."""


class SolverError(RuntimeError):
    """The eigensolver backend failed to converge."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    Carries the full list of located error messages so a caller can
    report every problem at once instead of the first one found.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
