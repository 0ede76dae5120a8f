"""Exception and warning types shared across the package."""


class KemosimError(Exception):
    """Base class for all package-specific errors."""


class DomainError(KemosimError):
    """An evaluation was requested outside a function's admissible domain
    (e.g. a motility family singular at v=0 evaluated at v=0, or an invalid
    scan range)."""


class NegativeMotility(KemosimError):
    """The diffusivity gamma(v) came out <= 0 somewhere it was evaluated.
    Positivity of gamma is a hard structural requirement."""


class ConfigError(KemosimError):
    """An experiment configuration failed validation.

    Carries the full list of field-level violations so a user sees every
    problem at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(
            f"  - {v}" for v in self.violations))


class PositivityLost(KemosimError):
    """The time stepper could not keep u >= 0 / v above its floor."""


class DegenerateDiffusionWarning(UserWarning):
    """Face diffusivity dropped below the configured floor: the diffusion
    term is close to degenerate and the explicit scheme may be inaccurate."""
