"""Exception hierarchy shared by the engines and the CLI.

The CLI maps these onto distinct exit codes: configuration problems (2),
numerical solver failures (3) and physics preconditions that the requested
parameters simply do not satisfy (4).
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration / input data."""


class NumericsError(RuntimeError):
    """A numerical solver failed to converge or produced an invalid result."""


class PhysicsError(RuntimeError):
    """A physics precondition is not met (no metastable gap, cutoff not converged)."""
