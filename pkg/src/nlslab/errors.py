"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value violates a precondition (bad lattice, theta <= 0, ...)."""


class ContractError(ValueError):
    """Inputs violate an interface contract (mismatched cutoffs, misaligned trajectories)."""


class BlowUpError(RuntimeError):
    """Grid sup-norm exceeded the blow-up guard during time integration."""
