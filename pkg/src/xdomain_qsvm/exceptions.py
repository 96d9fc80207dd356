"""Exception types raised across the package."""


class ContractError(ValueError):
    """An input violated a documented precondition (shape, hermiticity, finiteness)."""


class ParameterError(ValueError):
    """A state-family parameter lies outside its allowed range."""


class InfeasiblePointError(ValueError):
    """Parameters do not describe a positive semidefinite density matrix."""


class SamplingExhaustedError(RuntimeError):
    """Rejection sampling used its whole draw budget without acceptance."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""
