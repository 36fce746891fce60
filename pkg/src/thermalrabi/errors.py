"""Exception types shared across the package."""


class ThermalRabiError(Exception):
    """Base class for all package errors."""


class DimensionError(ThermalRabiError, ValueError):
    """Operator/space dimension mismatch or invalid dimension."""


class HermiticityError(ThermalRabiError, ValueError):
    """A matrix flagged Hermitian fails the max-norm tolerance check."""


class ModelError(ThermalRabiError, ValueError):
    """Invalid model parameters (frequencies, couplings, truncations)."""


class UndefinedStatisticsError(ThermalRabiError, ArithmeticError):
    """Photon flux below the numerical floor: normalized statistics are 0/0."""


class ZeroTransitionError(ThermalRabiError, ValueError):
    """A requested filtered transition has (numerically) zero matrix element."""


class DegenerateSteadyStateError(ThermalRabiError, RuntimeError):
    """Liouvillian null space is not one-dimensional."""


class StiffnessError(ThermalRabiError, RuntimeError):
    """Time propagation produced non-finite entries."""


class WindowError(ThermalRabiError, ValueError):
    """Correlation window too short: the decay is not resolved."""


class ConfigError(ThermalRabiError, ValueError):
    """Invalid sweep configuration (unknown key, range violation, bad file)."""
