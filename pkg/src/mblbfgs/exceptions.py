"""Exception types shared across the package."""


class MblbfgsError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(MblbfgsError, ValueError):
    """Vector operands have incompatible lengths."""


class SamplingError(MblbfgsError, ValueError):
    """An index draw was requested that the population cannot satisfy."""


class ConfigError(MblbfgsError, ValueError):
    """A configuration field is missing, malformed, or inconsistent."""


class DataFormatError(MblbfgsError, ValueError):
    """A dataset file could not be parsed."""


class MetricError(MblbfgsError, ValueError):
    """A metric was evaluated on invalid inputs."""


class NumericError(MblbfgsError, ArithmeticError):
    """A computation produced non-finite values."""


class TrainingDiverged(MblbfgsError, RuntimeError):
    """A training run hit non-finite losses or gradients."""

    def __init__(self, message: str, *, iteration: int, m_k: int, q_k: int):
        super().__init__(f"{message} (iteration={iteration}, m_k={m_k}, q_k={q_k})")
        self.iteration = iteration
        self.m_k = m_k
        self.q_k = q_k
