"""Exception hierarchy shared by all pipeline modules."""


class SatdError(Exception):
    """Base class for every error raised by the pipeline."""


class ConfigError(SatdError):
    """Config file unreadable or holds invalid values."""


class InvalidConfig(SatdError):
    """A model or stage config violates its invariants."""


# corpus
class MalformedRow(SatdError):
    def __init__(self, row_index: int, reason: str):
        self.row_index = row_index
        super().__init__(f"Malformed row {row_index}: {reason}")


class UnknownLabel(SatdError):
    pass


class DuplicateId(SatdError):
    pass


class ClassTooSmall(SatdError):
    def __init__(self, label: str, count: int):
        self.label = label
        super().__init__(f"Class {label} has {count} instances, need at least 3 for a three-way split")


# augment
class EmptyDistribution(SatdError):
    pass


class DegenerateDistribution(SatdError):
    pass


class LeakageError(SatdError):
    pass


# gateway
class GatewayError(SatdError):
    pass


class AuthError(GatewayError):
    pass


class RateLimited(GatewayError):
    pass


class ParseError(GatewayError):
    pass


class GenerationTimeout(GatewayError):
    pass


class GatewayExhausted(GatewayError):
    pass


class EmptyParaphrase(GatewayError):
    pass


# models
class EmptyCorpus(SatdError):
    pass


class EmptyClass(SatdError):
    pass


class Divergence(SatdError):
    pass


# metrics
class LengthMismatch(SatdError):
    pass


class EmptyInput(SatdError):
    pass


# keywords
class ZeroVector(SatdError):
    pass


class DimensionMismatch(SatdError):
    pass


class EmptyGroup(SatdError):
    pass


class AugmentedInputRejected(SatdError):
    pass
