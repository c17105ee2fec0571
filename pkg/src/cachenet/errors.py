"""Exception types raised across the package."""


class CacheNetError(Exception):
    """Base class for every error raised by cachenet."""


class ConfigError(CacheNetError, ValueError):
    """Network parameters violate a structural constraint."""


class NonDivisible(ConfigError):
    pass


class NonIntegerDelta(ConfigError):
    pass


class InsufficientTxMemory(ConfigError):
    pass


class DimensionTooSmall(ConfigError):
    pass


class DemandError(CacheNetError, ValueError):
    pass


class BadLength(DemandError):
    pass


class FileIndexOutOfRange(DemandError):
    pass


class DuplicateLabel(CacheNetError, ValueError):
    pass


class TooLarge(CacheNetError):
    """Requested enumeration or search exceeds its configured cap."""


class InfeasibleWindow(CacheNetError, ValueError):
    pass


class NotApplicable(CacheNetError):
    """A formula or construction is used outside its regime of validity."""


class Infeasible(CacheNetError):
    pass


class MemoryViolation(CacheNetError):
    def __init__(self, node, load, expected):
        self.node = node
        self.load = load
        self.expected = expected
        super().__init__(f"{node} stores {load} file units, expected {expected}")


class DegenerateChannel(CacheNetError):
    pass


class DecodeFailure(CacheNetError):
    def __init__(self, failures):
        self.failures = list(failures)
        head = "; ".join(str(f) for f in self.failures[:5])
        more = f" (+{len(self.failures) - 5} more)" if len(self.failures) > 5 else ""
        super().__init__(f"{len(self.failures)} decode failure(s): {head}{more}")
