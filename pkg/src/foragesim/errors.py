"""Exception hierarchy shared across the package."""


class ForageSimError(Exception):
    """Base class for all package errors."""


class ConfigError(ForageSimError):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The config text could not be parsed at all."""


class ConfigValidationError(ConfigError):
    """A parsed config violates an invariant.

    `field` names the offending key so callers (and tests) can point at it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


class CapacityError(ForageSimError):
    """A spawn batch did not fit into the set under strict overflow policy."""


class NumericalError(ForageSimError):
    """Non-finite state detected; carries the agent uid and step when known."""

    def __init__(self, message: str, uid: int | None = None, step: int | None = None):
        super().__init__(message)
        self.uid = uid
        self.step = step


class AuditError(ForageSimError):
    """A debug-mode state audit found a contract violation."""


class CheckpointError(ForageSimError):
    """Checkpoint bytes are malformed or inconsistent."""


class FrameFormatError(ForageSimError):
    """A snapshot frame file is malformed; names the file and line."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no
