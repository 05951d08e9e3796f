"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (``"OUT_OF_RANGE"``,
``"TOO_FEW_TRIALS"`` ...) and maps onto a process exit status used by the
command line front-end.
"""


class BCIError(Exception):
    """Base class; ``code`` names the failure, ``exit_code`` the CLI status."""

    exit_code = 2

    def __init__(self, code, message=""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class ValidationError(BCIError):
    """Bad arguments, malformed files, inconsistent dimensions."""

    exit_code = 2


class ComputationError(BCIError):
    """Numeric or training failure (degenerate data, too few trials ...)."""

    exit_code = 3


class SinkDisconnected(BCIError):
    """The command sink went away. ``summary`` holds the partial replay report."""

    exit_code = 4

    def __init__(self, message="", summary=None):
        super().__init__("SINK_DISCONNECTED", message)
        self.summary = summary


class BindFailed(BCIError):
    exit_code = 2

    def __init__(self, message=""):
        super().__init__("BIND_FAILED", message)
