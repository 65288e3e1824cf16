"""Shared exception hierarchy.

Every domain error raised by this package derives from :class:`PragyaError`,
so callers (CLI, HTTP service) can map "expected" failures to exit code 1 or
a structured error body without catching bare ``Exception``.
"""


class PragyaError(Exception):
    """Base class for all domain errors raised by pragya."""

    code = "error"


class RemoteUnavailable(PragyaError):
    """A remote model server could not be reached (connect failure, timeout,
    or server-side 5xx), after any applicable retries."""

    code = "remote_unavailable"


class RemoteMalformed(PragyaError):
    """A remote model server answered, but not in the agreed wire format
    (bad status, bad JSON shape, or inconsistent embedding dimension)."""

    code = "remote_malformed"
