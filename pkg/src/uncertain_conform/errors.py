"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input document or value violates a structural invariant."""


class CapExceeded(RuntimeError):
    """Raised when an enumeration or exploration exceeds its configured cap.

    The message names the cap that was hit; callers that batch work (e.g. the
    CLI) translate this into a "capped" marker instead of aborting.
    """
