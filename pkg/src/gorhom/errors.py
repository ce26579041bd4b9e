"""Shared error hierarchy."""


class GorhomError(Exception):
    """Base class for all errors raised by this package."""


class InternalInconsistency(GorhomError):
    """A runtime cross-check failed; indicates an implementation bug."""
