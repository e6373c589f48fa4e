"""Exception types shared across the engines."""

from __future__ import annotations


class RevivalSimError(Exception):
    """Base class for all package-specific failures."""


class TailOverflowError(RevivalSimError):
    """Truncated Fock space dropped more probability than the tolerance allows."""


class PurityGuardError(RevivalSimError):
    """A pure-state-only quantity was requested for a mixed joint state."""


class ConfigError(RevivalSimError):
    """Run configuration is invalid or inconsistent."""
