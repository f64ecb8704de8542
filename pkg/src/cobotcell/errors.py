"""Exception types shared across the package."""

__all__ = [
    "CapacityError",
    "ContractViolation",
    "JobFileError",
    "ScenarioError",
]


class JobFileError(ValueError):
    """A job description file is malformed or fails validation."""


class ScenarioError(ValueError):
    """A scenario script is malformed or references unknown tasks."""


class CapacityError(ValueError):
    """Problem size exceeds the exact-solve capacity cap."""


class ContractViolation(RuntimeError):
    """An operation was called outside its documented precondition."""
