"""Scrubber pressure loop with sensor-fault-tolerant control."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DomainError,
    RuntimeFailure,
    Scenario,
    ValidationError,
    run_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
