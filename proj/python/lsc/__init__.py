"""Python bindings for the lsc core library."""

from ._lsc import *  # noqa: F401,F403
from ._lsc import FormatError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
