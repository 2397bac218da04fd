"""Python interface to the nilpotent_atlas C++ core."""

from ._core import *  # noqa: F401,F403
