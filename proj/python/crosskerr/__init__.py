"""Driven cross-Kerr gate simulation toolkit."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
