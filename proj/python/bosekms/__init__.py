"""Thermal propagators, HS averaging and convergence bounds on periodic lattices."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
