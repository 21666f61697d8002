"""Pseudo-spectral solver for generalized Boussinesq equations with integral
(nonlocal) initial conditions."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
