"""Quantum thermodynamics of the boundary time crystal.

Thin re-export of the compiled ``_btc`` module. Operators are complex numpy
arrays in the Dicke basis ordered from m = N/2 down to m = -N/2.
"""

from ._btc import *  # noqa: F401,F403
from ._btc import __doc__  # noqa: F401

__version__ = "0.1.0"
