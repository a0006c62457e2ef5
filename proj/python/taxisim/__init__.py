"""Finite-volume simulator for chemotaxis systems with consumed chemical signals.

The heavy lifting lives in the compiled extension `_taxisim`; this package
re-exports its public surface.
"""

from ._taxisim import *  # noqa: F401,F403
from ._taxisim import __doc__  # noqa: F401

__version__ = "0.1.0"
