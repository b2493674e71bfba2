"""Road-map fusion and road-closure detection (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
