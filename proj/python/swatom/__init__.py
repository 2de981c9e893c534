"""Two-level atom in a standing-wave laser field."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
