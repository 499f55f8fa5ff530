"""Anonymous moment estimation over a quantum sensing network."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, FieldConfig

__version__ = "0.1.0"
