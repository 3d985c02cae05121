"""Non-neural tooling for pipeline speech translation."""

__version__ = "0.1.0"

from ._accel import backend  # noqa: E402,F401
