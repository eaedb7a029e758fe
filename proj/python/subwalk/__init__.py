"""Subordinate random walks on Z^d."""

from ._core import *  # noqa: F401,F403
from ._core import (
    BernsteinSpec,
    ConfigError,
    DomainError,
    TransienceError,
    compute_weights,
    phi,
)

__all__ = [
    "BernsteinSpec",
    "ConfigError",
    "DomainError",
    "TransienceError",
    "compute_weights",
    "phi",
]
