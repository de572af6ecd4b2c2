"""Latent dynamic network estimation from matrix time series."""

try:
    from ._latnet import *  # noqa: F401,F403
except ImportError:  # pragma: no cover - build-tree layout
    from _latnet import *  # noqa: F401,F403
