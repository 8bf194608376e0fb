"""Littlewood-Paley calculus and a spectral 2D Euler solver."""

from .version import version as __version__  # noqa
