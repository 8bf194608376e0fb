"""Grids, spectral fields, transforms and field files."""

from .grid import *
from .field import *
from .spectral import *
from .fileio import *
