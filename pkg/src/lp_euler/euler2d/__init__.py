"""Pseudo-spectral 2D Euler solver with persistence diagnostics."""

from .presets import *
from .config import *
from .solver import *
from .gronwall import *
from .trajectory import *
from .simulation import *
