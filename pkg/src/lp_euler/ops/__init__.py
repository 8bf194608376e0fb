"""Maximal functions and homogeneous Fourier multipliers."""

from .maximal import *
from .peetre import *
from .multipliers import *
