"""Random field ensembles and the inequality verification harness."""

from .generate import *
from .inequalities import *
