# flake8: noqa

from thermovisco.grid.grid import *
from thermovisco.grid.operators import *
from thermovisco.grid.snapshots import *
from thermovisco.grid.solvers import *
