# flake8: noqa

from thermovisco.runner.config import *
from thermovisco.runner.container import *
from thermovisco.runner.convergence import *
from thermovisco.runner.errors import *
from thermovisco.runner.initial_data import *
from thermovisco.runner.material_table import *
from thermovisco.runner.registry import *
from thermovisco.runner.simulation import *
from thermovisco.runner.sweep import *
from thermovisco.runner.validation import *
