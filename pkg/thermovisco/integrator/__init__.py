# flake8: noqa

from thermovisco.integrator.checkpoint import *
from thermovisco.integrator.config import *
from thermovisco.integrator.errors import *
from thermovisco.integrator.forcing import *
from thermovisco.integrator.state import *
from thermovisco.integrator.stepper import *
