# flake8: noqa

from thermovisco.instrumentators.solver import *
