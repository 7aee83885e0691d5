# flake8: noqa

from thermovisco.materials.classification import *
from thermovisco.materials.config import *
from thermovisco.materials.functionals import *
from thermovisco.materials.heat_capacity import *
from thermovisco.materials.inequalities import *
