# flake8: noqa

from thermovisco.tensors.algebra import *
from thermovisco.tensors.config import *
