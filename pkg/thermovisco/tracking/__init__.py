# flake8: noqa

from thermovisco.tracking.errors import *
