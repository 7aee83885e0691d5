# flake8: noqa

from thermovisco.diagnostics.balances import *
from thermovisco.diagnostics.chains import *
from thermovisco.diagnostics.config import *
from thermovisco.diagnostics.limits import *
from thermovisco.diagnostics.records import *
from thermovisco.diagnostics.writers import *
