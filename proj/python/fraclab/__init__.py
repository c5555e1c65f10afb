from ._fraclab import *  # noqa: F401,F403
from ._fraclab import DomainError, ConvergenceError, DivergenceError  # noqa: F401

__version__ = "0.1.0"
