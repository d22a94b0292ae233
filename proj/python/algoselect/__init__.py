"""Data-driven algorithm configuration: greedy heuristics, gradient descent
step sizes, online selection, empirical performance models and a
self-improving sorter."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
