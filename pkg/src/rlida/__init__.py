"""Lazy and rational lazy IDA* over pluggable search domains."""

from .kernels import COMPILED
from .metareason import DecisionPolicy, TimingModel
from .search import SearchConfig, SearchStats, Solution, ida_star

__all__ = ["COMPILED", "DecisionPolicy", "SearchConfig", "SearchStats", "Solution", "TimingModel", "ida_star"]
