"""
七阶段哈密顿圈搜索
"""

from .adjusting import AdjustingPhase
from .base import Phase, PhaseResult
from .cloning import CloningPhase
from .closing import ClosingPhase
from .cycle_lift import CycleLiftPhase
from .cycle_merge import CycleMergePhase
from .multiply_ends import MultiplyEndsPhase
from .path_merge import PathMergePhase
from .state import SearchState

__all__ = [
    "AdjustingPhase",
    "CloningPhase",
    "ClosingPhase",
    "CycleLiftPhase",
    "CycleMergePhase",
    "MultiplyEndsPhase",
    "PathMergePhase",
    "Phase",
    "PhaseResult",
    "SearchState",
]
