"""
搜索状态
一次重启轮次内七个阶段共享的可变状态
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from models import BaseInstance, LiftVertex, Thresholds, TrialMetrics
from lift_graph.errors import InvariantViolation
from lift_graph.lift import LiftState
from lift_graph.rotation import RotationPath
from .explorer import EndExplorer


@dataclass
class SearchState:
    """
    七阶段算法的工作状态

    cycle 与 path 至多一个非空；它们的顶点与 remaining 中的基本圈构成全部提升顶点的划分
    """

    inst: BaseInstance
    lift: LiftState
    thresholds: Thresholds
    attempt: int = 0
    cycle: Optional[List[LiftVertex]] = None
    path: Optional[RotationPath] = None
    remaining: Dict[int, List[LiftVertex]] = field(default_factory=dict)
    cycle_of: Dict[LiftVertex, int] = field(default_factory=dict)
    # 阶段3 的连接边：(路径端点, 剩余基本圈上的顶点)，路径端点即 path.end
    link: Optional[Tuple[LiftVertex, LiftVertex]] = None
    clones: List[RotationPath] = field(default_factory=list)
    half_a: Optional[EndExplorer] = None
    half_b: Optional[EndExplorer] = None
    adjusted_a: Dict[LiftVertex, RotationPath] = field(default_factory=dict)
    adjusted_b: Dict[LiftVertex, RotationPath] = field(default_factory=dict)
    target_edge: Optional[Tuple[int, int]] = None
    hamilton_cycle: Optional[List[LiftVertex]] = None
    metrics: TrialMetrics = field(default_factory=TrialMetrics)
    budget_used: int = 0

    @property
    def rng(self) -> np.random.Generator:
        return self.lift.rng

    @property
    def n(self) -> int:
        return self.lift.n

    def set_remaining(self, cycles: List[List[LiftVertex]]) -> None:
        self.remaining = dict(enumerate(cycles))
        self.cycle_of = {v: cid for cid, cyc in self.remaining.items() for v in cyc}

    def remaining_mass(self) -> int:
        return sum(len(c) for c in self.remaining.values())

    def absorb(self, cycle_id: int) -> List[LiftVertex]:
        """从剩余基本圈中移除并返回该圈"""
        cycle = self.remaining.pop(cycle_id)
        for v in cycle:
            del self.cycle_of[v]
        self.metrics.cycles_absorbed += 1
        return cycle

    def clear_working_sets(self) -> None:
        self.link = None
        self.clones = []
        self.half_a = None
        self.half_b = None
        self.adjusted_a = {}
        self.adjusted_b = {}

    def covered(self) -> List[LiftVertex]:
        if self.path is not None:
            return self.path.verts
        return self.cycle or []

    def check_partition(self) -> None:
        """
        V(C 或 P) 与剩余基本圈不交，且并集为全部 k·n 个顶点

        Raises:
            InvariantViolation: 划分不变量被破坏
        """
        covered = self.covered()
        seen = set(covered)
        if len(seen) != len(covered):
            raise InvariantViolation("当前路径/圈上存在重复顶点")
        total = len(seen)
        for cid, cyc in self.remaining.items():
            for v in cyc:
                if v in seen:
                    raise InvariantViolation(f"顶点 {v} 同时属于路径/圈与基本圈 {cid}")
                seen.add(v)
            total += len(cyc)
        if total != self.lift.num_vertices or len(seen) != total:
            raise InvariantViolation(f"覆盖顶点数 {len(seen)} 不等于 {self.lift.num_vertices}")

    def outside_inactive_count(self) -> int:
        """当前路径/圈之外的失活顶点数"""
        return sum(1 for v in self.lift.inactive if v in self.cycle_of)
