"""
阶段基类实现
每个阶段读取并修改 SearchState，返回下一阶段；预算计费和事件记录在这里统一处理
"""

from typing import Any, Dict, List, Sequence, Tuple

from opentelemetry import trace
from pydantic import BaseModel, Field

from models import LiftVertex, SearchPhase
from lift_graph.rotation import RotationPath
from lift_graph.errors import PhaseRestart
from .state import SearchState


class PhaseResult(BaseModel):
    """阶段执行结果"""

    next_phase: SearchPhase = Field(..., description="下一阶段")
    reason: str = Field(..., description="跳转原因")


class Phase:
    """
    阶段基类
    子类设置 phase 并实现 execute
    """

    phase: SearchPhase = None

    def execute(self, state: SearchState) -> PhaseResult:
        """
        执行阶段任务

        Args:
            state: 搜索状态

        Returns:
            PhaseResult: 下一阶段及原因
        """
        raise NotImplementedError("Subclasses must implement execute method")

    def charge(self, state: SearchState, kind: str = "reveal") -> None:
        """
        按揭示/旋转计费，超过每阶段预算时发出重启信号

        Raises:
            PhaseRestart: 预算耗尽
        """
        state.budget_used += 1
        if kind == "rotate":
            state.metrics.rotations += 1
        if state.budget_used > state.thresholds.rotation_budget:
            raise PhaseRestart(self.phase, f"预算 {state.thresholds.rotation_budget} 耗尽")

    def charger(self, state: SearchState):
        return lambda kind: self.charge(state, kind)

    def restart(self, reason: str) -> PhaseRestart:
        return PhaseRestart(self.phase, reason)

    def record(self, name: str, **attributes: Any) -> None:
        """在当前 span 上记录结构化事件"""
        current_span = trace.get_current_span()
        current_span.add_event(
            name=f"{self.phase.value}.{name}",
            attributes={k: v if isinstance(v, (bool, int, float, str)) else str(v) for k, v in attributes.items()},
        )

    def pick(self, state: SearchState, candidates: Sequence[Any]) -> Any:
        """在候选中均匀随机选择"""
        return candidates[int(state.rng.integers(len(candidates)))]

    def choose_end(self, state: SearchState, options: List[Tuple[LiftVertex, Any]]) -> Any:
        """
        按新端点优先级选择：与失活集合距离至少 2 优先，其次活跃，平局随机

        Args:
            options: (候选端点, 对应的结果) 列表
        """

        def score(v: LiftVertex) -> Tuple[bool, bool]:
            return state.lift.distance2_clear(v), state.lift.is_active(v)

        best = max(score(v) for v, _ in options)
        return self.pick(state, [payload for v, payload in options if score(v) == best])

    def link_to_cycle(self, state: SearchState, full_path: RotationPath, hit: LiftVertex) -> PhaseResult:
        """端点揭示到剩余基本圈：保存完整路径与连接边，转入阶段3"""
        state.path = full_path
        state.link = (full_path.end, hit)
        self.record("basic_cycle_hit", end=str(full_path.end), hit=str(hit))
        return PhaseResult(next_phase=SearchPhase.PATH_MERGE, reason=f"端点 {full_path.end} 连到基本圈顶点 {hit}")

    @staticmethod
    def cycle_orders(cycle: List[LiftVertex], at: int) -> Dict[str, List[LiftVertex]]:
        """从位置 at 出发沿两个方向绕圈一周"""
        forward = cycle[at:] + cycle[:at]
        backward = [cycle[at]] + cycle[:at][::-1] + cycle[at + 1 :][::-1]
        return {"forward": forward, "backward": backward}
