"""
阶段3：路径吸收基本圈
"""

from traceloop.sdk.decorators import task

from models import SearchPhase
from lift_graph.errors import InvariantViolation
from lift_graph.rotation import RotationPath
from .base import Phase, PhaseResult
from .state import SearchState


class PathMergePhase(Phase):
    """路径端点与某个剩余基本圈之间的边已揭示时，把整个基本圈接到路径末端"""

    phase = SearchPhase.PATH_MERGE

    @task(name="phase3_path_merge", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        if state.link is None or state.path is None:
            raise InvariantViolation("阶段3 缺少连接边")
        end, hit = state.link
        if end != state.path.end or not state.lift.is_edge_revealed(end, hit):
            raise InvariantViolation(f"连接边 {end}-{hit} 不在路径端点上")
        if hit not in state.cycle_of:
            raise InvariantViolation(f"{hit} 不在剩余基本圈上")

        cid = state.cycle_of[hit]
        cyc = state.remaining[cid]
        orders = list(self.cycle_orders(cyc, cyc.index(hit)).values())
        part = self.choose_end(state, [(order[-1], order) for order in orders])

        state.absorb(cid)
        state.path = RotationPath(state.path.verts + part)
        state.clear_working_sets()
        state.metrics.phase3_invocations += 1
        self.record("absorbed", cycle_len=len(cyc), path_len=len(state.path), remaining=len(state.remaining))
        return PhaseResult(next_phase=SearchPhase.CLONING, reason=f"经 {end}-{hit} 吸收长度 {len(cyc)} 的基本圈")
