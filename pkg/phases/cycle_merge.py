"""
阶段2：圈合并
通过一条 G1 边把当前圈 C 与某个剩余基本圈连成一条路径
"""

from typing import Dict, List, Tuple

from traceloop.sdk.decorators import task

from models import LiftVertex, SearchPhase
from lift_graph.rotation import RotationPath
from settings import settings
from .base import Phase, PhaseResult
from .state import SearchState


class CycleMergePhase(Phase):
    """
    剩余基本圈总量较小时（情形 A）从剩余圈一侧探测，
    否则（情形 B）分批从 C 上距失活集合较远且互不相邻的顶点探测
    """

    phase = SearchPhase.CYCLE_MERGE

    @task(name="phase2_cycle_merge", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        if not state.remaining:
            state.hamilton_cycle = state.cycle
            return PhaseResult(next_phase=SearchPhase.DONE, reason="没有剩余基本圈，C 即哈密顿圈")

        cycle = state.cycle
        on_c = {v: i for i, v in enumerate(cycle)}
        mass = state.remaining_mass()
        if mass < state.thresholds.small_remainder:
            case = "A"
            c_vertex, other = self._case_a(state, on_c)
        else:
            case = "B"
            c_vertex, other = self._case_b(state, cycle)

        absorbed = self._build_path(state, cycle, on_c[c_vertex], other)
        state.metrics.phase2_invocations += 1
        self.record("merged", case=case, mass=mass, absorbed=absorbed, path_len=len(state.path))
        return PhaseResult(
            next_phase=SearchPhase.CLONING,
            reason=f"情形 {case}：经 {c_vertex}-{other} 合并长度 {absorbed} 的基本圈",
        )

    def _case_a(self, state: SearchState, on_c: Dict[LiftVertex, int]) -> Tuple[LiftVertex, LiftVertex]:
        lift = state.lift
        ids = sorted(state.remaining)
        for ci in state.rng.permutation(len(ids)):
            cyc = state.remaining[ids[int(ci)]]
            for vi in state.rng.permutation(len(cyc)):
                v = cyc[int(vi)]
                for w in lift.revealed_neighbors(v):
                    if w in on_c and lift.distance2_clear(w, exclude=v):
                        return w, v
                for w in lift.iter_g1_reveals(v):
                    self.charge(state)
                    if w in on_c and lift.distance2_clear(w, exclude=v):
                        return w, v
        raise self.restart("情形 A：剩余基本圈的全部顶点都没有连到 C 上合适的顶点")

    def _pick_probes(self, state: SearchState, cycle: List[LiftVertex]) -> List[LiftVertex]:
        lift = state.lift
        probes: List[LiftVertex] = []
        for idx in state.rng.permutation(len(cycle)):
            v = cycle[int(idx)]
            if not lift.distance2_clear(v):
                continue
            nbrs = set(lift.revealed_neighbors(v))
            if any(p in nbrs for p in probes):
                continue
            probes.append(v)
            if len(probes) >= state.thresholds.probe_batch:
                break
        return probes

    def _case_b(self, state: SearchState, cycle: List[LiftVertex]) -> Tuple[LiftVertex, LiftVertex]:
        lift = state.lift
        for _ in range(settings.MERGE_RETRY_LIMIT):
            probes = self._pick_probes(state, cycle)
            if not probes:
                break
            for v in probes:
                for w in lift.iter_g1_reveals(v):
                    self.charge(state)
                    if w in state.cycle_of:
                        return v, w
        raise self.restart(f"情形 B：{settings.MERGE_RETRY_LIMIT} 批探测后仍未连到剩余基本圈")

    def _build_path(self, state: SearchState, cycle: List[LiftVertex], c_pos: int, other: LiftVertex) -> int:
        """在连接边两侧断开 C 与 C'，得到覆盖二者的路径；返回被吸收圈的长度"""
        cid = state.cycle_of[other]
        other_cycle = state.remaining[cid]
        c_orders = self.cycle_orders(cycle, c_pos)
        # C 部分以 c 结尾：把从 c 出发的绕行反转
        c_parts = [order[::-1] for order in c_orders.values()]
        o_parts = list(self.cycle_orders(other_cycle, other_cycle.index(other)).values())
        c_part = self.choose_end(state, [(part[0], part) for part in c_parts])
        o_part = self.choose_end(state, [(part[-1], part) for part in o_parts])

        state.absorb(cid)
        state.path = RotationPath(c_part + o_part)
        state.cycle = None
        return len(other_cycle)
