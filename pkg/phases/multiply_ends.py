"""
阶段5：端点倍增
"""

import math
from typing import Dict, List, Optional

from traceloop.sdk.decorators import task

from models import LiftVertex, SearchPhase
from lift_graph.errors import InvariantViolation
from lift_graph.rotation import RotationPath
from settings import settings
from .base import Phase, PhaseResult
from .explorer import EndExplorer, ExploreStatus
from .state import SearchState


def reconstruct_pair_path(a: EndExplorer, b: EndExplorer, x: LiftVertex, y: LiftVertex) -> RotationPath:
    """
    由两半的旋转历史重建 P_xy：前 |V1| 个顶点来自前半段，端点为 x 与 y

    Args:
        a: 前半段探索器（起点固定为中间顶点 wi）
        b: 后半段探索器（起点固定为 wi+1）
    """
    return RotationPath(a.path_to(x).verts[::-1] + b.path_to(y).verts)


class MultiplyEndsPhase(Phase):
    """
    把克隆路径在 ⌈t/2⌉ 处切成两半，分别固定中间两个顶点交替旋转，
    直到两侧端点集都达到目标规模或探索停滞；当前两端之间出现边时直接闭合成圈
    """

    phase = SearchPhase.MULTIPLY_ENDS

    @task(name="phase5_multiply_ends", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        for idx, clone in enumerate(state.clones):
            result = self._multiply(state, clone)
            if result is not None:
                return result
            self.record("clone_stalled", clone=idx)
        raise self.restart(f"全部 {len(state.clones)} 条克隆路径都停滞")

    def close(self, state: SearchState, cycle: List[LiftVertex], reason: str) -> PhaseResult:
        """闭合成圈：覆盖全部顶点则完成，否则回到阶段2"""
        if not state.lift.is_edge_revealed(cycle[0], cycle[-1]):
            raise InvariantViolation("闭合边未揭示")
        state.cycle = cycle
        state.path = None
        state.clear_working_sets()
        if not state.remaining:
            state.hamilton_cycle = cycle
            return PhaseResult(next_phase=SearchPhase.DONE, reason=reason)
        return PhaseResult(next_phase=SearchPhase.CYCLE_MERGE, reason=reason)

    def _multiply(self, state: SearchState, clone: RotationPath) -> Optional[PhaseResult]:
        lift = state.lift
        verts = clone.verts
        t = len(verts)
        if lift.is_edge_revealed(verts[0], verts[-1]):
            return self.close(state, list(verts), f"路径端点 {verts[0]}-{verts[-1]} 之间已有边")

        split = math.ceil(t / 2)
        target = max(1, min(state.thresholds.endset_target, (t - 1) // 2))
        explorers: Dict[str, EndExplorer] = {}
        outcome: Dict = {}

        def hook_for(side: str):
            other_side = "b" if side == "a" else "a"

            def hook(path: RotationPath, w: LiftVertex) -> bool:
                other = explorers[other_side]
                if w == other.path.end or (settings.PHASE5_CLOSE_ANY_PAIR and w in other.found):
                    outcome.update(kind="close", side=side, path=path.copy(), hit=w)
                    return True
                if w in state.cycle_of:
                    outcome.update(kind="cycle", side=side, path=path.copy(), hit=w)
                    return True
                return False

            return hook

        # 前半段反转，使 wi 成为固定起点，w1 为旋转端
        a = EndExplorer(lift, RotationPath(verts[:split][::-1]), self.charger(state), hook_for("a"))
        b = EndExplorer(lift, RotationPath(verts[split:]), self.charger(state), hook_for("b"))
        explorers.update(a=a, b=b)

        while True:
            progressed = False
            for ex in (a, b):
                if ex.exhausted or len(ex.found) >= target:
                    continue
                progressed = True
                if ex.step() == ExploreStatus.JUMP:
                    return self._jump(state, a, b, outcome)
            if not progressed:
                break

        s1, s2 = len(a.found), len(b.found)
        if min(s1, s2) < state.thresholds.adjusted_target:
            return None
        a.goto_root()
        b.goto_root()
        state.half_a, state.half_b = a, b
        state.metrics.endset_sizes = (s1, s2)
        self.record("endsets", s1=s1, s2=s2, target=target, short=min(s1, s2) < target)
        return PhaseResult(next_phase=SearchPhase.ADJUSTING, reason=f"|S1| = {s1}，|S2| = {s2}")

    def _jump(self, state: SearchState, a: EndExplorer, b: EndExplorer, outcome: Dict) -> PhaseResult:
        side, live, hit = outcome["side"], outcome["path"], outcome["hit"]
        if outcome["kind"] == "close":
            first = live if side == "a" else a.path_to(hit)
            second = b.path_to(hit) if side == "a" else live
            cycle = first.verts[::-1] + second.verts
            return self.close(state, cycle, f"端点 {first.end}-{second.end} 之间出现闭合边")
        first = live if side == "a" else a.path
        second = b.path if side == "a" else live
        full = RotationPath(first.verts[::-1] + second.verts)
        if side == "a":
            full.reverse()
        return self.link_to_cycle(state, full, hit)
