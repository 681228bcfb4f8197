"""
阶段7：闭合
"""

from typing import Dict, List, Optional, Tuple

from traceloop.sdk.decorators import task

from models import LiftVertex, SearchPhase
from lift_graph.rotation import RotationPath
from .base import Phase, PhaseResult
from .state import SearchState


class ClosingPhase(Phase):
    """
    揭示纤维 x 与 y 之间的匹配边，直到某个 S'1 端点连到 S'2；
    先从 S'1 一侧逐个揭示，再从 S'2 一侧揭示仍未匹配的端点
    """

    phase = SearchPhase.CLOSING

    def _match_across(
        self,
        state: SearchState,
        sources: Dict[LiftVertex, RotationPath],
        targets: Dict[LiftVertex, RotationPath],
        fiber: int,
    ) -> Optional[Tuple[LiftVertex, LiftVertex]]:
        lift = state.lift
        ends: List[LiftVertex] = list(sources)
        for idx in state.rng.permutation(len(ends)):
            u = ends[int(idx)]
            w = lift.neighbor(u, fiber)
            if w is None:
                self.charge(state)
                w = lift.reveal_neighbor(u, fiber)
            if w in targets:
                return u, w
        return None

    @task(name="phase7_close", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        x, y = state.target_edge
        sa, sb = state.adjusted_a, state.adjusted_b
        pair = self._match_across(state, sa, sb, y)
        if pair is None:
            found = self._match_across(state, sb, sa, x)
            pair = (found[1], found[0]) if found else None
        if pair is None:
            raise self.restart(f"|S'1| = {len(sa)}，|S'2| = {len(sb)}，纤维 {x} 与 {y} 之间没有闭合边")

        u, w = pair
        cycle = sa[u].verts[::-1] + sb[w].verts
        state.cycle = cycle
        state.path = None
        state.clear_working_sets()
        self.record("closed", u=str(u), w=str(w), length=len(cycle))
        if len(cycle) == state.lift.num_vertices and not state.remaining:
            state.hamilton_cycle = cycle
            return PhaseResult(next_phase=SearchPhase.DONE, reason=f"经 {u}-{w} 闭合为哈密顿圈")
        return PhaseResult(next_phase=SearchPhase.CYCLE_MERGE, reason=f"经 {u}-{w} 闭合为长度 {len(cycle)} 的圈")
