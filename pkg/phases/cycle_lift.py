"""
阶段1：提升 H1
"""

import math

from traceloop.sdk.decorators import task

from models import SearchPhase
from .base import Phase, PhaseResult
from .state import SearchState


class CycleLiftPhase(Phase):
    """揭示 H1 的全部提升边，取最长的基本圈作为 C"""

    phase = SearchPhase.CYCLE_LIFT

    @task(name="phase1_cycle_lift", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        cycles = state.lift.lift_h1()
        count = len(cycles)
        state.metrics.basic_cycles_initial = count
        state.metrics.basic_cycles_within_lemma = count <= max(1.0, 2 * math.log(state.n))

        longest = max(len(c) for c in cycles)
        candidates = [i for i, c in enumerate(cycles) if len(c) == longest]
        chosen = self.pick(state, candidates)
        state.cycle = cycles[chosen]
        state.path = None
        state.set_remaining([c for i, c in enumerate(cycles) if i != chosen])
        self.record("lifted", basic_cycles=count, longest=longest)

        if not state.remaining:
            state.hamilton_cycle = state.cycle
            return PhaseResult(next_phase=SearchPhase.DONE, reason="H1 的提升只有一个基本圈")
        return PhaseResult(next_phase=SearchPhase.CYCLE_MERGE, reason=f"共 {count} 个基本圈，C 的长度为 {longest}")
