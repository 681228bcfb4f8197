"""
阶段4：克隆路径
"""

from typing import Dict, List, Set

from traceloop.sdk.decorators import task

from models import LiftVertex, SearchPhase
from lift_graph.rotation import RotationPath
from .base import Phase, PhaseResult
from .explorer import EndExplorer, ExploreStatus
from .state import SearchState


class CloningPhase(Phase):
    """
    固定 w1 旋转得到 r 个新端点，再把每条路径反转、固定新端点继续旋转，
    得到 r 条顶点集相同、2r 个端点互不相同且活跃的路径
    """

    phase = SearchPhase.CLONING

    def _hook(self, state: SearchState, jump: Dict):
        def hook(path: RotationPath, w: LiftVertex) -> bool:
            if w in state.cycle_of:
                jump["path"] = path.copy()
                jump["hit"] = w
                return True
            return False

        return hook

    @task(name="phase4_clone", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        lift = state.lift
        path = state.path
        r_eff = max(1, min(state.thresholds.clone_count, len(path) - 3))
        jump: Dict = {}
        hook = self._hook(state, jump)

        explorer = EndExplorer(lift, path.copy(), self.charger(state), hook)
        while len(explorer.active_ends()) < r_eff:
            status = explorer.step()
            if status == ExploreStatus.JUMP:
                return self.link_to_cycle(state, jump["path"], jump["hit"])
            if status == ExploreStatus.EXHAUSTED:
                break
        candidates = explorer.active_ends()
        if not candidates:
            raise self.restart("固定 w1 的旋转没有产生活跃端点")
        order = state.rng.permutation(len(candidates))[:r_eff]
        leaves = [candidates[int(i)] for i in order]
        wanted = set(leaves)
        leaf_paths = {end: p.copy() for end, p in explorer.walk_ends() if end in wanted}

        used: Set[LiftVertex] = set(leaves)
        clones: List[RotationPath] = []
        for leaf in leaves:
            ex = EndExplorer(lift, leaf_paths[leaf].reverse(), self.charger(state), hook)
            new_end = None
            while new_end is None:
                status = ex.step()
                if status == ExploreStatus.JUMP:
                    return self.link_to_cycle(state, jump["path"], jump["hit"])
                if status == ExploreStatus.EXHAUSTED:
                    break
                new_end = next((v for v in ex.active_ends() if v not in used), None)
            if new_end is None:
                continue
            used.add(new_end)
            clones.append(ex.path_to(new_end))

        clones = [c for c in clones if lift.is_active(c.start) and lift.is_active(c.end)]
        if not clones:
            raise self.restart("没有得到两端都活跃的克隆路径")
        state.clones = clones
        state.metrics.clones_built = len(clones)
        self.record("cloned", requested=r_eff, built=len(clones))
        return PhaseResult(next_phase=SearchPhase.MULTIPLY_ENDS, reason=f"得到 {len(clones)} 条克隆路径")
