"""
阶段6：端点调整
沿基图上的 H2 H̄1 交错路径，逐步把路径端点从所在纤维移到目标边 {x, y} 的纤维
"""

from typing import Dict, List, Optional, Tuple, Union

from traceloop.sdk.decorators import task

from models import AlternatingPath, BaseInstance, LiftVertex, SearchPhase
from lift_graph.alternating import find_alternating_path
from lift_graph.base_graph import directed_h1, extra_edges
from lift_graph.rotation import RotationPath
from .base import Phase, PhaseResult
from .state import SearchState

# 调整结果：成功的路径、失败，或揭示到剩余基本圈 (路径, 命中顶点)
AdjustOutcome = Union[RotationPath, None, Tuple[RotationPath, LiftVertex]]


def majority_orientation(path: RotationPath, inst: BaseInstance) -> Optional[bool]:
    """
    路径上 H1 边的多数方向

    Returns:
        Optional[bool]: 与 h1_order 反向为 True，同向为 False；没有 H1 边时为 None
    """
    d = directed_h1(inst)
    positive = negative = 0
    verts = path.verts
    for a, b in zip(verts, verts[1:]):
        if d.succ[a.base] == b.base:
            positive += 1
        elif d.pred[a.base] == b.base:
            negative += 1
    if positive == negative == 0:
        return None
    return negative > positive


def section_bounds(path: RotationPath, inst: BaseInstance, reverse: bool) -> Optional[List[int]]:
    """
    把路径上的有向 H1 段切成长度为 k 的整周期块，再从端点一侧起划分为 Q1 … Q(k−1)

    Returns:
        Optional[List[int]]: 第 j−1 项为 Qj 最后一个顶点的位置；块数少于 k−1 时为 None
    """
    k = inst.k
    d = directed_h1(inst, reverse=reverse)
    verts = path.verts
    blocks: List[Tuple[int, int]] = []
    run_start = 0
    for p in range(1, len(verts) + 1):
        if p < len(verts) and d.succ[verts[p - 1].base] == verts[p].base:
            continue
        length = p - run_start
        for q in range(length // k):
            blocks.append((run_start + q * k, run_start + (q + 1) * k - 1))
        run_start = p

    sections = k - 1
    z = len(blocks) // sections
    if z == 0:
        return None
    bounds = []
    for j in range(1, sections + 1):
        group = sections - j
        last = len(blocks) - 1 if j == 1 else (group + 1) * z - 1
        bounds.append(blocks[last][1])
    return bounds


class AdjustingPhase(Phase):
    """把 S1 的端点移到纤维 x、S2 的端点移到纤维 y"""

    phase = SearchPhase.ADJUSTING

    def __init__(self):
        self._routes: Dict[Tuple[int, int, bool], AlternatingPath] = {}

    def target_edge(self, state: SearchState) -> Tuple[int, int]:
        extras = extra_edges(state.inst)
        if extras:
            return extras[0]
        state.metrics.fallback_target_edge = True
        self.record("fallback_target_edge")
        return sorted(state.inst.h2_edges())[0]

    def _route(self, inst: BaseInstance, source: int, target: int, reverse: bool) -> AlternatingPath:
        key = (source, target, reverse)
        if key not in self._routes:
            self._routes[key] = find_alternating_path(inst, source, target, reverse=reverse)
        return self._routes[key]

    def adjust(self, state: SearchState, path: RotationPath, target: int) -> AdjustOutcome:
        """
        沿交错路径移动端点：揭示端点处的 H2 边，枢轴须落在对应区段或更靠近起点处、
        严格位于上一个枢轴之前，且其路径后继在交错路径要求的纤维上

        Args:
            path: 起点固定的半条路径（原地修改）
            target: 目标纤维

        Returns:
            AdjustOutcome: 成功时为端点位于目标纤维的路径
        """
        lift = state.lift
        if path.end.base == target:
            return path
        reverse = majority_orientation(path, state.inst)
        if reverse is None:
            return None
        bounds = section_bounds(path, state.inst, reverse)
        if bounds is None:
            return None
        route = self._route(state.inst, path.end.base, target, reverse)

        vertices = route.vertices
        prev = len(path) - 1
        for j in range(1, len(vertices) // 2 + 1):
            if j > len(bounds):
                return None
            b, a = vertices[2 * j - 1], vertices[2 * j]
            end = path.end
            w = lift.neighbor(end, b)
            if w is None:
                self.charge(state)
                w = lift.reveal_neighbor(end, b)
            if w in state.cycle_of:
                return path, w
            if w not in path:
                return None
            i = path.position(w)
            m = len(path) - 1
            if not 1 <= i <= m - 2 or i >= prev or i > bounds[j - 1] or path.verts[i + 1].base != a:
                return None
            self.charge(state, "rotate")
            path.rotate(i, lift)
            prev = i
        return path if path.end.base == target else None

    @task(name="phase6_adjust", version=1)
    def execute(self, state: SearchState) -> PhaseResult:
        self._routes = {}
        x, y = self.target_edge(state)
        state.target_edge = (x, y)
        a, b = state.half_a, state.half_b
        a_root, b_root = a.root_snapshot, b.root_snapshot
        for label, root in (("S1", a_root), ("S2", b_root)):
            reverse = majority_orientation(root, state.inst)
            if reverse is None or section_bounds(root, state.inst, reverse) is None:
                raise self.restart(f"{label} 一侧的有向 H1 块不足 k−1 个")

        survivors: Dict[str, Dict[LiftVertex, RotationPath]] = {"a": {}, "b": {}}
        for side, explorer, target in (("a", a, x), ("b", b, y)):
            for _, live in explorer.walk_ends():
                outcome = self.adjust(state, live.copy(), target)
                if outcome is None:
                    continue
                if isinstance(outcome, tuple):
                    path, hit = outcome
                    if side == "a":
                        full = RotationPath(path.verts[::-1] + b_root.verts).reverse()
                    else:
                        full = RotationPath(a_root.verts[::-1] + path.verts)
                    state.clear_working_sets()
                    return self.link_to_cycle(state, full, hit)
                survivors[side].setdefault(outcome.end, outcome)

        sa, sb = survivors["a"], survivors["b"]
        state.metrics.survivors = (len(sa), len(sb))
        self.record("adjusted", target=f"{x}-{y}", s1=len(sa), s2=len(sb))
        need = state.thresholds.adjusted_target
        if len(sa) < need or len(sb) < need:
            raise self.restart(f"调整后 |S'1| = {len(sa)}，|S'2| = {len(sb)}，少于 {need}")
        state.adjusted_a, state.adjusted_b = sa, sb
        state.half_a = state.half_b = None
        return PhaseResult(next_phase=SearchPhase.CLOSING, reason=f"目标边 {{{x}, {y}}}：|S'1| = {len(sa)}，|S'2| = {len(sb)}")
