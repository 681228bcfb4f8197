"""
H2 H̄1 交错路径
在基图上对 (顶点, 下一条边颜色) 状态做不动点着色，并给出最短交错游走
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from models import AlternatingPath, AlternatingStep, BaseInstance, Color, EdgeTag, ObservationReport
from .base_graph import DirectedH1, directed_h1, h2_neighbors
from .errors import InvariantViolation, LemmaViolation

# 状态 (x, "B") 表示下一步沿蓝边 (H2) 离开 x；(x, "R") 表示下一步沿红边 (H̄1) 离开
State = Tuple[int, str]
BLUE = "B"
RED = "R"


@dataclass
class ColoringState:
    """着色不动点"""

    root: int
    reverse: bool
    color: Dict[int, Color]
    parent: Dict[State, Optional[State]] = field(default_factory=dict)

    def walk_to(self, state: State) -> List[int]:
        """沿父指针重建从根到 state 的交错游走"""
        if state not in self.parent:
            raise KeyError(state)
        seq = []
        cur: Optional[State] = state
        while cur is not None:
            seq.append(cur[0])
            cur = self.parent[cur]
        return seq[::-1]


def _successors(state: State, h2: Dict[int, Tuple[int, int]], d: DirectedH1) -> List[State]:
    x, c = state
    if c == BLUE:
        return [(y, RED) for y in sorted(set(h2[x]))]
    return [(d.succ[x], BLUE)]


def _predecessors(state: State, h2: Dict[int, Tuple[int, int]], d: DirectedH1) -> List[State]:
    y, c = state
    if c == RED:
        return [(x, BLUE) for x in sorted(set(h2[y]))]
    return [(d.pred[y], RED)]


def color_from(inst: BaseInstance, root: int, reverse: bool = False, lifo: bool = False) -> ColoringState:
    """
    从 root 出发的着色过程，计算到不动点

    Args:
        inst: 算例
        root: 起点，初始只能沿蓝边离开
        reverse: H̄1 是否取反方向
        lifo: 以栈代替队列处理工作表（不动点与顺序无关）

    Returns:
        ColoringState: 颜色与父指针
    """
    h2 = h2_neighbors(inst)
    d = directed_h1(inst, reverse=reverse)
    start: State = (root, BLUE)
    parent: Dict[State, Optional[State]] = {start: None}
    work = deque([start])
    while work:
        state = work.pop() if lifo else work.popleft()
        for nxt in _successors(state, h2, d):
            if nxt not in parent:
                parent[nxt] = state
                work.append(nxt)

    color: Dict[int, Color] = {}
    for x in range(inst.k):
        b, r = (x, BLUE) in parent, (x, RED) in parent
        color[x] = Color.RB if b and r else Color.B if b else Color.R if r else Color.N
    return ColoringState(root=root, reverse=reverse, color=color, parent=parent)


def check_observations(state: ColoringState, inst: BaseInstance) -> ObservationReport:
    """
    检查不动点着色上的结构性观察，任何违反都说明实现有误

    Raises:
        InvariantViolation: 任一观察不成立
    """
    color = state.color
    d = directed_h1(inst, reverse=state.reverse)
    violations: List[str] = []
    can_red = {Color.R, Color.RB}
    can_blue = {Color.B, Color.RB}

    if color[state.root] not in can_blue:
        violations.append(f"根 {state.root} 的颜色为 {color[state.root].value}")

    special = 0
    for x in range(inst.k):
        y = d.succ[x]
        cx, cy = color[x], color[y]
        if cx in can_red and cy == Color.N:
            violations.append(f"红边 {x}->{y} 从 {cx.value} 指向 N")
        if cx == Color.RB and cy == Color.R:
            violations.append(f"红边 {x}->{y} 从 RB 指向 R")
        if cx == Color.R and cy == Color.R:
            violations.append(f"红边 {x}->{y} 位于 R 内部")
        if cx in (Color.N, Color.B) and cy in can_blue:
            special += 1
    if special > 1:
        violations.append(f"从 N∪B 指向 B∪RB 的红边共有 {special} 条")

    for x, y in inst.h2_edges():
        pair = {color[x], color[y]}
        if pair == {Color.RB, Color.N}:
            violations.append(f"蓝边 {{{x},{y}}} 连接 RB 与 N")
        if pair == {Color.RB, Color.B}:
            violations.append(f"蓝边 {{{x},{y}}} 连接 RB 与 B")
        if color[x] == Color.B and color[y] == Color.B:
            violations.append(f"蓝边 {{{x},{y}}} 位于 B 内部")

    counts = {c.value: sum(1 for v in color.values() if v == c) for c in Color}
    if counts[Color.B.value] != counts[Color.R.value]:
        violations.append(f"|B| = {counts['B']} 与 |R| = {counts['R']} 不相等")

    report = ObservationReport(root=state.root, counts=counts, special_red_edges=special, violations=violations)
    if violations:
        raise InvariantViolation("; ".join(violations))
    return report


def find_alternating_path(inst: BaseInstance, v: int, u: int, reverse: bool = False) -> AlternatingPath:
    """
    v 到 u 的最短 H2 H̄1 交错游走：以 H2 边开始，以 H̄1 边到达 u

    多条最短游走时取顶点序列字典序最小者

    Raises:
        LemmaViolation: u 不能经由红边到达（仅在假设被覆盖时可能发生）
    """
    h2 = h2_neighbors(inst)
    d = directed_h1(inst, reverse=reverse)
    coloring = color_from(inst, v, reverse=reverse)
    target: State = (d.pred[u], RED)
    if target not in coloring.parent:
        raise LemmaViolation(f"从 {v} 出发无法以 H̄1 边到达 {u}（颜色 {coloring.color[u].value}）")

    # 反向 BFS：到目标状态的距离
    dist: Dict[State, int] = {target: 0}
    queue = deque([target])
    while queue:
        state = queue.popleft()
        for prev in _predecessors(state, h2, d):
            if prev not in dist:
                dist[prev] = dist[state] + 1
                queue.append(prev)

    cur: State = (v, BLUE)
    states = [cur]
    while cur != target:
        cur = min(
            (s for s in _successors(cur, h2, d) if dist.get(s) == dist[cur] - 1),
            key=lambda s: s[0],
        )
        states.append(cur)

    vertices = [s[0] for s in states] + [u]
    steps = []
    for i in range(len(vertices) - 1):
        tag = EdgeTag.H2 if i % 2 == 0 else EdgeTag.H1
        steps.append(AlternatingStep(tail=vertices[i], head=vertices[i + 1], tag=tag))
    return AlternatingPath(vertices=vertices, steps=steps, reverse_h1=reverse)


def is_alternating(inst: BaseInstance, path: AlternatingPath) -> bool:
    """交错游走校验：H2 与 H̄1 严格交替，首边为 H2，末边为 H̄1"""
    if len(path.steps) < 2 or len(path.steps) % 2 != 0:
        return False
    if len(path.vertices) != len(path.steps) + 1:
        return False
    h2_set = set(inst.h2_edges())
    d = directed_h1(inst, reverse=path.reverse_h1)
    for i, step in enumerate(path.steps):
        if step.tail != path.vertices[i] or step.head != path.vertices[i + 1]:
            return False
        if i % 2 == 0:
            if step.tag != EdgeTag.H2 or (min(step.tail, step.head), max(step.tail, step.head)) not in h2_set:
                return False
        elif step.tag != EdgeTag.H1 or d.succ[step.tail] != step.head:
            return False
    return True
