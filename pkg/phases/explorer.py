"""
端点探索器
固定路径起点，对 Pósa 旋转树做深度优先搜索；回溯时在同一枢轴上再旋转一次即可精确还原
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from models import LiftVertex
from lift_graph.lift import LiftState
from lift_graph.rotation import RotationPath

# 回调：(当前路径, 端点新揭示或已揭示的邻居) -> 是否触发跳转
RevealHook = Callable[[RotationPath, LiftVertex], bool]
# 预算计费："reveal" 或 "rotate"
ChargeHook = Callable[[str], None]


class ExploreStatus(str, Enum):
    EXPANDED = "expanded"
    MOVED = "moved"
    BACKTRACKED = "backtracked"
    JUMP = "jump"
    EXHAUSTED = "exhausted"


@dataclass(eq=False)
class EndNode:
    """旋转树节点：端点、父节点以及到达它所用的枢轴"""

    end: LiftVertex
    parent: Optional["EndNode"] = None
    pivot: Optional[LiftVertex] = None
    expanded: bool = False
    children: List["EndNode"] = field(default_factory=list)
    pending: List["EndNode"] = field(default_factory=list)

    def pivots(self) -> List[LiftVertex]:
        chain = []
        node = self
        while node.parent is not None:
            chain.append(node.pivot)
            node = node.parent
        return chain[::-1]


class EndExplorer:
    """
    在一条起点固定的路径上发现新端点

    Args:
        lift: 提升图状态
        path: 工作路径，被原地旋转
        charge: 每次揭示或旋转时调用的计费函数
        on_reveal: 端点处每条邻边的跳转检测
    """

    def __init__(self, lift: LiftState, path: RotationPath, charge: ChargeHook, on_reveal: RevealHook):
        self.lift = lift
        self.path = path
        self.charge = charge
        self.on_reveal = on_reveal
        self.root_snapshot = path.copy()
        self.root = EndNode(end=path.end)
        self.current = self.root
        self.found: Dict[LiftVertex, EndNode] = {path.end: self.root}
        self.hit: Optional[LiftVertex] = None
        self.rotations = 0
        self.exhausted = False

    @property
    def start(self) -> LiftVertex:
        return self.root_snapshot.start

    def active_ends(self) -> List[LiftVertex]:
        """已发现、尚未展开且仍活跃的端点，按发现顺序"""
        return [v for v, node in self.found.items() if not node.expanded and self.lift.is_active(v)]

    def _rotate(self, pivot: LiftVertex) -> None:
        self.charge("rotate")
        self.path.rotate_at(pivot, self.lift)
        self.rotations += 1

    def _expand(self, node: EndNode) -> ExploreStatus:
        node.expanded = True
        end = self.path.end
        for w in self.lift.revealed_neighbors(end):
            if self.on_reveal(self.path, w):
                self.hit = w
                return ExploreStatus.JUMP
        for w in self.lift.iter_g1_reveals(end):
            self.charge("reveal")
            if self.on_reveal(self.path, w):
                self.hit = w
                return ExploreStatus.JUMP

        verts = self.path.verts
        kids = []
        for i in self.path.rotation_candidates(self.lift):
            new_end = verts[i + 1]
            if new_end in self.found:
                continue
            child = EndNode(end=new_end, parent=node, pivot=verts[i])
            self.found[new_end] = child
            kids.append(child)
        order = self.lift.rng.permutation(len(kids)) if kids else []
        node.children = [kids[int(j)] for j in order]
        node.pending = list(node.children)
        return ExploreStatus.EXPANDED

    def step(self) -> ExploreStatus:
        """执行一个单位的工作：展开、下降或回溯"""
        if self.exhausted:
            return ExploreStatus.EXHAUSTED
        node = self.current
        if not node.expanded:
            return self._expand(node)
        while node.pending:
            child = node.pending.pop(0)
            if not self.lift.is_active(child.end):
                continue
            self._rotate(child.pivot)
            self.current = child
            return ExploreStatus.MOVED
        if node.parent is None:
            self.exhausted = True
            return ExploreStatus.EXHAUSTED
        self._rotate(node.pivot)
        self.current = node.parent
        return ExploreStatus.BACKTRACKED

    def goto_root(self) -> None:
        """回溯到根路径"""
        while self.current.parent is not None:
            self._rotate(self.current.pivot)
            self.current = self.current.parent

    def path_to(self, end: LiftVertex) -> RotationPath:
        """重放枢轴链，得到以 end 为端点的独立路径"""
        return self.root_snapshot.copy().replay(self.found[end].pivots(), self.lift)

    def walk_ends(self) -> Iterator[Tuple[LiftVertex, RotationPath]]:
        """
        以深度优先顺序遍历整棵旋转树，依次给出 (端点, 以它为端点的工作路径)

        给出的路径是探索器自身的工作路径，调用方需要保留时应 copy()
        """
        self.goto_root()
        stack: List[Tuple[EndNode, int]] = [(self.root, 0)]
        yield self.root.end, self.path
        while stack:
            node, idx = stack[-1]
            if idx < len(node.children):
                stack[-1] = (node, idx + 1)
                child = node.children[idx]
                self.path.rotate_at(child.pivot, self.lift)
                stack.append((child, 0))
                yield child.end, self.path
            else:
                stack.pop()
                if node.parent is not None:
                    self.path.rotate_at(node.pivot, self.lift)
        self.current = self.root
