"""
随机 n-提升的惰性生成
每条基图边对应一个部分单射（正向/反向数组 + 未匹配编号的空闲表），
只在被查询时才揭示，保持未揭示部分的分布不变
"""

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from models import BaseInstance, LiftVertex
from settings import settings
from .errors import LiftCorruptionError, RevealError

UNREVEALED = -1


class _FreeList:
    """未匹配编号集合，支持 O(1) 均匀抽样与删除"""

    __slots__ = ("items", "pos")

    def __init__(self, n: int):
        self.items = list(range(n))
        self.pos = list(range(n))

    def __len__(self) -> int:
        return len(self.items)

    def remove(self, value: int) -> None:
        idx = self.pos[value]
        last = self.items[-1]
        self.items[idx] = last
        self.pos[last] = idx
        self.items.pop()
        self.pos[value] = UNREVEALED

    def sample(self, rng: np.random.Generator) -> int:
        if not self.items:
            raise LiftCorruptionError("没有可用的未匹配编号")
        return self.items[int(rng.integers(len(self.items)))]


class _EdgeMap:
    """基图边 {lo, hi} 上的部分匹配 σ"""

    __slots__ = ("fwd", "inv", "free_lo", "free_hi")

    def __init__(self, n: int):
        self.fwd = [UNREVEALED] * n
        self.inv = [UNREVEALED] * n
        self.free_lo = _FreeList(n)
        self.free_hi = _FreeList(n)

    def link(self, i: int, j: int) -> None:
        self.fwd[i] = j
        self.inv[j] = i
        self.free_lo.remove(i)
        self.free_hi.remove(j)


class LiftState:
    """
    提升图的揭示状态

    一次试验独占一个 LiftState，并拥有它的随机数流；
    只有 G1 = G − H1 上的揭示会使顶点失活
    """

    def __init__(
        self,
        k: int,
        edges: Sequence[Tuple[int, int]],
        h1_order: Sequence[int],
        n: int,
        rng: np.random.Generator,
    ):
        if n < 1:
            raise ValueError("n 必须为正整数")
        self.k = k
        self.n = n
        self.rng = rng
        self.h1_order = list(h1_order)
        self.base_edges = sorted((min(u, v), max(u, v)) for u, v in edges)
        self.h1_edge_set = {
            (min(a, b), max(a, b))
            for a, b in zip(self.h1_order, self.h1_order[1:] + self.h1_order[:1])
        }
        self._maps: Dict[Tuple[int, int], _EdgeMap] = {e: _EdgeMap(n) for e in self.base_edges}

        self.base_adj: Dict[int, List[int]] = {v: [] for v in range(k)}
        for u, v in self.base_edges:
            self.base_adj[u].append(v)
            self.base_adj[v].append(u)
        for v in self.base_adj:
            self.base_adj[v].sort()
        self.g1_adj: Dict[int, List[int]] = {
            v: [w for w in nbrs if (min(v, w), max(v, w)) not in self.h1_edge_set]
            for v, nbrs in self.base_adj.items()
        }

        # 每个顶点已揭示的 G1 边数，键集合即失活集合 D
        self._g1_count: Dict[LiftVertex, int] = {}
        self.reveal_count = 0
        self.g1_reveal_count = 0

    @classmethod
    def from_instance(cls, inst: BaseInstance, n: int, rng: np.random.Generator) -> "LiftState":
        return cls(inst.k, inst.edges, inst.h1_order, n, rng)

    @classmethod
    def for_cycle(cls, h: int, n: int, rng: np.random.Generator) -> "LiftState":
        """只含 H1 = C_h 的提升，用于基本圈统计"""
        if h < 3:
            raise ValueError("圈长至少为 3")
        order = list(range(h))
        return cls(h, [(i, (i + 1) % h) for i in range(h)], order, n, rng)

    # ==================== 查询 ====================

    @property
    def num_vertices(self) -> int:
        return self.k * self.n

    @property
    def inactive(self) -> frozenset:
        return frozenset(self._g1_count)

    @property
    def inactive_count(self) -> int:
        return len(self._g1_count)

    def _edge_map(self, a: int, b: int) -> _EdgeMap:
        key = (a, b) if a < b else (b, a)
        try:
            return self._maps[key]
        except KeyError:
            raise RevealError(f"({a}, {b}) 不是基图的边") from None

    def is_h1_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.h1_edge_set

    def neighbor(self, v: LiftVertex, base_neighbor: int) -> Optional[LiftVertex]:
        """v 沿基图边 {v.base, base_neighbor} 的已揭示邻居，未揭示时为 None"""
        em = self._edge_map(v.base, base_neighbor)
        j = em.fwd[v.fiber_idx] if v.base < base_neighbor else em.inv[v.fiber_idx]
        return None if j == UNREVEALED else LiftVertex(base_neighbor, j)

    def revealed_neighbors(self, v: LiftVertex) -> List[LiftVertex]:
        result = []
        for b in self.base_adj[v.base]:
            w = self.neighbor(v, b)
            if w is not None:
                result.append(w)
        return result

    def is_edge_revealed(self, a: LiftVertex, b: LiftVertex) -> bool:
        if a.base == b.base or b.base not in self.base_adj[a.base]:
            return False
        return self.neighbor(a, b.base) == b

    def is_active(self, v: LiftVertex) -> bool:
        return v not in self._g1_count

    def _active_ignoring(self, v: LiftVertex, exclude: Optional[LiftVertex]) -> bool:
        count = self._g1_count.get(v, 0)
        if count == 0:
            return True
        if count == 1 and exclude is not None and exclude.base in self.g1_adj[v.base]:
            return self.neighbor(v, exclude.base) == exclude
        return False

    def distance2_clear(self, v: LiftVertex, exclude: Optional[LiftVertex] = None) -> bool:
        """
        v 到失活集合 D 的距离至少为 2：v 及其全部已揭示邻居都是活跃的

        Args:
            v: 待查询顶点
            exclude: 忽略 v 与该顶点之间刚揭示的那条边（旋转时的路径端点）
        """
        if not self._active_ignoring(v, exclude):
            return False
        for w in self.revealed_neighbors(v):
            if w == exclude:
                continue
            if not self.is_active(w):
                return False
        return True

    # ==================== 揭示 ====================

    def reveal_neighbor(self, v: LiftVertex, base_neighbor: int) -> LiftVertex:
        """
        沿基图边揭示 v 的邻居，远端编号在未匹配编号中均匀抽取

        Args:
            v: 提升图顶点
            base_neighbor: 基图中 v.base 的邻居

        Returns:
            LiftVertex: 新揭示的邻居
        """
        em = self._edge_map(v.base, base_neighbor)
        i = v.fiber_idx
        if v.base < base_neighbor:
            if em.fwd[i] != UNREVEALED:
                raise RevealError(f"{v} 沿 {base_neighbor} 的边已揭示")
            j = em.free_hi.sample(self.rng)
            em.link(i, j)
        else:
            if em.inv[i] != UNREVEALED:
                raise RevealError(f"{v} 沿 {base_neighbor} 的边已揭示")
            j = em.free_lo.sample(self.rng)
            em.link(j, i)
        w = LiftVertex(base_neighbor, j)
        self.reveal_count += 1
        if not self.is_h1_edge(v.base, base_neighbor):
            self.g1_reveal_count += 1
            self._g1_count[v] = self._g1_count.get(v, 0) + 1
            self._g1_count[w] = self._g1_count.get(w, 0) + 1
        return w

    def reveal_full_edge(self, a: int, b: int) -> List[int]:
        """
        补全基图边上的匹配为双射，条件分布在所有相容补全上均匀

        Returns:
            List[int]: 以 min(a, b) 的编号为下标的匹配
        """
        em = self._edge_map(a, b)
        lo_free = sorted(em.free_lo.items)
        hi_free = sorted(em.free_hi.items)
        perm = self.rng.permutation(len(hi_free))
        for i, p in zip(lo_free, perm):
            em.link(i, hi_free[int(p)])
        self.reveal_count += len(lo_free)
        return list(em.fwd)

    def iter_g1_reveals(self, v: LiftVertex) -> Iterator[LiftVertex]:
        """按基图邻居顺序逐条揭示 v 尚未揭示的 G1 边"""
        for b in self.g1_adj[v.base]:
            if self.neighbor(v, b) is None:
                yield self.reveal_neighbor(v, b)

    def reveal_all_g1_neighbors(self, v: LiftVertex) -> List[LiftVertex]:
        return list(self.iter_g1_reveals(v))

    def finalize(self) -> None:
        """揭示全部剩余边"""
        for a, b in self.base_edges:
            self.reveal_full_edge(a, b)

    # ==================== H1 提升 ====================

    def _reveal_h1(self) -> None:
        for i, a in enumerate(self.h1_order):
            b = self.h1_order[(i + 1) % self.k]
            if len(self._edge_map(a, b).free_lo):
                self.reveal_full_edge(a, b)

    def lift_h1(self) -> List[List[LiftVertex]]:
        """
        提升 H1，返回所有基本圈

        每个圈从纤维 h1_order[0] 上的顶点出发，按 H1 顺序依次经过各纤维
        """
        self._reveal_h1()
        order = self.h1_order
        visited = [False] * self.n
        cycles: List[List[LiftVertex]] = []
        for s in range(self.n):
            if visited[s]:
                continue
            cycle: List[LiftVertex] = []
            cur = LiftVertex(order[0], s)
            while True:
                visited[cur.fiber_idx] = True
                for pos in range(self.k):
                    cycle.append(cur)
                    cur = self.neighbor(cur, order[(pos + 1) % self.k])
                if cur.fiber_idx == s:
                    break
            cycles.append(cycle)
        return cycles

    def composed_h1_permutation(self) -> np.ndarray:
        """纤维 h1_order[0] 上沿 H1 走一圈得到的置换"""
        self._reveal_h1()
        order = self.h1_order
        perm = np.arange(self.n)
        for pos in range(self.k):
            a, b = order[pos], order[(pos + 1) % self.k]
            em = self._edge_map(a, b)
            step = np.asarray(em.fwd if a < b else em.inv)
            perm = step[perm]
        return perm

    # ==================== 导出 ====================

    def revealed_edges(self) -> Iterator[Tuple[LiftVertex, LiftVertex]]:
        for (a, b), em in self._maps.items():
            for i, j in enumerate(em.fwd):
                if j != UNREVEALED:
                    yield LiftVertex(a, i), LiftVertex(b, j)

    def dump_edge_list(self) -> str:
        """已揭示的提升边，每行 `u i v j`"""
        return "".join(f"{u.base} {u.fiber_idx} {v.base} {v.fiber_idx}\n" for u, v in self.revealed_edges())

    def dump_dot(self) -> str:
        """已揭示提升图的 DOT 表示，仅用于小规模（k·n 不超过 DOT_VERTEX_CAP）"""
        if self.num_vertices > settings.DOT_VERTEX_CAP:
            raise ValueError(f"k·n = {self.num_vertices} 超过 DOT 导出上限 {settings.DOT_VERTEX_CAP}")
        lines = ["graph lift {"]
        for b in range(self.k):
            for i in range(self.n):
                lines.append(f'  "{b}:{i}";')
        for u, v in self.revealed_edges():
            style = "" if self.is_h1_edge(u.base, v.base) else " [style=dashed]"
            lines.append(f'  "{u}" -- "{v}"{style};')
        lines.append("}")
        return "\n".join(lines) + "\n"
