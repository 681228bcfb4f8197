"""
独立验证器
哈密顿圈校验、暴力哈密顿判定、交错游走枚举与随机排列圈数统计
"""

import math
from typing import Iterable, List, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from models import BaseInstance, CycleCountStats, LiftVertex, VerificationResult
from settings import settings
from .base_graph import directed_h1, h2_neighbors
from .errors import OracleCapExceeded
from .lift import LiftState

# 显式图：以 LiftVertex 为节点的 networkx 无向简单图
ExplicitGraph = nx.Graph


def _has_edge(graph: Union[LiftState, ExplicitGraph], a: LiftVertex, b: LiftVertex) -> bool:
    if isinstance(graph, LiftState):
        return graph.is_edge_revealed(a, b)
    return graph.has_edge(a, b)


def verify_hamilton_cycle(
    graph: Union[LiftState, ExplicitGraph], cycle: Sequence[Sequence[int]]
) -> VerificationResult:
    """
    检查 cycle 是否为提升图的哈密顿圈

    Args:
        graph: LiftState（按已揭示边判定）或显式提升图
        cycle: (base, fiber) 序列

    Returns:
        VerificationResult: 通过与否以及第一处违例
    """
    verts = [LiftVertex(int(b), int(i)) for b, i in cycle]
    if isinstance(graph, LiftState):
        total = graph.num_vertices
        for pos, v in enumerate(verts):
            if not (0 <= v.base < graph.k and 0 <= v.fiber_idx < graph.n):
                return VerificationResult(ok=False, reason=f"顶点 {v} 越界", position=pos)
    else:
        total = graph.number_of_nodes()
        for pos, v in enumerate(verts):
            if v not in graph:
                return VerificationResult(ok=False, reason=f"顶点 {v} 不在图中", position=pos)

    seen: Set[LiftVertex] = set()
    for pos, v in enumerate(verts):
        if v in seen:
            return VerificationResult(ok=False, reason=f"顶点 {v} 重复出现", position=pos)
        seen.add(v)
    if len(verts) != total:
        return VerificationResult(ok=False, reason=f"圈长 {len(verts)} 不等于顶点数 {total}")
    if total < 3:
        return VerificationResult(ok=False, reason="顶点数不足 3")
    for pos, v in enumerate(verts):
        w = verts[(pos + 1) % len(verts)]
        if not _has_edge(graph, v, w):
            return VerificationResult(ok=False, reason=f"{v} 与 {w} 之间没有提升边", position=pos)
    return VerificationResult(ok=True)


def is_valid_lift_path(lift: LiftState, verts: Sequence[LiftVertex]) -> bool:
    """顶点互不相同且相邻顶点之间的提升边均已揭示"""
    if len(set(verts)) != len(verts):
        return False
    return all(lift.is_edge_revealed(a, b) for a, b in zip(verts, verts[1:]))


def is_valid_lift_cycle(lift: LiftState, verts: Sequence[LiftVertex]) -> bool:
    return len(verts) >= 3 and is_valid_lift_path(lift, verts) and lift.is_edge_revealed(verts[-1], verts[0])


def explicit_lift(lift: LiftState) -> ExplicitGraph:
    """已揭示部分构成的显式提升图（包含全部 k·n 个顶点）"""
    g = nx.Graph()
    g.add_nodes_from(LiftVertex(b, i) for b in range(lift.k) for i in range(lift.n))
    g.add_edges_from(lift.revealed_edges())
    return g


def load_edge_list(path: str) -> ExplicitGraph:
    """读取 `u i v j` 格式的提升边列表"""
    g = nx.Graph()
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            u, i, v, j = (int(t) for t in line.split())
            g.add_edge(LiftVertex(u, i), LiftVertex(v, j))
    return g


def is_hamiltonian_bruteforce(g: ExplicitGraph) -> bool:
    """
    回溯判定哈密顿性，从最小度顶点出发，剪枝：剩余顶点可用度数不足 2

    Raises:
        OracleCapExceeded: 顶点数超过 BRUTEFORCE_VERTEX_CAP
    """
    size = g.number_of_nodes()
    if size > settings.BRUTEFORCE_VERTEX_CAP:
        raise OracleCapExceeded(f"顶点数 {size} 超过暴力上限 {settings.BRUTEFORCE_VERTEX_CAP}")
    if size < 3 or min(d for _, d in g.degree()) < 2 or not nx.is_connected(g):
        return False

    nodes = sorted(g.nodes(), key=lambda x: (g.degree(x), x))
    index = {v: i for i, v in enumerate(nodes)}
    adj = [0] * size
    for a, b in g.edges():
        adj[index[a]] |= 1 << index[b]
        adj[index[b]] |= 1 << index[a]
    full = (1 << size) - 1
    start = 0

    def extend(end: int, visited: int, count: int) -> bool:
        if count == size:
            return bool(adj[end] >> start & 1)
        options = adj[end] & ~visited
        while options:
            bit = options & -options
            options ^= bit
            nxt = bit.bit_length() - 1
            new_visited = visited | bit
            open_set = (full & ~new_visited) | (1 << start) | bit
            rest = full & ~new_visited
            feasible = True
            while rest:
                wbit = rest & -rest
                rest ^= wbit
                w = wbit.bit_length() - 1
                if (adj[w] & open_set).bit_count() < 2:
                    feasible = False
                    break
            if feasible and extend(nxt, new_visited, count + 1):
                return True
        return False

    return extend(start, 1 << start, 1)


def odd_cycle_bruteforce(g: nx.Graph) -> bool:
    """枚举全部 2-着色；不存在合法着色即存在奇圈"""
    nodes = list(g.nodes())
    if len(nodes) > settings.BRUTEFORCE_VERTEX_CAP:
        raise OracleCapExceeded(f"顶点数 {len(nodes)} 超过暴力上限")
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[a], index[b]) for a, b in g.edges()]
    for mask in range(1 << max(len(nodes) - 1, 0)):
        coloring = mask << 1
        if all((coloring >> a & 1) != (coloring >> b & 1) for a, b in edges):
            return False
    return True


def alternating_reachability_bruteforce(inst: BaseInstance, v: int, reverse: bool = False) -> Set[int]:
    """
    枚举从 v 出发、以 H2 边开始的全部交错游走（长度不超过 2k），
    返回以 H̄1 边结尾可到达的顶点集合
    """
    if inst.k > settings.ALTERNATING_BRUTEFORCE_MAX_K:
        raise OracleCapExceeded(f"k = {inst.k} 超过交错游走枚举上限")
    h2 = h2_neighbors(inst)
    d = directed_h1(inst, reverse=reverse)
    reached: Set[int] = set()

    def walk(x: int, steps_left: int) -> None:
        if steps_left < 2:
            return
        for y in set(h2[x]):
            z = d.succ[y]
            reached.add(z)
            walk(z, steps_left - 2)

    walk(v, 2 * inst.k)
    return reached


def permutation_cycle_count(perm: Iterable[int]) -> int:
    """沿下标追踪计算置换的圈数"""
    perm = [int(p) for p in perm]
    seen = [False] * len(perm)
    count = 0
    for s in range(len(perm)):
        if seen[s]:
            continue
        count += 1
        x = s
        while not seen[x]:
            seen[x] = True
            x = perm[x]
    return count


def harmonic_number(n: int) -> float:
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def cycle_count_stats(n: int, trials: int, seed: int) -> CycleCountStats:
    """
    均匀随机排列圈数的统计

    Args:
        n: 排列大小
        trials: 样本数
        seed: 随机种子

    Returns:
        CycleCountStats: 均值、分位数与超过 2 ln n 的比例
    """
    rng = np.random.default_rng(seed)
    counts = np.array([permutation_cycle_count(rng.permutation(n)) for _ in range(trials)])
    return CycleCountStats(
        n=n,
        trials=trials,
        seed=seed,
        mean=float(counts.mean()),
        median=float(np.median(counts)),
        p90=float(np.quantile(counts, 0.9)),
        p99=float(np.quantile(counts, 0.99)),
        maximum=int(counts.max()),
        harmonic=harmonic_number(n),
        frac_above_2ln=float(np.mean(counts > 2 * math.log(n))),
    )


def cycle_as_pairs(cycle: Sequence[LiftVertex]) -> List[Tuple[int, int]]:
    return [(v.base, v.fiber_idx) for v in cycle]
