"""
基图模块
负责算例文件的读写、定理假设的逐条校验，以及 H1 ∪ H2、G − H1 等派生图
"""

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
from pydantic import ValidationError

from models import BaseInstance, ValidationReport
from .errors import InstanceFormatError

REQUIRED_MIN_DEGREE = 5


@dataclass(frozen=True)
class DirectedH1:
    """定向后的 H1：后继与前驱映射"""

    succ: Dict[int, int]
    pred: Dict[int, int]


def _parse_ints(tokens: List[str], line_no: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as e:
        raise InstanceFormatError(f"第 {line_no} 行存在非整数: {' '.join(tokens)}") from e


def parse_instance(text: str, name: str = "") -> BaseInstance:
    """
    解析行格式的算例文本

    Args:
        text: 算例文本，包含 k / edges / h1 / h2 段，# 开头为注释
        name: 算例名称

    Returns:
        BaseInstance: 结构合法的算例（H2 已旋转到与 H1 同一起点）
    """
    k: Optional[int] = None
    edges: List[Tuple[int, int]] = []
    h1: Optional[List[int]] = None
    h2: Optional[List[int]] = None
    in_edges = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if head == "k":
            values = _parse_ints(tokens[1:], line_no)
            if len(values) != 1:
                raise InstanceFormatError(f"第 {line_no} 行: k 需要一个整数")
            k = values[0]
            in_edges = False
        elif head == "edges":
            in_edges = True
        elif head in ("h1", "h2"):
            values = _parse_ints(tokens[1:], line_no)
            if head == "h1":
                h1 = values
            else:
                h2 = values
            in_edges = False
        elif in_edges:
            values = _parse_ints(tokens, line_no)
            if len(values) != 2:
                raise InstanceFormatError(f"第 {line_no} 行: 边需要两个端点")
            edges.append((values[0], values[1]))
        else:
            raise InstanceFormatError(f"第 {line_no} 行无法识别: {raw.strip()}")

    if k is None or h1 is None or h2 is None:
        raise InstanceFormatError("算例缺少 k、h1 或 h2 段")
    if len(h1) != k or len(h2) != k:
        raise InstanceFormatError("h1/h2 的长度必须等于 k")
    if h1[0] in h2:
        start = h2.index(h1[0])
        h2 = h2[start:] + h2[:start]

    try:
        return BaseInstance(k=k, edges=edges, h1_order=h1, h2_order=h2, name=name)
    except ValidationError as e:
        raise InstanceFormatError(str(e)) from e


def load_instance(path: str) -> BaseInstance:
    """从文件读取算例"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InstanceFormatError(f"无法读取算例文件 {path}: {e}") from e
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_instance(text, name=name)


def dump_instance(inst: BaseInstance) -> str:
    """把算例写回行格式文本"""
    lines = [f"k {inst.k}", "edges"]
    lines.extend(f"{u} {v}" for u, v in inst.edges)
    lines.append("h1 " + " ".join(map(str, inst.h1_order)))
    lines.append("h2 " + " ".join(map(str, inst.h2_order)))
    return "\n".join(lines) + "\n"


def base_graph(inst: BaseInstance) -> nx.Graph:
    """基图 G"""
    g = nx.Graph()
    g.add_nodes_from(range(inst.k))
    g.add_edges_from(inst.edges)
    return g


def union_subgraph(inst: BaseInstance) -> nx.Graph:
    """H = H1 ∪ H2"""
    g = nx.Graph()
    g.add_nodes_from(range(inst.k))
    g.add_edges_from(inst.h1_edges())
    g.add_edges_from(inst.h2_edges())
    return g


def residual_graph(inst: BaseInstance) -> nx.Graph:
    """G1 = G − H1"""
    g = base_graph(inst)
    g.remove_edges_from(inst.h1_edges())
    return g


def directed_h1(inst: BaseInstance, reverse: bool = False) -> DirectedH1:
    """
    H1 的定向

    Args:
        inst: 算例
        reverse: 为 True 时取 h1_order 的反方向

    Returns:
        DirectedH1: 后继/前驱映射
    """
    order = inst.h1_order[::-1] if reverse else inst.h1_order
    succ = {order[i]: order[(i + 1) % inst.k] for i in range(inst.k)}
    pred = {v: u for u, v in succ.items()}
    return DirectedH1(succ=succ, pred=pred)


def h2_neighbors(inst: BaseInstance) -> Dict[int, Tuple[int, int]]:
    """H2 上每个顶点的两个邻居"""
    order = inst.h2_order
    return {order[i]: (order[i - 1], order[(i + 1) % inst.k]) for i in range(inst.k)}


def extra_edges(inst: BaseInstance) -> List[Tuple[int, int]]:
    """G − H1 − H2 的边，按字典序"""
    used: Set[Tuple[int, int]] = set(inst.h1_edges()) | set(inst.h2_edges())
    return [e for e in inst.edges if e not in used]


def check_hamilton_cycles(inst: BaseInstance) -> Tuple[bool, str]:
    """检查 H1、H2 都是 G 的哈密顿圈且边不交"""
    edge_set = set(inst.edges)
    for label, cycle in (("h1", inst.h1_edges()), ("h2", inst.h2_edges())):
        missing = [e for e in cycle if e not in edge_set]
        if missing:
            return False, f"{label} 的边 {missing[0]} 不在 G 中"
    shared = set(inst.h1_edges()) & set(inst.h2_edges())
    if shared:
        return False, f"h1 与 h2 共享边 {sorted(shared)[0]}"
    return True, ""


def validate(inst: BaseInstance, allow_min_degree: Optional[int] = None) -> ValidationReport:
    """
    逐条检查定理假设

    Args:
        inst: 结构合法的算例
        allow_min_degree: 覆盖最小度要求（实验用），默认 5

    Returns:
        ValidationReport: 三项条件及其合取
    """
    required = allow_min_degree if allow_min_degree is not None else REQUIRED_MIN_DEGREE
    g = base_graph(inst)
    min_degree = min(d for _, d in g.degree())
    hamilton_ok, detail = check_hamilton_cycles(inst)
    return ValidationReport(
        min_degree=min_degree,
        required_min_degree=required,
        min_degree_ok=min_degree >= required,
        hamilton_ok=hamilton_ok,
        hamilton_detail=detail,
        non_bipartite_ok=not nx.is_bipartite(union_subgraph(inst)),
    )


def _cycle_edge_set(order: List[int]) -> Set[Tuple[int, int]]:
    k = len(order)
    return {(min(order[i], order[(i + 1) % k]), max(order[i], order[(i + 1) % k])) for i in range(k)}


def random_instance(k: int, rng: np.random.Generator, max_tries: int = 1000) -> BaseInstance:
    """
    随机生成满足全部假设的算例

    Args:
        k: 顶点数（至少 6）
        rng: 随机数生成器
        max_tries: H2 拒绝采样和整体重采样的上限

    Returns:
        BaseInstance: validate 通过的算例
    """
    if k < 6:
        raise ValueError("random_instance 需要 k >= 6")
    for _ in range(max_tries):
        h1 = [int(v) for v in rng.permutation(k)]
        h1_set = _cycle_edge_set(h1)
        h2 = None
        for _ in range(max_tries):
            rest = [int(v) for v in rng.permutation([v for v in range(k) if v != h1[0]])]
            candidate = [h1[0]] + rest
            cand_edges = _cycle_edge_set(candidate)
            if not cand_edges & h1_set:
                h2 = candidate
                h2_set = cand_edges
                break
        if h2 is None:
            continue

        edges = set(h1_set) | h2_set
        degree = {v: 4 for v in range(k)}
        chords = [pair for pair in combinations(range(k), 2) if pair not in edges]
        for idx in rng.permutation(len(chords)):
            u, v = chords[int(idx)]
            if degree[u] < REQUIRED_MIN_DEGREE or degree[v] < REQUIRED_MIN_DEGREE:
                edges.add((u, v))
                degree[u] += 1
                degree[v] += 1

        inst = BaseInstance(k=k, edges=sorted(edges), h1_order=h1, h2_order=h2, name=f"random{k}")
        if validate(inst).passed:
            return inst
    raise RuntimeError(f"在 {max_tries} 次尝试内没有生成合法的 k={k} 算例")
