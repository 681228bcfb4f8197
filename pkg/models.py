"""
数据模型定义
使用 Pydantic BaseModel 定义跨模块、跨进程传递的数据结构
"""

import math
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from settings import settings


class LiftVertex(NamedTuple):
    """提升图顶点：(基图顶点, 纤维内编号)"""

    base: int
    fiber_idx: int

    def __str__(self) -> str:
        return f"{self.base}:{self.fiber_idx}"


class SearchPhase(str, Enum):
    """七阶段算法的阶段枚举"""

    CYCLE_LIFT = "cycle_lift"  # 阶段1：提升 H1
    CYCLE_MERGE = "cycle_merge"  # 阶段2：圈合并
    PATH_MERGE = "path_merge"  # 阶段3：路径吸收基本圈
    CLONING = "cloning"  # 阶段4：克隆路径
    MULTIPLY_ENDS = "multiply_ends"  # 阶段5：端点倍增
    ADJUSTING = "adjusting"  # 阶段6：端点调整到目标纤维
    CLOSING = "closing"  # 阶段7：闭合成圈
    DONE = "done"  # 找到哈密顿圈


class TrialOutcome(str, Enum):
    """试验结果枚举"""

    HAMILTON = "hamilton"
    FAILURE = "failure"


class Color(str, Enum):
    """交错路径着色过程中的顶点颜色"""

    N = "N"  # 未到达
    R = "R"  # 以红边（H1 有向边）离开
    B = "B"  # 以蓝边（H2 边）离开
    RB = "RB"  # 两种方式都可以离开


class EdgeTag(str, Enum):
    """交错路径上每条边的来源"""

    H2 = "h2"  # 需要在提升图中揭示的 H2 边
    H1 = "h1"  # 路径中已经存在的 H1 有向边


class BaseInstance(BaseModel):
    """基图算例：图 G 以及两条边不交的哈密顿圈 H1、H2"""

    k: int = Field(..., description="基图顶点数")
    edges: List[Tuple[int, int]] = Field(..., description="无向边列表，规范化为 (u, v), u < v")
    h1_order: List[int] = Field(..., description="哈密顿圈 H1 的顶点顺序")
    h2_order: List[int] = Field(..., description="哈密顿圈 H2 的顶点顺序，首顶点与 H1 相同")
    name: str = Field("", description="算例名称")

    @model_validator(mode="after")
    def _check_structure(self) -> "BaseInstance":
        if self.k < 5:
            raise ValueError(f"k 必须至少为 5，当前为 {self.k}")
        normalized = []
        for u, v in self.edges:
            if not (0 <= u < self.k and 0 <= v < self.k):
                raise ValueError(f"边 ({u}, {v}) 引用了越界顶点")
            if u == v:
                raise ValueError(f"不允许自环 ({u}, {v})")
            normalized.append((min(u, v), max(u, v)))
        if len(set(normalized)) != len(normalized):
            raise ValueError("边列表中存在重边")
        self.edges = sorted(normalized)
        for label, order in (("h1", self.h1_order), ("h2", self.h2_order)):
            if sorted(order) != list(range(self.k)):
                raise ValueError(f"{label} 不是 0..{self.k - 1} 的排列")
        if self.h2_order[0] != self.h1_order[0]:
            raise ValueError("h2 的首顶点必须与 h1 相同")
        return self

    def cycle_edges(self, order: List[int]) -> List[Tuple[int, int]]:
        """按顺序返回圈上的规范化边"""
        return [
            (min(order[i], order[(i + 1) % self.k]), max(order[i], order[(i + 1) % self.k]))
            for i in range(self.k)
        ]

    def h1_edges(self) -> List[Tuple[int, int]]:
        return self.cycle_edges(self.h1_order)

    def h2_edges(self) -> List[Tuple[int, int]]:
        return self.cycle_edges(self.h2_order)


class ValidationReport(BaseModel):
    """定理假设的逐条检查结果"""

    min_degree: int = Field(..., description="基图最小度")
    required_min_degree: int = Field(5, description="要求的最小度（可被覆盖）")
    min_degree_ok: bool = Field(..., description="最小度条件是否满足")
    hamilton_ok: bool = Field(..., description="H1、H2 是否为边不交的哈密顿圈")
    hamilton_detail: str = Field("", description="哈密顿圈检查失败原因")
    non_bipartite_ok: bool = Field(..., description="H1 ∪ H2 是否非二部")
    passed: bool = Field(False, description="三项条件的合取")

    @model_validator(mode="after")
    def _conjunction(self) -> "ValidationReport":
        self.passed = self.min_degree_ok and self.hamilton_ok and self.non_bipartite_ok
        return self


THRESHOLD_SIZE_KEYS = (
    "small_remainder",
    "probe_batch",
    "clone_count",
    "endset_target",
    "adjusted_target",
    "deactivation_budget",
)


class Thresholds(BaseModel):
    """算法阈值配置，默认值取自渐近指数并截断到 [1, n]"""

    small_remainder: int = Field(..., ge=1, description="阶段2 A/B 情形分界 (n^{9/10})")
    probe_batch: int = Field(..., ge=1, description="阶段2 B 每批探测顶点数 (n^{1/3})")
    clone_count: int = Field(..., ge=1, description="克隆路径数 r (log² n)")
    endset_target: int = Field(..., ge=1, description="阶段5 端点集目标 (n^{3/5} log² n)")
    adjusted_target: int = Field(..., ge=1, description="阶段6 保留端点数 (n^{3/5})")
    rotation_budget: int = Field(..., ge=1, description="每阶段揭示+旋转预算 q")
    deactivation_budget: int = Field(..., ge=1, description="|D| 软上限 (n^{5/6})")
    max_restarts: int = Field(..., ge=0, description="试验级重启上限")

    @model_validator(mode="after")
    def _check_order(self) -> "Thresholds":
        if self.endset_target < self.adjusted_target:
            raise ValueError("endset_target 不能小于 adjusted_target")
        return self

    @classmethod
    def for_size(cls, n: int, overrides: Optional[Dict[str, int]] = None) -> "Thresholds":
        """
        按纤维大小 n 计算默认阈值

        Args:
            n: 纤维大小
            overrides: 覆盖项，尺寸类阈值同样截断到 [1, n]

        Returns:
            Thresholds: 阈值配置
        """
        if n < 1:
            raise ValueError("n 必须为正整数")
        ln = math.log(n)

        def clamp(value: float) -> int:
            return max(1, min(n, math.ceil(value - 1e-9)))

        values: Dict[str, int] = {
            "small_remainder": clamp(n ** 0.9),
            "probe_batch": clamp(n ** (1 / 3)),
            "clone_count": clamp(ln**2),
            "endset_target": clamp(n**0.6 * ln**2),
            "adjusted_target": clamp(n**0.6),
            "rotation_budget": max(1, settings.ROTATION_BUDGET_FACTOR * n),
            "deactivation_budget": clamp(n ** (5 / 6)),
            "max_restarts": settings.MAX_RESTARTS,
        }
        values["endset_target"] = max(values["endset_target"], values["adjusted_target"])
        for key, value in (overrides or {}).items():
            if key not in cls.model_fields:
                raise ValueError(f"未知阈值 {key}")
            values[key] = max(1, min(n, int(value))) if key in THRESHOLD_SIZE_KEYS else int(value)
        return cls(**values)


class PhaseTransition(BaseModel):
    """阶段跳转记录"""

    from_phase: SearchPhase = Field(..., description="跳转前阶段")
    to_phase: SearchPhase = Field(..., description="跳转后阶段")
    reason: str = Field(..., description="跳转原因")
    attempt: int = Field(0, description="所属重启轮次")
    reveals: int = Field(0, description="跳转时累计揭示数")
    inactive_count: int = Field(0, description="跳转时 |D|")


class TrialMetrics(BaseModel):
    """单次试验的度量"""

    reveals: int = Field(0, description="揭示的提升边总数（含 H1）")
    g1_reveals: int = Field(0, description="揭示的 G1 边数")
    inactive_count: int = Field(0, description="|D|")
    restarts: int = Field(0, description="重启次数")
    basic_cycles_initial: int = Field(0, description="H1 提升后的基本圈数")
    basic_cycles_within_lemma: bool = Field(True, description="基本圈数是否不超过 2 ln n")
    cycles_absorbed: int = Field(0, description="阶段2/3 吸收的基本圈数")
    phase2_invocations: int = Field(0, description="阶段2 成功次数")
    phase3_invocations: int = Field(0, description="阶段3 成功次数")
    rotations: int = Field(0, description="Pósa 旋转次数")
    clones_built: int = Field(0, description="阶段4 最近一次构造的克隆路径数")
    endset_sizes: Tuple[int, int] = Field((0, 0), description="阶段5 最近的 |S1|, |S2|")
    survivors: Tuple[int, int] = Field((0, 0), description="阶段6 最近的 |S'1|, |S'2|")
    fallback_target_edge: bool = Field(False, description="阶段6 是否退化为 H2 目标边")
    deactivation_within_budget: bool = Field(True, description="|D| 是否不超过软上限")
    activity_violations: int = Field(0, description="阶段边界处路径/圈外的失活顶点数累计")
    phase_micros: Dict[str, int] = Field(default_factory=dict, description="各阶段耗时（微秒）")


class TrialReport(BaseModel):
    """单次试验报告"""

    seed: int = Field(..., description="试验种子")
    k: int = Field(..., description="基图顶点数")
    n: int = Field(..., description="纤维大小")
    instance_name: str = Field("", description="算例名称")
    outcome: TrialOutcome = Field(..., description="试验结果")
    verified: bool = Field(False, description="结果圈是否通过独立验证")
    cycle: Optional[List[Tuple[int, int]]] = Field(None, description="哈密顿圈 (base, fiber) 序列")
    thresholds: Thresholds = Field(..., description="使用的阈值")
    metrics: TrialMetrics = Field(default_factory=TrialMetrics, description="度量")
    transitions: List[PhaseTransition] = Field(default_factory=list, description="阶段跳转历史")
    restart_reasons: List[str] = Field(default_factory=list, description="每次重启的原因")

    def deterministic_dump(self) -> dict:
        """去掉墙钟时间后的可复现导出"""
        return self.model_dump(mode="json", exclude={"metrics": {"phase_micros"}})


class AlternatingStep(BaseModel):
    """交错路径上的一条边"""

    tail: int = Field(..., description="起点")
    head: int = Field(..., description="终点")
    tag: EdgeTag = Field(..., description="边的来源")


class AlternatingPath(BaseModel):
    """H2 H̄1 交错路径（可能重复经过基图顶点）"""

    vertices: List[int] = Field(..., description="顶点序列，长度为奇数")
    steps: List[AlternatingStep] = Field(..., description="边序列，H2 与 H̄1 交替")
    reverse_h1: bool = Field(False, description="H̄1 是否取 h1_order 的反向")

    @property
    def length(self) -> int:
        return len(self.steps)


class ObservationReport(BaseModel):
    """着色不动点上的结构性观察"""

    root: int = Field(..., description="着色起点")
    counts: Dict[str, int] = Field(..., description="各颜色顶点数")
    special_red_edges: int = Field(0, description="观察(ii)中计数的红边条数")
    violations: List[str] = Field(default_factory=list, description="违反的观察")

    @property
    def passed(self) -> bool:
        return not self.violations


class VerificationResult(BaseModel):
    """哈密顿圈验证结果"""

    ok: bool = Field(..., description="是否通过")
    reason: str = Field("", description="第一处违例描述")
    position: Optional[int] = Field(None, description="违例所在位置")


class CycleCountStats(BaseModel):
    """随机排列圈数统计"""

    n: int
    trials: int
    seed: int
    mean: float
    median: float
    p90: float
    p99: float
    maximum: int
    harmonic: float = Field(..., description="调和数 H_n，期望圈数")
    frac_above_2ln: float = Field(..., description="圈数超过 2 ln n 的比例")


class ExperimentKind(str, Enum):
    """实验类型"""

    SUCCESS = "success"
    DEACTIVATION = "deactivation"
    BASIC_CYCLES = "basic-cycles"


class ExperimentSpec(BaseModel):
    """批量实验描述"""

    kind: ExperimentKind = Field(ExperimentKind.SUCCESS, description="实验类型")
    instance: str = Field("", description="算例文件路径（basic-cycles 实验不需要）")
    cycle_length: int = Field(5, ge=3, description="basic-cycles 实验中基圈 C_h 的 h")
    n_values: List[int] = Field(..., min_length=1, description="纤维大小列表")
    trials: int = Field(..., ge=1, description="每个 n 的试验数")
    base_seed: int = Field(0, ge=0, description="基础种子")
    thresholds: Dict[str, int] = Field(default_factory=dict, description="阈值覆盖")
    max_restarts: Optional[int] = Field(None, ge=0, description="重启上限覆盖")
    allow_min_degree: Optional[int] = Field(None, ge=1, description="最小度覆盖")
    output: Optional[str] = Field(None, description="CSV 输出路径")
    workers: int = Field(1, ge=1, description="并行进程数")
    record_timings: bool = Field(False, description="是否记录各阶段耗时；关闭时 CSV 逐字节可复现")

    @model_validator(mode="after")
    def _check_n(self) -> "ExperimentSpec":
        if any(n < 1 for n in self.n_values):
            raise ValueError("n 必须为正整数")
        return self
