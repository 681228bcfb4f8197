"""
算法常量与输出格式定义
包括阶段说明、CSV 列定义以及随机种子派生规则
"""

from models import ExperimentKind, SearchPhase


# ==================== 阶段说明 ====================
# 用于报告查看器和 CLI 输出

PHASE_DESCRIPTIONS = {
    SearchPhase.CYCLE_LIFT: {
        "name": "提升 H1",
        "description": "揭示 H1 的全部提升边，得到若干基本圈，取最长者为 C",
    },
    SearchPhase.CYCLE_MERGE: {
        "name": "圈合并",
        "description": "通过 G1 边把 C 与某个剩余基本圈连成一条路径 P",
    },
    SearchPhase.PATH_MERGE: {
        "name": "路径吸收",
        "description": "路径端点连到剩余基本圈时，把整个基本圈接到路径上",
    },
    SearchPhase.CLONING: {
        "name": "克隆路径",
        "description": "固定起点做 Pósa 旋转，得到 r 条端点互不相同的路径",
    },
    SearchPhase.MULTIPLY_ENDS: {
        "name": "端点倍增",
        "description": "把路径一分为二，交替旋转两半，扩大两侧端点集 S1、S2",
    },
    SearchPhase.ADJUSTING: {
        "name": "端点调整",
        "description": "沿交错路径旋转，把端点移到目标边 {x, y} 的两个纤维上",
    },
    SearchPhase.CLOSING: {
        "name": "闭合",
        "description": "揭示 {x, y} 上的匹配边，找到连接 S'1 与 S'2 的边后闭合成圈",
    },
    SearchPhase.DONE: {
        "name": "完成",
        "description": "得到覆盖全部 k·n 个顶点的哈密顿圈",
    },
}


# ==================== CSV 列定义 ====================

SOLVE_METRICS_COLUMNS = [
    "seed",
    "outcome",
    "n",
    "reveals",
    "inactive_count",
    "restarts",
    "basic_cycles_initial",
] + [f"{phase.value}_micros" for phase in SearchPhase if phase != SearchPhase.DONE]

EXPERIMENT_COLUMNS = {
    ExperimentKind.SUCCESS: [
        "n",
        "trials",
        "successes",
        "success_fraction",
        "median_reveals",
        "median_inactive",
        "soft_inactive_bound",
        "median_inactive_within_soft_bound",
        "median_restarts",
        "wall_seconds",
    ],
    ExperimentKind.DEACTIVATION: [
        "n",
        "seed",
        "outcome",
        "reveals",
        "inactive_count",
        "ref_n_5_6",
        "ref_10_n_4_5_ln_n",
        "within_soft_bound",
    ],
    ExperimentKind.BASIC_CYCLES: [
        "n",
        "trials",
        "mean",
        "median",
        "p99",
        "maximum",
        "harmonic",
        "two_ln_n",
        "frac_above_2ln",
    ],
}

PERMSTATS_COLUMNS = ["n", "trials", "seed", "mean", "median", "p90", "p99", "maximum", "harmonic", "frac_above_2ln"]


# ==================== 种子派生 ====================

SEED_MASK = (1 << 63) - 1
_U64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """SplitMix64 混合函数"""
    z = (x + 0x9E3779B97F4A7C15) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, index: int) -> int:
    """第 index 个试验的种子：base ⊕ splitmix64(index)，截断到 63 位"""
    return (base_seed ^ splitmix64(index)) & SEED_MASK
