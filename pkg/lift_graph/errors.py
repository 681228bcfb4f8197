"""
异常定义
结构性输入错误、假设不满足、提升图内部错误以及阶段重启信号
"""

from typing import Optional

from models import SearchPhase


class InstanceFormatError(ValueError):
    """算例文件或算例结构不合法"""


class HypothesisError(ValueError):
    """算例不满足定理假设，且未给出覆盖参数"""


class RevealError(RuntimeError):
    """重复揭示同一条边，或请求的基图边不存在"""


class LiftCorruptionError(RuntimeError):
    """部分匹配没有可用的未匹配编号，说明内部状态已损坏"""


class RotationError(ValueError):
    """旋转枢轴越界、旋转边未揭示或闭合边不存在"""


class InvariantViolation(AssertionError):
    """划分不变量或着色观察不成立，说明实现存在错误"""


class LemmaViolation(RuntimeError):
    """目标顶点没有被着色为 B/RB，不存在交错路径"""


class OracleCapExceeded(ValueError):
    """暴力验证超出顶点数上限"""


class PhaseRestart(Exception):
    """
    阶段重试或预算耗尽，整个试验需要以新的随机性重启

    Args:
        phase: 发出信号的阶段
        reason: 重启原因
    """

    def __init__(self, phase: Optional[SearchPhase], reason: str):
        super().__init__(f"[{phase.value if phase else '-'}] {reason}")
        self.phase = phase
        self.reason = reason
