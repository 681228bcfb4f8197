"""
试验会话模块
TrialSession 按阶段跳转图依次调度七个阶段，处理重启，并在报告前独立验证哈密顿圈
"""

import csv
import json
import math
import os
import time
from datetime import datetime
from typing import Dict, List, Optional

import numpy as np
from opentelemetry import trace
from traceloop.sdk.decorators import task, workflow

from constants import SOLVE_METRICS_COLUMNS
from lift_graph.base_graph import validate
from lift_graph.errors import HypothesisError, InvariantViolation, PhaseRestart
from lift_graph.lift import LiftState
from lift_graph.oracle import cycle_as_pairs, is_valid_lift_cycle, is_valid_lift_path, verify_hamilton_cycle
from models import (
    BaseInstance,
    PhaseTransition,
    SearchPhase,
    Thresholds,
    TrialOutcome,
    TrialReport,
)
from phases import (
    AdjustingPhase,
    CloningPhase,
    ClosingPhase,
    CycleLiftPhase,
    CycleMergePhase,
    MultiplyEndsPhase,
    PathMergePhase,
    Phase,
    SearchState,
)
from phases.multiply_ends import reconstruct_pair_path
from settings import settings

# 阶段跳转图
PHASE_TRANSITION_GRAPH = {
    SearchPhase.CYCLE_LIFT: [SearchPhase.CYCLE_MERGE, SearchPhase.DONE],
    SearchPhase.CYCLE_MERGE: [SearchPhase.CLONING, SearchPhase.DONE],
    SearchPhase.PATH_MERGE: [SearchPhase.CLONING],
    SearchPhase.CLONING: [SearchPhase.PATH_MERGE, SearchPhase.MULTIPLY_ENDS],
    SearchPhase.MULTIPLY_ENDS: [
        SearchPhase.CYCLE_MERGE,
        SearchPhase.PATH_MERGE,
        SearchPhase.ADJUSTING,
        SearchPhase.DONE,
    ],
    SearchPhase.ADJUSTING: [SearchPhase.PATH_MERGE, SearchPhase.CLOSING],
    SearchPhase.CLOSING: [SearchPhase.CYCLE_MERGE, SearchPhase.DONE],
    SearchPhase.DONE: [],  # 终止状态
}


class TrialSession:
    """
    单次试验：一个算例、一个纤维大小、一个种子

    每次重启丢弃整个提升图，第 a 次尝试使用 SeedSequence([seed, a]) 派生的随机流
    """

    def __init__(
        self,
        inst: BaseInstance,
        n: int,
        thresholds: Optional[Thresholds] = None,
        seed: int = 0,
        record_timings: Optional[bool] = None,
    ):
        self.inst = inst
        self.n = n
        self.seed = seed
        self.thresholds = thresholds or Thresholds.for_size(n)
        self.record_timings = settings.RECORD_TIMINGS if record_timings is None else record_timings
        self.phases: Dict[SearchPhase, Phase] = {
            p.phase: p
            for p in (
                CycleLiftPhase(),
                CycleMergePhase(),
                PathMergePhase(),
                CloningPhase(),
                MultiplyEndsPhase(),
                AdjustingPhase(),
                ClosingPhase(),
            )
        }
        self.transitions: List[PhaseTransition] = []
        self.restart_reasons: List[str] = []
        self.phase_micros: Dict[str, int] = {}
        self.state: Optional[SearchState] = None

    def new_state(self, attempt: int) -> SearchState:
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, attempt]))
        lift = LiftState.from_instance(self.inst, self.n, rng)
        return SearchState(inst=self.inst, lift=lift, thresholds=self.thresholds, attempt=attempt)

    def _transition(self, state: SearchState, from_phase: SearchPhase, to_phase: SearchPhase, reason: str):
        if to_phase not in PHASE_TRANSITION_GRAPH[from_phase]:
            raise InvariantViolation(f"非法的阶段跳转 {from_phase.value} -> {to_phase.value}")
        self.transitions.append(
            PhaseTransition(
                from_phase=from_phase,
                to_phase=to_phase,
                reason=reason,
                attempt=state.attempt,
                reveals=state.lift.reveal_count,
                inactive_count=state.lift.inactive_count,
            )
        )
        trace.get_current_span().add_event(
            name="phase.transition",
            attributes={
                "from_phase": from_phase.value,
                "to_phase": to_phase.value,
                "reason": reason,
                "attempt": state.attempt,
            },
        )

    def _boundary_checks(self, state: SearchState) -> None:
        """阶段边界：划分不变量硬检查，活跃性不变量只计数"""
        state.check_partition()
        state.metrics.activity_violations += state.outside_inactive_count()
        if settings.ENABLE_DEBUG_MODE:
            if state.path is not None and not is_valid_lift_path(state.lift, state.path.verts):
                raise InvariantViolation("当前路径不合法")
            if state.path is None and state.cycle is not None and not is_valid_lift_cycle(state.lift, state.cycle):
                raise InvariantViolation("当前圈不合法")
            if state.half_a is not None and state.half_b is not None:
                self._check_pair_paths(state)

    @staticmethod
    def _check_pair_paths(state: SearchState) -> None:
        """抽查端点集首尾两个端点组成的 P_xy"""
        a, b = state.half_a, state.half_b
        first_half = set(a.root_snapshot.verts)
        span = set(a.root_snapshot.verts) | set(b.root_snapshot.verts)
        xs, ys = list(a.found), list(b.found)
        for x in {xs[0], xs[-1]}:
            for y in {ys[0], ys[-1]}:
                pxy = reconstruct_pair_path(a, b, x, y)
                if pxy.start != x or pxy.end != y or set(pxy.verts) != span:
                    raise InvariantViolation(f"P_{x},{y} 的端点或顶点集不正确")
                if set(pxy.verts[: len(first_half)]) != first_half:
                    raise InvariantViolation(f"P_{x},{y} 的前 |V1| 个顶点不在 V1 中")
                if not is_valid_lift_path(state.lift, pxy.verts):
                    raise InvariantViolation(f"P_{x},{y} 不是合法路径")

    @task(name="trial_attempt", version=1)
    def run_attempt(self, attempt: int) -> SearchState:
        """
        执行一次完整尝试，直到 DONE

        Raises:
            PhaseRestart: 任一阶段重试或预算耗尽
        """
        state = self.new_state(attempt)
        self.state = state
        current = SearchPhase.CYCLE_LIFT
        while current != SearchPhase.DONE:
            state.budget_used = 0
            started = time.perf_counter_ns()
            try:
                result = self.phases[current].execute(state)
            finally:
                if self.record_timings:
                    elapsed = (time.perf_counter_ns() - started) // 1000
                    self.phase_micros[current.value] = self.phase_micros.get(current.value, 0) + elapsed
            self._transition(state, current, result.next_phase, result.reason)
            current = result.next_phase
            self._boundary_checks(state)
        return state

    @workflow(name="hamilton_trial", version=1)
    def run(self) -> TrialReport:
        """
        运行试验，最多重启 max_restarts 次

        Returns:
            TrialReport: 成功时圈已经过独立验证；失败时仍给出最后一次尝试的度量
        """
        state: Optional[SearchState] = None
        for attempt in range(self.thresholds.max_restarts + 1):
            try:
                state = self.run_attempt(attempt)
                break
            except PhaseRestart as e:
                self.restart_reasons.append(str(e))
                trace.get_current_span().add_event(
                    name="trial.restart", attributes={"attempt": attempt, "reason": str(e)}
                )
                state = None
        return self._report(state)

    def _report(self, state: Optional[SearchState]) -> TrialReport:
        final = state or self.state
        metrics = final.metrics.model_copy()
        metrics.reveals = final.lift.reveal_count
        metrics.g1_reveals = final.lift.g1_reveal_count
        metrics.inactive_count = final.lift.inactive_count
        metrics.restarts = len(self.restart_reasons)
        metrics.deactivation_within_budget = final.lift.inactive_count <= self.thresholds.deactivation_budget
        metrics.phase_micros = dict(self.phase_micros)

        cycle = None
        verified = False
        if state is not None:
            cycle = cycle_as_pairs(state.hamilton_cycle)
            result = verify_hamilton_cycle(state.lift, cycle)
            if not result.ok:
                raise InvariantViolation(f"报告的哈密顿圈未通过验证: {result.reason}")
            verified = True

        return TrialReport(
            seed=self.seed,
            k=self.inst.k,
            n=self.n,
            instance_name=self.inst.name,
            outcome=TrialOutcome.HAMILTON if verified else TrialOutcome.FAILURE,
            verified=verified,
            cycle=cycle,
            thresholds=self.thresholds,
            metrics=metrics,
            transitions=self.transitions,
            restart_reasons=self.restart_reasons,
        )


def run(
    inst: BaseInstance,
    n: int,
    thresholds: Optional[Thresholds] = None,
    seed: int = 0,
    allow_min_degree: Optional[int] = None,
) -> TrialReport:
    """
    校验假设后运行一次试验

    Raises:
        HypothesisError: 算例不满足假设且没有给出覆盖
    """
    report = validate(inst, allow_min_degree=allow_min_degree)
    if not report.passed:
        raise HypothesisError(f"算例不满足假设: {report.model_dump_json()}")
    return TrialSession(inst, n, thresholds, seed).run()


def report_to_json(report: TrialReport) -> str:
    """RECORD_TIMINGS 关闭时去掉墙钟字段，保证同样输入逐字节一致"""
    data = report.model_dump(mode="json") if settings.RECORD_TIMINGS else report.deterministic_dump()
    return json.dumps(data, indent=2, ensure_ascii=False)


def export_report(report: TrialReport, filename: Optional[str] = None) -> str:
    """
    导出试验报告为 JSON 文件

    Returns:
        str: 文件路径
    """
    if filename is None:
        os.makedirs(settings.EXPORT_DIR, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        name = report.instance_name or f"k{report.k}"
        filename = os.path.join(settings.EXPORT_DIR, f"trial_{name}_n{report.n}_s{report.seed}_{timestamp}.json")
    with open(filename, "w", encoding="utf-8") as f:
        f.write(report_to_json(report))
    return filename


def write_cycle(report: TrialReport, filename: str) -> None:
    """每行一个 `base fiber`，按圈顺序"""
    with open(filename, "w", encoding="utf-8") as f:
        for base, fiber in report.cycle or []:
            f.write(f"{base} {fiber}\n")


def read_cycle(filename: str) -> List[List[int]]:
    with open(filename, "r", encoding="utf-8") as f:
        return [[int(t) for t in line.split()] for line in f if line.strip()]


def metrics_row(report: TrialReport) -> Dict[str, object]:
    row: Dict[str, object] = {
        "seed": report.seed,
        "outcome": report.outcome.value,
        "n": report.n,
        "reveals": report.metrics.reveals,
        "inactive_count": report.metrics.inactive_count,
        "restarts": report.metrics.restarts,
        "basic_cycles_initial": report.metrics.basic_cycles_initial,
    }
    for column in SOLVE_METRICS_COLUMNS[len(row):]:
        row[column] = report.metrics.phase_micros.get(column[: -len("_micros")], 0)
    return row


def write_metrics_csv(reports: List[TrialReport], filename: str) -> None:
    with open(filename, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SOLVE_METRICS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for report in reports:
            writer.writerow(metrics_row(report))


def soft_deactivation_bound(n: int) -> float:
    """|D| 的参考上界 10·n^{4/5}·ln n"""
    return 10 * n**0.8 * math.log(n) if n > 1 else 0.0
