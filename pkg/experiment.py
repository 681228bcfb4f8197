"""
批量实验
按 ExperimentSpec 运行带种子的独立试验，汇总为 CSV 行；并行时结果仍按 (n, 试验序号) 排列
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from opentelemetry import trace
from traceloop.sdk.decorators import workflow

from constants import EXPERIMENT_COLUMNS, trial_seed
from lift_graph.base_graph import load_instance, validate
from lift_graph.errors import HypothesisError
from lift_graph.lift import LiftState
from lift_graph.oracle import harmonic_number, verify_hamilton_cycle
from models import BaseInstance, ExperimentKind, ExperimentSpec, Thresholds, TrialOutcome, TrialReport
from settings import settings
from trial_session import TrialSession, soft_deactivation_bound

Row = Dict[str, object]

# (算例, n, 阈值覆盖, 重启上限, 种子, 是否计时)
TrialJob = Tuple[BaseInstance, int, Dict[str, int], Optional[int], int, bool]


class CheckedTrial(NamedTuple):
    """试验报告，以及实验端用独立验证器复核的结果"""

    report: TrialReport
    oracle_ok: bool


def build_thresholds(n: int, overrides: Dict[str, int], max_restarts: Optional[int] = None) -> Thresholds:
    values = dict(overrides)
    if max_restarts is not None:
        values["max_restarts"] = max_restarts
    return Thresholds.for_size(n, values)


def _trial_job(job: TrialJob) -> CheckedTrial:
    """在工作进程内运行试验，并趁提升图还在时用独立验证器复核报告的圈"""
    inst, n, overrides, max_restarts, seed, record_timings = job
    session = TrialSession(inst, n, build_thresholds(n, overrides, max_restarts), seed, record_timings)
    report = session.run()
    oracle_ok = report.cycle is not None and verify_hamilton_cycle(session.state.lift, report.cycle).ok
    return CheckedTrial(report, oracle_ok)


def _cycle_count_job(job: Tuple[int, int, int]) -> int:
    h, n, seed = job
    lift = LiftState.for_cycle(h, n, np.random.default_rng(seed))
    return len(lift.lift_h1())


def _fan_out(func: Callable, jobs: Sequence, workers: int) -> List:
    """workers > 1 时用进程池；map 保持提交顺序"""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, jobs))
    return [func(job) for job in jobs]


def load_checked_instance(spec: ExperimentSpec) -> BaseInstance:
    """
    读取并校验实验算例

    Raises:
        InstanceFormatError: 文件格式错误
        HypothesisError: 算例不满足假设
    """
    inst = load_instance(spec.instance)
    report = validate(inst, allow_min_degree=spec.allow_min_degree)
    if not report.passed:
        raise HypothesisError(f"算例 {inst.name} 不满足假设: {report.model_dump_json()}")
    return inst


def run_trials(spec: ExperimentSpec, inst: BaseInstance) -> Dict[int, List[CheckedTrial]]:
    """每个 n 运行 spec.trials 次试验，第 i 次使用 trial_seed(base_seed, i)"""
    jobs: List[TrialJob] = [
        (inst, n, spec.thresholds, spec.max_restarts, trial_seed(spec.base_seed, i), spec.record_timings)
        for n in spec.n_values
        for i in range(spec.trials)
    ]
    results = _fan_out(_trial_job, jobs, spec.workers)
    grouped: Dict[int, List[CheckedTrial]] = {}
    for job, result in zip(jobs, results):
        grouped.setdefault(job[1], []).append(result)
    return grouped


def verified_successes(trials: List[CheckedTrial]) -> List[TrialReport]:
    """只统计报告成功且通过独立验证器复核的试验"""
    return [t.report for t in trials if t.report.outcome == TrialOutcome.HAMILTON and t.oracle_ok]


def _median(values: List[float]) -> object:
    return round(float(np.median(values)), 6) if values else ""


@workflow(name="experiment_success_rate", version=1)
def experiment_success_rate(spec: ExperimentSpec) -> List[Row]:
    """
    成功率实验：每个 n 一行

    中位数在成功试验上计算；没有成功试验时留空。
    median_inactive_within_soft_bound 对照 10·n^{4/5}·ln n 给出通过与否
    """
    inst = load_checked_instance(spec)
    rows: List[Row] = []
    for n, trials in run_trials(spec, inst).items():
        successes = verified_successes(trials)
        wall = sum(sum(t.report.metrics.phase_micros.values()) for t in trials) / 1e6
        soft = soft_deactivation_bound(n)
        median_inactive = _median([r.metrics.inactive_count for r in successes])
        rows.append(
            {
                "n": n,
                "trials": len(trials),
                "successes": len(successes),
                "success_fraction": round(len(successes) / len(trials), 6),
                "median_reveals": _median([r.metrics.reveals for r in successes]),
                "median_inactive": median_inactive,
                "soft_inactive_bound": round(soft, 6),
                "median_inactive_within_soft_bound": "" if median_inactive == "" else median_inactive <= soft,
                "median_restarts": _median([r.metrics.restarts for r in successes]),
                "wall_seconds": round(wall, 6),
            }
        )
        trace.get_current_span().add_event(
            name="experiment.success_rate", attributes={"n": n, "successes": len(successes)}
        )
    return rows


@workflow(name="experiment_deactivation", version=1)
def experiment_deactivation(spec: ExperimentSpec) -> List[Row]:
    """失活规模实验：每个试验一行，附两条参考曲线 n^{5/6} 与 10·n^{4/5}·ln n"""
    inst = load_checked_instance(spec)
    rows: List[Row] = []
    for n, trials in run_trials(spec, inst).items():
        soft = soft_deactivation_bound(n)
        for report, oracle_ok in trials:
            success = report.outcome == TrialOutcome.HAMILTON and oracle_ok
            rows.append(
                {
                    "n": n,
                    "seed": report.seed,
                    "outcome": (TrialOutcome.HAMILTON if success else TrialOutcome.FAILURE).value,
                    "reveals": report.metrics.reveals,
                    "inactive_count": report.metrics.inactive_count,
                    "ref_n_5_6": round(n ** (5 / 6), 6),
                    "ref_10_n_4_5_ln_n": round(soft, 6),
                    "within_soft_bound": report.metrics.inactive_count <= soft,
                }
            )
    return rows


@workflow(name="experiment_basic_cycles", version=1)
def experiment_basic_cycles(spec: ExperimentSpec) -> List[Row]:
    """基本圈数实验：只提升基圈 C_h 的 H1，与 H_n 和 2 ln n 对比"""
    rows: List[Row] = []
    for n in spec.n_values:
        jobs = [(spec.cycle_length, n, trial_seed(spec.base_seed, i)) for i in range(spec.trials)]
        counts = np.array(_fan_out(_cycle_count_job, jobs, spec.workers))
        two_ln = 2 * math.log(n)
        rows.append(
            {
                "n": n,
                "trials": spec.trials,
                "mean": round(float(counts.mean()), 6),
                "median": round(float(np.median(counts)), 6),
                "p99": round(float(np.quantile(counts, 0.99)), 6),
                "maximum": int(counts.max()),
                "harmonic": round(harmonic_number(n), 6),
                "two_ln_n": round(two_ln, 6),
                "frac_above_2ln": round(float(np.mean(counts > two_ln)), 6),
            }
        )
    return rows


EXPERIMENTS: Dict[ExperimentKind, Callable[[ExperimentSpec], List[Row]]] = {
    ExperimentKind.SUCCESS: experiment_success_rate,
    ExperimentKind.DEACTIVATION: experiment_deactivation,
    ExperimentKind.BASIC_CYCLES: experiment_basic_cycles,
}


def run_experiment(spec: ExperimentSpec) -> List[Row]:
    return EXPERIMENTS[spec.kind](spec)


def rows_to_csv(kind: ExperimentKind, rows: List[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=EXPERIMENT_COLUMNS[kind], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(kind: ExperimentKind, rows: List[Row], filename: Optional[str] = None) -> str:
    """
    写出 CSV

    Returns:
        str: 文件路径，默认位于 OUTPUT_DIR
    """
    if filename is None:
        settings.ensure_output_dirs()
        filename = f"{settings.OUTPUT_DIR}/experiment_{kind.value}.csv"
    with open(filename, "w", encoding="utf-8", newline="") as f:
        f.write(rows_to_csv(kind, rows))
    return filename
