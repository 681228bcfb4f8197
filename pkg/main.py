"""
命令行入口
子命令：validate、solve、verify、altpath、permstats、experiment、generate、view
结构性输入错误（算例格式、假设不满足）返回退出码 2
"""

import argparse
import csv
import sys
from typing import Dict, List, Optional

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from traceloop.sdk import Traceloop

import display_report
from constants import PERMSTATS_COLUMNS
from experiment import rows_to_csv, run_experiment, write_csv
from lift_graph.base_graph import dump_instance, load_instance, random_instance, validate
from lift_graph.alternating import find_alternating_path
from lift_graph.errors import HypothesisError, InstanceFormatError, LemmaViolation, RotationError
from lift_graph.oracle import cycle_count_stats, load_edge_list, verify_hamilton_cycle
from models import ExperimentKind, ExperimentSpec, Thresholds
from settings import settings
from trial_session import TrialSession, export_report, read_cycle, write_cycle, write_metrics_csv

console = Console()


def init_tracing() -> None:
    """配置了 API Key 时才初始化 Traceloop 导出"""
    if settings.TRACELOOP_API_KEY:
        Traceloop.init(app_name="lift-hamilton", api_key=settings.TRACELOOP_API_KEY, disable_batch=True)


def parse_overrides(pairs: Optional[List[str]]) -> Dict[str, int]:
    """把 KEY=VAL 列表解析为阈值覆盖"""
    overrides: Dict[str, int] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise InstanceFormatError(f"阈值覆盖格式应为 KEY=VAL: {pair}")
        try:
            overrides[key.strip()] = int(value)
        except ValueError as e:
            raise InstanceFormatError(f"阈值 {key} 的值不是整数: {value}") from e
    return overrides


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    report = validate(inst, allow_min_degree=args.allow_min_degree)
    table = Table(show_header=True, header_style="bold")
    table.add_column("条件")
    table.add_column("结果")
    table.add_row(
        f"最小度 ≥ {report.required_min_degree}",
        f"{'通过' if report.min_degree_ok else '失败'} (δ = {report.min_degree})",
    )
    table.add_row("H1、H2 为边不交的哈密顿圈", "通过" if report.hamilton_ok else f"失败: {report.hamilton_detail}")
    table.add_row("H1 ∪ H2 非二部", "通过" if report.non_bipartite_ok else "失败")
    color = "green" if report.passed else "red"
    console.print(Panel(table, title=f"算例 {inst.name} (k = {inst.k})", border_style=color))
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    report = validate(inst, allow_min_degree=args.allow_min_degree)
    if not report.passed:
        raise HypothesisError(f"算例 {inst.name} 不满足假设: {report.model_dump_json()}")
    overrides = parse_overrides(args.thresholds)
    if args.max_restarts is not None:
        overrides["max_restarts"] = args.max_restarts
    thresholds = Thresholds.for_size(args.n, overrides)

    session = TrialSession(inst, args.n, thresholds, args.seed)
    result = session.run()

    if args.emit_cycle and result.cycle:
        write_cycle(result, args.emit_cycle)
    if args.emit_metrics:
        write_metrics_csv([result], args.emit_metrics)
    if args.emit_lift:
        with open(args.emit_lift, "w", encoding="utf-8") as f:
            f.write(session.state.lift.dump_edge_list())
    if args.emit_dot:
        try:
            dot = session.state.lift.dump_dot()
        except ValueError as e:
            console.print(f"[yellow]跳过 DOT 导出：{e}[/yellow]")
        else:
            with open(args.emit_dot, "w", encoding="utf-8") as f:
                f.write(dot)
    if args.export:
        console.print(f"[green]报告已导出：{export_report(result)}[/green]")

    color = "green" if result.verified else "red"
    console.print(
        Panel(
            f"结果: {result.outcome.value}\n"
            f"揭示边数: {result.metrics.reveals}，|D| = {result.metrics.inactive_count}\n"
            f"重启次数: {result.metrics.restarts}，初始基本圈数: {result.metrics.basic_cycles_initial}",
            title=f"{inst.name} n = {args.n} seed = {args.seed}",
            border_style=color,
        )
    )
    return 0


def cmd_verify(args) -> int:
    graph = load_edge_list(args.lift)
    result = verify_hamilton_cycle(graph, read_cycle(args.cycle))
    if result.ok:
        console.print("[green]哈密顿圈验证通过[/green]")
        return 0
    console.print(f"[red]验证失败（位置 {result.position}）：{result.reason}[/red]")
    return 1


def cmd_altpath(args) -> int:
    inst = load_instance(args.instance)
    try:
        path = find_alternating_path(inst, args.source, args.target, reverse=args.reverse)
    except LemmaViolation as e:
        console.print(f"[red]{e}[/red]")
        return 1
    console.print(" ".join(f"{s.tail}-{s.head}[{s.tag.value}]" for s in path.steps))
    console.print(f"[blue]长度 {path.length}[/blue]")
    return 0


def cmd_permstats(args) -> int:
    stats = cycle_count_stats(args.n, args.trials, args.seed)
    data = stats.model_dump()
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=PERMSTATS_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerow({key: data[key] for key in PERMSTATS_COLUMNS})
    finally:
        if args.output:
            out.close()
    return 0


def cmd_experiment(args) -> int:
    kind = ExperimentKind(args.kind)
    if kind != ExperimentKind.BASIC_CYCLES and not args.instance:
        raise InstanceFormatError(f"{kind.value} 实验需要 --instance")
    spec = ExperimentSpec(
        kind=kind,
        instance=args.instance or "",
        cycle_length=args.cycle_length,
        n_values=args.n,
        trials=args.trials,
        base_seed=args.seed,
        thresholds=parse_overrides(args.thresholds),
        max_restarts=args.max_restarts,
        allow_min_degree=args.allow_min_degree,
        output=args.output,
        workers=args.workers,
        record_timings=args.record_timings,
    )
    rows = run_experiment(spec)
    if spec.output:
        console.print(f"[green]结果已写入：{write_csv(kind, rows, spec.output)}[/green]")
    else:
        sys.stdout.write(rows_to_csv(kind, rows))
    return 0


def cmd_generate(args) -> int:
    inst = random_instance(args.k, np.random.default_rng(args.seed))
    text = dump_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_view(args) -> int:
    display_report.main(args.file or "")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="随机提升图哈密顿圈搜索")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="检查算例是否满足假设")
    p.add_argument("--instance", required=True, help="算例文件")
    p.add_argument("--allow-min-degree", type=int, default=None, help="覆盖最小度要求")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="在随机 n-提升上运行一次试验")
    p.add_argument("--instance", required=True, help="算例文件")
    p.add_argument("--n", type=int, required=True, help="纤维大小")
    p.add_argument("--seed", type=int, default=0, help="随机种子（默认：0）")
    p.add_argument("--thresholds", nargs="*", metavar="KEY=VAL", help="阈值覆盖")
    p.add_argument("--max-restarts", type=int, default=None, help="重启上限")
    p.add_argument("--allow-min-degree", type=int, default=None, help="覆盖最小度要求")
    p.add_argument("--emit-cycle", help="哈密顿圈输出文件，每行 `base fiber`")
    p.add_argument("--emit-metrics", help="度量 CSV 输出文件")
    p.add_argument("--emit-lift", help="已揭示提升边输出文件，每行 `u i v j`")
    p.add_argument("--emit-dot", help="已揭示提升图的 DOT 文件（仅限小规模）")
    p.add_argument("--export", action="store_true", help="把完整报告导出为 JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="独立验证哈密顿圈")
    p.add_argument("--cycle", required=True, help="圈文件")
    p.add_argument("--lift", required=True, help="提升边列表文件")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("altpath", help="输出基图上的 H2 H̄1 交错路径")
    p.add_argument("--instance", required=True, help="算例文件")
    p.add_argument("--from", dest="source", type=int, required=True, help="起点")
    p.add_argument("--to", dest="target", type=int, required=True, help="终点")
    p.add_argument("--reverse", action="store_true", help="使用 H1 的反向")
    p.set_defaults(func=cmd_altpath)

    p = sub.add_parser("permstats", help="随机排列圈数统计")
    p.add_argument("--n", type=int, required=True, help="排列大小")
    p.add_argument("--trials", type=int, required=True, help="样本数")
    p.add_argument("--seed", type=int, default=0, help="随机种子（默认：0）")
    p.add_argument("--output", help="CSV 输出文件，默认打印到标准输出")
    p.set_defaults(func=cmd_permstats)

    p = sub.add_parser("experiment", help="批量实验")
    p.add_argument("--kind", choices=[k.value for k in ExperimentKind], default=ExperimentKind.SUCCESS.value)
    p.add_argument("--instance", help="算例文件（basic-cycles 实验不需要）")
    p.add_argument("--cycle-length", type=int, default=5, help="basic-cycles 实验的基圈长度（默认：5）")
    p.add_argument("--n", type=int, nargs="+", required=True, help="纤维大小列表")
    p.add_argument("--trials", type=int, default=10, help="每个 n 的试验数（默认：10）")
    p.add_argument("--seed", type=int, default=0, help="基础种子（默认：0）")
    p.add_argument("--thresholds", nargs="*", metavar="KEY=VAL", help="阈值覆盖")
    p.add_argument("--max-restarts", type=int, default=None, help="重启上限")
    p.add_argument("--allow-min-degree", type=int, default=None, help="覆盖最小度要求")
    p.add_argument("--workers", type=int, default=settings.DEFAULT_WORKERS, help="并行进程数")
    p.add_argument("--record-timings", action="store_true", help="记录各阶段耗时（结果不再逐字节可复现）")
    p.add_argument("--output", help="CSV 输出文件，默认打印到标准输出")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("generate", help="生成随机合法算例")
    p.add_argument("--k", type=int, required=True, help="基图顶点数（至少 6）")
    p.add_argument("--seed", type=int, default=0, help="随机种子（默认：0）")
    p.add_argument("--output", help="输出文件，默认打印到标准输出")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("view", help="查看导出的试验报告")
    p.add_argument("--file", help="报告路径，不指定则显示选择菜单")
    p.set_defaults(func=cmd_view)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    主函数

    Returns:
        int: 退出码，0 完成，2 结构性输入错误
    """
    args = build_parser().parse_args(argv)
    init_tracing()
    try:
        return args.func(args)
    except (InstanceFormatError, HypothesisError) as e:
        console.print(f"[red]输入错误：{e}[/red]")
        return 2
    except ValueError as e:
        if isinstance(e, RotationError):
            raise
        # 阈值覆盖或实验描述不合法
        console.print(f"[red]参数错误：{e}[/red]")
        return 2


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        console.print("\n\n[red]用户中断程序[/red]")
        sys.exit(0)
