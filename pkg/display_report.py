import argparse
import json
import os
from typing import List

import inquirer
from rich.console import Console, Group
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table

from constants import PHASE_DESCRIPTIONS
from models import SearchPhase
from settings import settings

console = Console()

# 圈预览最多显示的顶点数
CYCLE_PREVIEW = 24


def get_report_files() -> List[str]:
    """获取导出目录下的所有试验报告"""
    base_path = os.path.abspath(settings.EXPORT_DIR)
    if not os.path.exists(base_path):
        console.print(f"[red]错误：导出目录 {base_path} 不存在[/red]")
        return []
    try:
        files = os.listdir(base_path)
        json_files = [f for f in files if f.endswith(".json")]
        return sorted(json_files, reverse=True)  # 按时间倒序排列
    except OSError as e:
        console.print(f"[red]读取目录时出错：{e}[/red]")
        return []


def phase_name(value: str) -> str:
    try:
        return PHASE_DESCRIPTIONS[SearchPhase(value)]["name"]
    except ValueError:
        return value


def display_overview(data: dict):
    outcome = data.get("outcome", "未知")
    color = "green" if outcome == "hamilton" else "red"
    thresholds = data.get("thresholds", {})
    threshold_str = ", ".join(f"{key}={value}" for key, value in thresholds.items())
    content_group = Group(
        f"[yellow][bold]算例[/bold][/yellow]: {data.get('instance_name') or '未命名'} (k = {data.get('k')})",
        f"[yellow][bold]纤维大小[/bold][/yellow]: n = {data.get('n')}，共 {data.get('k', 0) * data.get('n', 0)} 个顶点",
        f"[yellow][bold]种子[/bold][/yellow]: {data.get('seed')}",
        Rule(style="white"),
        f"[{color}][bold]结果[/bold]: {outcome}，独立验证: {'通过' if data.get('verified') else '未通过'}[/{color}]",
        f"[cyan][bold]阈值[/bold][/cyan]: \n{threshold_str}",
    )
    return Panel(content_group, title="试验概览", border_style="green")


def display_transitions(data: dict):
    """显示阶段跳转记录"""
    history = data.get("transitions", [])
    if not history:
        return "[red]没有找到阶段跳转记录[/red]"

    transitions = []
    attempt = None
    for item in history:
        if item.get("attempt") != attempt:
            attempt = item.get("attempt")
            transitions.append(Rule(title=f"第 {attempt} 次尝试", style="white"))
        transitions.append(
            f"[[bold]{phase_name(item['from_phase'])}[/bold] -> {phase_name(item['to_phase'])}] "
            f"揭示 {item.get('reveals', 0)}，|D| = {item.get('inactive_count', 0)}\n"
            f"{item.get('reason', '无')}\n"
        )
    restarts = data.get("restart_reasons", [])
    if restarts:
        transitions.append(Rule(title="重启原因", style="red"))
        transitions.extend(f"[red]{i}.[/red] {reason}" for i, reason in enumerate(restarts))
    return Panel(Group(*transitions), title="阶段跳转记录", border_style="#4720b3")


def display_metrics(data: dict):
    """度量表与各阶段耗时"""
    metrics = data.get("metrics", {})
    if not metrics:
        return "[red]没有找到度量信息[/red]"

    table = Table(show_header=True, header_style="bold")
    table.add_column("度量")
    table.add_column("值", justify="right")
    for key, value in metrics.items():
        if key == "phase_micros":
            continue
        table.add_row(key, str(value))

    timing = Table(show_header=True, header_style="bold")
    timing.add_column("阶段")
    timing.add_column("耗时 (ms)", justify="right")
    for key, micros in metrics.get("phase_micros", {}).items():
        timing.add_row(phase_name(key), f"{micros / 1000:.3f}")
    return Panel(Group(table, Rule(style="white"), timing), title="度量", border_style="cyan")


def display_cycle(data: dict):
    cycle = data.get("cycle")
    if not cycle:
        return "[yellow]没有哈密顿圈[/yellow]"
    preview = " -> ".join(f"{b}:{i}" for b, i in cycle[:CYCLE_PREVIEW])
    if len(cycle) > CYCLE_PREVIEW:
        preview += f" -> ... (共 {len(cycle)} 个顶点)"
    return Panel(preview, title="哈密顿圈", border_style="#b35220")


def display_report(file_path: str):
    if not os.path.exists(file_path):
        console.print(f"[red]错误：文件 {file_path} 不存在[/red]")
        return

    try:
        console.print("[blue]正在显示试验报告：[/blue] " + file_path)
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        console.print(display_overview(data))
        console.print(display_transitions(data))
        console.print(display_metrics(data))
        console.print(display_cycle(data))
    except (OSError, json.JSONDecodeError, KeyError) as e:
        console.print(f"[red]读取文件时出错：{e}[/red]")


def select_and_display_report() -> None:
    """显示报告选择菜单并展示选中的报告"""
    report_files = get_report_files()
    if not report_files:
        console.print("[yellow]没有找到任何试验报告[/yellow]")
        return

    questions = [
        inquirer.List(
            "report_file",
            message="请选择要查看的试验报告（使用上下键选择，回车确认）",
            choices=report_files,
            carousel=True,
        ),
    ]
    try:
        answers = inquirer.prompt(questions)
        if answers and answers["report_file"]:
            selected_file = answers["report_file"]
            file_path = os.path.join(os.path.abspath(settings.EXPORT_DIR), selected_file)
            console.print(f"\n[green]已选择：{selected_file}[/green]\n")
            display_report(file_path)
        else:
            console.print("[yellow]未选择任何文件[/yellow]")
    except KeyboardInterrupt:
        console.print("\n[yellow]操作已取消[/yellow]")


def main(file_path: str = None):
    """主函数"""
    console.print(Panel("试验报告查看器", subtitle="使用上下键选择报告", border_style="green"))
    if file_path is None:
        parser = argparse.ArgumentParser(description="哈密顿圈试验报告查看器")
        parser.add_argument(
            "--file",
            type=str,
            help="指定要查看的报告路径，如果不指定则显示选择菜单",
        )
        file_path = parser.parse_args().file
    if file_path:
        display_report(file_path)
    else:
        console.print("[blue]请选择要查看的试验报告：[/blue]")
        select_and_display_report()


if __name__ == "__main__":
    main()
