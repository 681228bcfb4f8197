import json

import pytest

from constants import SOLVE_METRICS_COLUMNS
from lift_graph.errors import HypothesisError
from lift_graph.oracle import explicit_lift, is_hamiltonian_bruteforce, verify_hamilton_cycle
from models import SearchPhase, Thresholds, TrialOutcome
from settings import settings
from trial_session import (
    PHASE_TRANSITION_GRAPH,
    TrialSession,
    export_report,
    read_cycle,
    report_to_json,
    run,
    write_cycle,
    write_metrics_csv,
)

# 压低克隆数与端点集规模，让 n = 60 的试验也走到阶段6、7
SMALL_SEARCH = {"clone_count": 3, "endset_target": 60, "adjusted_target": 2}


def assert_structurally_sound(report, inst, n):
    assert report.metrics.restarts == len(report.restart_reasons)
    assert report.metrics.restarts <= report.thresholds.max_restarts + 1
    assert report.metrics.inactive_count <= inst.k * n
    for t in report.transitions:
        assert t.to_phase in PHASE_TRANSITION_GRAPH[t.from_phase]
    if report.outcome == TrialOutcome.HAMILTON:
        assert report.verified
        assert len(report.cycle) == inst.k * n
        assert len(set(report.cycle)) == inst.k * n
        assert report.transitions[-1].to_phase == SearchPhase.DONE
        assert report.metrics.cycles_absorbed == report.metrics.basic_cycles_initial - 1
    else:
        assert not report.verified
        assert report.cycle is None
        assert len(report.restart_reasons) == report.thresholds.max_restarts + 1


def test_single_fiber_succeeds_immediately(k7):
    report = run(k7, 1, seed=3)
    assert report.outcome == TrialOutcome.HAMILTON
    assert report.verified
    assert [(t.from_phase, t.to_phase) for t in report.transitions] == [(SearchPhase.CYCLE_LIFT, SearchPhase.DONE)]
    assert report.metrics.basic_cycles_initial == 1


def test_hypothesis_is_enforced(k5):
    with pytest.raises(HypothesisError):
        run(k5, 3)
    report = run(k5, 1, allow_min_degree=4)
    assert report.verified


@pytest.mark.parametrize("seed", range(6))
def test_trials_are_structurally_sound(k7, seed):
    report = run(k7, 60, seed=seed)
    assert_structurally_sound(report, k7, 60)


def test_adjusting_and_closing_are_reached(k7):
    thresholds = Thresholds.for_size(60, SMALL_SEARCH)
    wanted = {
        (SearchPhase.MULTIPLY_ENDS, SearchPhase.ADJUSTING),
        (SearchPhase.ADJUSTING, SearchPhase.CLOSING),
    }
    moves = set()
    for seed in range(60):
        report = TrialSession(k7, 60, thresholds, seed=seed).run()
        assert_structurally_sound(report, k7, 60)
        moves |= {(t.from_phase, t.to_phase) for t in report.transitions}
        if wanted <= moves and any(src == SearchPhase.CLOSING for src, _ in moves):
            return
    assert wanted <= moves
    assert any(src == SearchPhase.CLOSING for src, _ in moves), "阶段7 从未闭合"


def test_trials_succeed_with_any_pair_closure(k7, monkeypatch):
    monkeypatch.setattr(settings, "PHASE5_CLOSE_ANY_PAIR", True)
    reports = [run(k7, 300, seed=s) for s in range(6)]
    for report in reports:
        assert_structurally_sound(report, k7, 300)
    assert sum(r.outcome == TrialOutcome.HAMILTON for r in reports) >= 4


@pytest.mark.parametrize("seed", range(4))
def test_circulant_trials(circulant9, seed):
    report = run(circulant9, 40, seed=seed)
    assert_structurally_sound(report, circulant9, 40)


def test_exhausted_budget_reports_failure(k7):
    thresholds = Thresholds.for_size(100, {"rotation_budget": 1, "max_restarts": 1})
    report = TrialSession(k7, 100, thresholds, seed=5).run()
    assert_structurally_sound(report, k7, 100)
    if report.outcome == TrialOutcome.FAILURE:
        assert report.metrics.restarts == 2


def test_same_seed_same_report(k7, monkeypatch):
    monkeypatch.setattr(settings, "RECORD_TIMINGS", False)
    first = run(k7, 80, seed=42)
    second = run(k7, 80, seed=42)
    assert report_to_json(first) == report_to_json(second)
    assert "phase_micros" not in json.loads(report_to_json(first))["metrics"]


def test_timings_are_recorded(k7, monkeypatch):
    monkeypatch.setattr(settings, "RECORD_TIMINGS", True)
    report = run(k7, 30, seed=1)
    assert SearchPhase.CYCLE_LIFT.value in report.metrics.phase_micros
    assert report.deterministic_dump() == run(k7, 30, seed=1).deterministic_dump()


def test_debug_mode_validates_paths(k7, monkeypatch):
    monkeypatch.setattr(settings, "ENABLE_DEBUG_MODE", True)
    report = run(k7, 40, seed=9)
    assert_structurally_sound(report, k7, 40)


def test_debug_mode_checks_pair_paths(k7, monkeypatch):
    monkeypatch.setattr(settings, "ENABLE_DEBUG_MODE", True)
    thresholds = Thresholds.for_size(60, SMALL_SEARCH)
    for seed in range(20):
        report = TrialSession(k7, 60, thresholds, seed=seed).run()
        assert_structurally_sound(report, k7, 60)
        if any(t.to_phase == SearchPhase.ADJUSTING for t in report.transitions):
            return
    pytest.fail("没有试验到达阶段6")


@pytest.mark.parametrize("seed", range(10))
def test_small_lift_agrees_with_bruteforce(k5, seed):
    session = TrialSession(k5, 3, seed=seed)
    report = session.run()
    if report.outcome != TrialOutcome.HAMILTON:
        return
    lift = session.state.lift
    lift.finalize()
    graph = explicit_lift(lift)
    assert verify_hamilton_cycle(graph, report.cycle).ok
    assert is_hamiltonian_bruteforce(graph)


class TestOutputs:
    def test_export_report(self, k7, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "EXPORT_DIR", str(tmp_path))
        report = run(k7, 1, seed=0)
        path = export_report(report)
        assert path.startswith(str(tmp_path))
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        assert data["outcome"] == "hamilton"
        assert data["instance_name"] == "k7"
        assert data["transitions"][0]["from_phase"] == "cycle_lift"

    def test_cycle_file(self, k7, tmp_path):
        report = run(k7, 1, seed=0)
        path = tmp_path / "cycle.txt"
        write_cycle(report, str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 7
        assert read_cycle(str(path)) == [list(p) for p in report.cycle]

    def test_metrics_csv_header(self, k7, tmp_path):
        reports = [run(k7, 1, seed=s) for s in range(3)]
        path = tmp_path / "metrics.csv"
        write_metrics_csv(reports, str(path))
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].split(",") == SOLVE_METRICS_COLUMNS
        assert len(lines) == 4
        assert lines[1].startswith("0,hamilton,1,")


@pytest.mark.slow
@pytest.mark.parametrize("n", [100, 1000])
def test_every_reported_cycle_verifies(k7, n):
    for seed in range(200):
        report = run(k7, n, seed=seed)
        assert_structurally_sound(report, k7, n)


@pytest.mark.slow
def test_success_fraction_at_scale(k7):
    small = [run(k7, 100, seed=s).outcome == TrialOutcome.HAMILTON for s in range(50)]
    large = [run(k7, 1000, seed=s).outcome == TrialOutcome.HAMILTON for s in range(50)]
    assert sum(large) / 50 >= 0.9
    assert sum(large) / 50 >= sum(small) / 50 - 0.1
