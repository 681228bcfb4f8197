import numpy as np
import pytest

from lift_graph.errors import InvariantViolation, PhaseRestart
from lift_graph.lift import LiftState
from lift_graph.oracle import is_valid_lift_cycle, is_valid_lift_path
from lift_graph.rotation import RotationPath
from models import LiftVertex, SearchPhase, Thresholds
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
from phases.adjusting import majority_orientation, section_bounds
from phases.explorer import EndExplorer, ExploreStatus
from phases.multiply_ends import reconstruct_pair_path


def make_state(inst, n, seed=0, overrides=None) -> SearchState:
    lift = LiftState.from_instance(inst, n, np.random.default_rng(seed))
    return SearchState(inst=inst, lift=lift, thresholds=Thresholds.for_size(n, overrides))


def explorer_on_basic_cycle(inst, n, seed, hook=None):
    lift = LiftState.from_instance(inst, n, np.random.default_rng(seed))
    path = RotationPath(max(lift.lift_h1(), key=len))
    charges = []
    explorer = EndExplorer(lift, path, charges.append, hook or (lambda p, w: False))
    return lift, explorer, charges


class TestEndExplorer:
    @pytest.mark.parametrize("seed", range(8))
    def test_found_ends_are_reachable(self, k7, seed):
        lift, explorer, charges = explorer_on_basic_cycle(k7, 2, seed)
        root = list(explorer.root_snapshot.verts)
        for _ in range(500):
            if explorer.step() == ExploreStatus.EXHAUSTED:
                break
        assert explorer.path.is_valid(lift)
        for end in explorer.found:
            path = explorer.path_to(end)
            assert path.end == end
            assert path.start == root[0]
            assert set(path.verts) == set(root)
            assert path.is_valid(lift)
        assert charges.count("rotate") == explorer.rotations

    @pytest.mark.parametrize("seed", range(8))
    def test_walk_ends_visits_each_end_once(self, k7, seed):
        lift, explorer, _ = explorer_on_basic_cycle(k7, 2, seed)
        while explorer.step() != ExploreStatus.EXHAUSTED:
            pass
        seen = []
        for end, live in explorer.walk_ends():
            assert live.end == end
            seen.append(end)
        assert sorted(seen) == sorted(explorer.found)
        assert explorer.path.verts == explorer.root_snapshot.verts

    def test_goto_root(self, k7):
        _, explorer, _ = explorer_on_basic_cycle(k7, 3, 11)
        for _ in range(30):
            explorer.step()
        explorer.goto_root()
        assert explorer.path.verts == explorer.root_snapshot.verts
        assert explorer.current is explorer.root

    def test_hook_triggers_jump(self, k7):
        _, explorer, _ = explorer_on_basic_cycle(k7, 4, 0, hook=lambda p, w: True)
        assert explorer.step() == ExploreStatus.JUMP
        assert explorer.hit is not None
        assert explorer.hit in explorer.lift.revealed_neighbors(explorer.path.end)


def test_section_bounds_on_forward_run(k7):
    path = RotationPath(LiftVertex(p % 7, p) for p in range(42))
    assert majority_orientation(path, k7) is False
    assert section_bounds(path, k7, reverse=False) == [41, 34, 27, 20, 13, 6]
    assert section_bounds(RotationPath(path.verts[:35]), k7, reverse=False) is None


def test_majority_orientation_of_reversed_run(k7):
    path = RotationPath(LiftVertex(p % 7, p) for p in range(20)).reverse()
    assert majority_orientation(path, k7) is True
    assert majority_orientation(RotationPath([LiftVertex(0, 0), LiftVertex(3, 0)]), k7) is None


def test_cycle_orders():
    cycle = [LiftVertex(i, 0) for i in range(4)]
    orders = Phase.cycle_orders(cycle, 1)
    assert [v.base for v in orders["forward"]] == [1, 2, 3, 0]
    assert [v.base for v in orders["backward"]] == [1, 0, 3, 2]


def test_charge_raises_restart(k7):
    state = make_state(k7, 10, overrides={"rotation_budget": 2})
    phase = CycleMergePhase()
    phase.charge(state)
    phase.charge(state, "rotate")
    assert state.metrics.rotations == 1
    with pytest.raises(PhaseRestart) as info:
        phase.charge(state)
    assert info.value.phase == SearchPhase.CYCLE_MERGE
    assert "预算" in info.value.reason


class TestCycleLift:
    def test_single_fiber_is_done(self, k7):
        state = make_state(k7, 1)
        result = CycleLiftPhase().execute(state)
        assert result.next_phase == SearchPhase.DONE
        assert len(state.hamilton_cycle) == 7

    def test_partition_after_lift(self, k7):
        state = make_state(k7, 60, seed=4)
        result = CycleLiftPhase().execute(state)
        state.check_partition()
        assert state.metrics.basic_cycles_initial == len(state.remaining) + 1
        assert len(state.cycle) == max([len(state.cycle)] + [len(c) for c in state.remaining.values()])
        if state.remaining:
            assert result.next_phase == SearchPhase.CYCLE_MERGE

    def test_merge_builds_path_over_both_cycles(self, k7):
        for seed in range(20):
            state = make_state(k7, 60, seed=seed)
            CycleLiftPhase().execute(state)
            if not state.remaining:
                continue
            before = len(state.cycle) + state.remaining_mass()
            try:
                result = CycleMergePhase().execute(state)
            except PhaseRestart:
                continue
            assert result.next_phase == SearchPhase.CLONING
            assert state.cycle is None
            assert state.path.is_valid(state.lift)
            assert len(state.path) + state.remaining_mass() == before
            state.check_partition()
            return
        pytest.fail("没有种子完成圈合并")


def test_partition_check_detects_overlap(k7):
    state = make_state(k7, 5)
    CycleLiftPhase().execute(state)
    if not state.remaining:
        state.cycle = state.cycle[:-1]
    else:
        cid = next(iter(state.remaining))
        state.remaining[cid] = state.remaining[cid] + [state.cycle[0]]
    with pytest.raises(InvariantViolation):
        state.check_partition()


# ==================== 阶段3 至 7 ====================

FIBER0 = [LiftVertex(b, 0) for b in range(7)]

# 压低克隆数与端点集规模，让小规模提升也能走到阶段6、7
SMALL_SEARCH = {"clone_count": 3, "endset_target": 30, "adjusted_target": 2}


def all_phases():
    return {
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


def drive_to(state: SearchState, stop: SearchPhase) -> bool:
    """从阶段1 开始依次执行，直到下一个阶段为 stop；中途重启或完成时返回 False"""
    phases = all_phases()
    current = SearchPhase.CYCLE_LIFT
    while current not in (stop, SearchPhase.DONE):
        state.budget_used = 0
        try:
            current = phases[current].execute(state).next_phase
        except PhaseRestart:
            return False
    return current == stop


def states_at(inst, n, stop, seeds, overrides=None):
    for seed in seeds:
        state = make_state(inst, n, seed, overrides)
        if drive_to(state, stop):
            yield state


def complete_state(lift) -> SearchState:
    return SearchState(inst=None, lift=lift, thresholds=Thresholds.for_size(lift.n))


def assert_link_is_sound(state: SearchState):
    end, hit = state.link
    assert end == state.path.end
    assert state.lift.is_edge_revealed(end, hit)
    assert hit in state.cycle_of
    assert state.path.is_valid(state.lift)
    state.check_partition()


class TestPathMerge:
    def test_absorbs_whole_cycle(self, k7, complete_lift):
        state = SearchState(inst=k7, lift=complete_lift, thresholds=Thresholds.for_size(1))
        state.path = RotationPath(FIBER0[:4])
        state.set_remaining([FIBER0[4:]])
        state.link = (FIBER0[3], FIBER0[5])
        result = PathMergePhase().execute(state)
        assert result.next_phase == SearchPhase.CLONING
        assert len(state.path) == 7
        assert state.path.verts[:5] == FIBER0[:4] + [FIBER0[5]]
        assert state.path.is_valid(complete_lift)
        assert not state.remaining and not state.cycle_of
        assert state.link is None
        assert state.metrics.phase3_invocations == 1
        state.check_partition()

    def test_link_must_start_at_path_end(self, k7, complete_lift):
        state = SearchState(inst=k7, lift=complete_lift, thresholds=Thresholds.for_size(1))
        state.path = RotationPath(FIBER0[:4])
        state.set_remaining([FIBER0[4:]])
        state.link = (FIBER0[2], FIBER0[5])
        with pytest.raises(InvariantViolation):
            PathMergePhase().execute(state)

    def test_link_must_hit_remaining_cycle(self, k7, complete_lift):
        state = SearchState(inst=k7, lift=complete_lift, thresholds=Thresholds.for_size(1))
        state.path = RotationPath(FIBER0[:6])
        state.set_remaining([])
        state.link = (FIBER0[5], FIBER0[6])
        with pytest.raises(InvariantViolation):
            PathMergePhase().execute(state)


class TestCloning:
    def test_complete_lift_clones(self, k7, complete_lift):
        state = SearchState(inst=k7, lift=complete_lift, thresholds=Thresholds.for_size(1))
        state.path = RotationPath(FIBER0)
        result = CloningPhase().execute(state)
        assert result.next_phase == SearchPhase.MULTIPLY_ENDS
        assert state.clones
        for clone in state.clones:
            assert set(clone.verts) == set(FIBER0)
            assert clone.is_valid(complete_lift)
            assert clone.start != clone.end

    def test_either_branch_keeps_invariants(self, k7):
        checked = 0
        for state in states_at(k7, 30, SearchPhase.CLONING, range(12)):
            span = set(state.path.verts)
            try:
                result = CloningPhase().execute(state)
            except PhaseRestart:
                continue
            checked += 1
            if result.next_phase == SearchPhase.PATH_MERGE:
                assert_link_is_sound(state)
                continue
            assert result.next_phase == SearchPhase.MULTIPLY_ENDS
            ends = [v for clone in state.clones for v in (clone.start, clone.end)]
            assert len(set(ends)) == len(ends)
            for clone in state.clones:
                assert set(clone.verts) == span
                assert clone.is_valid(state.lift)
                assert state.lift.is_active(clone.start) and state.lift.is_active(clone.end)
        assert checked > 0


class TestMultiplyEnds:
    def test_closing_edge_at_split(self, k7, complete_lift):
        state = SearchState(inst=k7, lift=complete_lift, thresholds=Thresholds.for_size(1))
        state.clones = [RotationPath(FIBER0)]
        result = MultiplyEndsPhase().execute(state)
        assert result.next_phase == SearchPhase.DONE
        assert state.hamilton_cycle == FIBER0
        assert is_valid_lift_cycle(complete_lift, state.cycle)
        assert state.clones == []

    def test_outcomes_keep_invariants(self, k7):
        seen = set()
        for state in states_at(k7, 60, SearchPhase.MULTIPLY_ENDS, range(10), SMALL_SEARCH):
            span = set(state.clones[0].verts)
            try:
                result = MultiplyEndsPhase().execute(state)
            except PhaseRestart:
                continue
            seen.add(result.next_phase)
            if result.next_phase == SearchPhase.PATH_MERGE:
                assert_link_is_sound(state)
            elif result.next_phase == SearchPhase.ADJUSTING:
                a, b = state.half_a, state.half_b
                assert set(a.root_snapshot.verts) | set(b.root_snapshot.verts) == span
                assert len(a.found) >= 2 and len(b.found) >= 2
            else:
                assert is_valid_lift_cycle(state.lift, state.cycle)
                state.check_partition()
        assert seen

    def test_pair_paths_from_rotation_history(self, k7):
        checked = 0
        for state in states_at(k7, 60, SearchPhase.ADJUSTING, range(30), SMALL_SEARCH):
            a, b = state.half_a, state.half_b
            first_half = set(a.root_snapshot.verts)
            span = first_half | set(b.root_snapshot.verts)
            assert state.lift.is_edge_revealed(a.start, b.start)
            xs, ys = list(a.found), list(b.found)
            for x in xs[:4] + xs[-4:]:
                for y in ys[:4] + ys[-4:]:
                    pxy = reconstruct_pair_path(a, b, x, y)
                    assert pxy.start == x and pxy.end == y
                    assert set(pxy.verts[: len(first_half)]) == first_half
                    assert set(pxy.verts) == span
                    assert is_valid_lift_path(state.lift, pxy.verts)
            checked += 1
            if checked == 3:
                return
        assert checked > 0, "没有种子到达阶段6"


class TestAdjusting:
    def test_end_already_in_target_fiber(self, k7):
        state = make_state(k7, 10)
        path = RotationPath(max(state.lift.lift_h1(), key=len))
        reveals = state.lift.reveal_count
        assert AdjustingPhase().adjust(state, path, path.end.base) is path
        assert state.lift.reveal_count == reveals

    def test_target_edge_prefers_extra_edge(self, circulant9):
        state = make_state(circulant9, 4)
        x, y = AdjustingPhase().target_edge(state)
        assert (x, y) == (0, 4)
        assert (x, y) not in set(circulant9.h1_edges()) | set(circulant9.h2_edges())
        assert not state.metrics.fallback_target_edge

    def test_target_edge_falls_back_to_h2(self, bipartite8):
        state = make_state(bipartite8, 4)
        edge = AdjustingPhase().target_edge(state)
        assert edge == sorted(bipartite8.h2_edges())[0]
        assert state.metrics.fallback_target_edge

    def test_survivors_end_in_target_fibers_and_close(self, k7):
        closed = 0
        for state in states_at(k7, 60, SearchPhase.ADJUSTING, range(80), SMALL_SEARCH):
            a_root = state.half_a.root_snapshot.copy()
            b_root = state.half_b.root_snapshot.copy()
            try:
                result = AdjustingPhase().execute(state)
            except PhaseRestart:
                continue
            if result.next_phase == SearchPhase.PATH_MERGE:
                assert_link_is_sound(state)
                continue
            assert result.next_phase == SearchPhase.CLOSING
            x, y = state.target_edge
            for survivors, root, fiber in ((state.adjusted_a, a_root, x), (state.adjusted_b, b_root, y)):
                assert len(survivors) >= 2
                for end, path in survivors.items():
                    assert path.end == end and end.base == fiber
                    assert path.start == root.start
                    assert set(path.verts) == set(root.verts)
                    assert path.is_valid(state.lift)
            try:
                result = ClosingPhase().execute(state)
            except PhaseRestart:
                continue
            assert result.next_phase in (SearchPhase.CYCLE_MERGE, SearchPhase.DONE)
            assert len(state.cycle) == len(a_root) + len(b_root)
            assert is_valid_lift_cycle(state.lift, state.cycle)
            state.check_partition()
            closed += 1
            if closed == 2:
                return
        assert closed > 0, "没有种子完成阶段7"


class TestClosing:
    def test_closes_into_hamilton_cycle(self, complete_lift):
        state = complete_state(complete_lift)
        state.target_edge = (0, 6)
        state.adjusted_a = {FIBER0[0]: RotationPath(FIBER0[3::-1])}
        state.adjusted_b = {FIBER0[6]: RotationPath(FIBER0[4:])}
        result = ClosingPhase().execute(state)
        assert result.next_phase == SearchPhase.DONE
        assert state.hamilton_cycle == FIBER0
        assert state.adjusted_a == {} and state.adjusted_b == {}

    def test_partial_cycle_returns_to_merge(self, complete_lift):
        state = complete_state(complete_lift)
        state.set_remaining([FIBER0[5:]])
        state.target_edge = (0, 4)
        state.adjusted_a = {FIBER0[0]: RotationPath(FIBER0[2::-1])}
        state.adjusted_b = {FIBER0[4]: RotationPath(FIBER0[3:5])}
        result = ClosingPhase().execute(state)
        assert result.next_phase == SearchPhase.CYCLE_MERGE
        assert state.cycle == FIBER0[:5]
        assert is_valid_lift_cycle(complete_lift, state.cycle)
        assert state.hamilton_cycle is None

    def test_no_matching_edge_restarts(self, k7):
        lift = LiftState.from_instance(k7, 2, np.random.default_rng(3))
        lift.finalize()
        state = complete_state(lift)
        u = LiftVertex(0, 0)
        partner = lift.neighbor(u, 6)
        other = LiftVertex(6, 1 - partner.fiber_idx)
        state.target_edge = (0, 6)
        state.adjusted_a = {u: RotationPath([u])}
        state.adjusted_b = {other: RotationPath([other])}
        with pytest.raises(PhaseRestart) as e:
            ClosingPhase().execute(state)
        assert e.value.phase == SearchPhase.CLOSING

    def test_reveals_from_both_sides_before_restart(self, k7):
        # S'1 一侧没有命中时，S'2 一侧的端点也要揭示
        lift = LiftState.from_instance(k7, 3, np.random.default_rng(5))
        state = complete_state(lift)
        u, w = LiftVertex(0, 0), LiftVertex(6, 0)
        v = lift.reveal_neighbor(u, 6)
        if v == w:
            w = LiftVertex(6, 1)
        state.target_edge = (0, 6)
        state.adjusted_a = {u: RotationPath([u])}
        state.adjusted_b = {w: RotationPath([w])}
        with pytest.raises(PhaseRestart):
            ClosingPhase().execute(state)
        assert lift.neighbor(w, 0) is not None


class TestActivityCounter:
    def test_counts_inactive_vertices_on_remaining_cycles(self, k7):
        for seed in range(20):
            state = make_state(k7, 4, seed)
            cycles = state.lift.lift_h1()
            if len(cycles) >= 2:
                break
        else:
            pytest.fail("没有种子给出两个以上基本圈")
        state.path = RotationPath(cycles[0])
        state.set_remaining(cycles[1:])
        assert state.outside_inactive_count() == 0

        v = state.path.start
        g1_base = state.lift.g1_adj[v.base][0]
        w = state.lift.reveal_neighbor(v, g1_base)
        # 路径上的失活顶点不计入
        assert not state.lift.is_active(v)
        assert state.outside_inactive_count() == (1 if w in state.cycle_of else 0)

        u = next(iter(state.cycle_of))
        state.lift.reveal_all_g1_neighbors(u)
        expected = sum(1 for x in state.lift.inactive if x not in state.path)
        assert expected >= 1
        assert state.outside_inactive_count() == expected

        for cid in list(state.remaining):
            state.absorb(cid)
        assert state.outside_inactive_count() == 0
