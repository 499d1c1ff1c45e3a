import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcips.duality import (
    MultiLineState,
    dual_points,
    had_dual_points,
    multiline_by_recursion,
    multiline_evolve,
    multiline_local_step,
    reverse_check,
    t_image_check,
    tasep_dual_points,
)
from mcips.dynamics import (
    DynamicsKind,
    PointProcess,
    evolve,
    generate_poisson,
    had_jump,
    tasep_jump,
)
from mcips.lattice import Configuration, Topology, sample_fixed_count
from mcips.queues import UnstableQueueError, departures

HAD, TASEP = DynamicsKind("had"), DynamicsKind("tasep")


def cfg(word, topo):
    return Configuration(topo, np.array(word, np.uint8))


def one_mark(topo, loc, kind="site", t=0.5):
    return PointProcess(topo, [loc], [t], (0.0, 1.0), kind)


def ring_lines(topo, counts, rng):
    return np.stack([sample_fixed_count(c, topo, rng).occupancy for c in counts])


class TestDualPoints:
    def test_had_summon(self):
        t = Topology.ring(5)
        traj = evolve(HAD, cfg([1, 0, 0, 0, 0], t), one_mark(t, 2, t=0.7))
        d = had_dual_points(traj)
        assert d.locations.tolist() == [0] and d.times.tolist() == [0.7]

    def test_had_null_jump(self):
        t = Topology.ring(5)
        traj = evolve(HAD, cfg([0, 0, 1, 0, 0], t), one_mark(t, 2))
        assert had_dual_points(traj).locations.tolist() == [2]
        assert len(had_dual_points(traj, include_null=False)) == 0

    def test_tasep_particle_right_of_bond(self):
        t = Topology.ring(5)
        traj = evolve(TASEP, cfg([0, 0, 1, 0, 0], t), one_mark(t, 2, "bond"))
        assert tasep_dual_points(traj).locations.tolist() == [2]

    def test_tasep_hole_right_of_bond(self):
        t = Topology.ring(5)
        traj = evolve(TASEP, cfg([0, 0, 0, 1, 0], t), one_mark(t, 2, "bond"))
        assert tasep_dual_points(traj).locations.tolist() == [3]

    def test_tasep_wraps_on_ring(self):
        t = Topology.ring(4)
        traj = evolve(TASEP, cfg([1, 0, 0, 0], t), one_mark(t, 3, "bond"))
        assert tasep_dual_points(traj).locations.tolist() == [0]

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["had", "tasep"]), st.booleans())
    def test_cardinality(self, seed, name, ring):
        rng = np.random.default_rng(seed)
        kind = DynamicsKind(name)
        t = Topology.ring(16) if ring else Topology.segment(16, 0)
        eta = sample_fixed_count(int(rng.integers(1, 16)), t, rng)
        om = generate_poisson(1.0, t, (0, 4), kind.location_kind, rng)
        assert len(dual_points(evolve(kind, eta, om))) == len(om)

    def test_wrong_kind(self):
        t = Topology.ring(4)
        traj = evolve(TASEP, cfg([1, 0, 0, 0], t), one_mark(t, 3, "bond"))
        with pytest.raises(ValueError):
            had_dual_points(traj)


class TestReversal:
    def test_null_only_trajectory(self):
        t = Topology.ring(6)
        eta = cfg([1, 0, 1, 0, 1, 0], t)
        om = PointProcess(t, [0, 2, 4, 0], [0.1, 0.2, 0.3, 0.4], (0, 1), "site")
        traj = evolve(HAD, eta, om)
        assert traj.final.line(0) == eta
        assert reverse_check(traj, had_dual_points(traj)).passed

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_single_jump(self, kind):
        t = Topology.ring(6)
        eta = cfg([0, 1, 0, 0, 1, 0], t)
        loc = 3 if kind is HAD else 1
        traj = evolve(kind, eta, one_mark(t, loc, kind.location_kind))
        assert traj.jumps[0, 0, 0] >= 0
        assert reverse_check(traj, dual_points(traj)).passed

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_random_ring_trajectories(self, kind, rng):
        for _ in range(100):
            t = Topology.ring(int(rng.integers(4, 30)))
            eta = sample_fixed_count(int(rng.integers(1, t.n_sites)), t, rng)
            traj = evolve(kind, eta, generate_poisson(1.0, t, (0, 3), kind.location_kind, rng))
            assert reverse_check(traj, dual_points(traj)).passed

    def test_shifted_duals_fail(self, rng):
        t = Topology.ring(12)
        eta = sample_fixed_count(5, t, rng)
        traj = evolve(TASEP, eta, generate_poisson(1.0, t, (0, 5), "bond", rng))
        d = dual_points(traj)
        shifted = PointProcess(t, (d.locations + 1) % 12, d.times, d.horizon, "bond")
        assert not reverse_check(traj, shifted).passed

    def test_ring_only(self):
        t = Topology.segment(5, 0)
        traj = evolve(HAD, cfg([1, 0, 0, 0, 0], t), one_mark(t, 2))
        with pytest.raises(ValueError):
            reverse_check(traj, had_dual_points(traj))


class TestLocalStep:
    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_single_line_is_single_jump(self, kind, rng):
        t = Topology.ring(10)
        for _ in range(50):
            eta = sample_fixed_count(int(rng.integers(1, 10)), t, rng)
            j = int(rng.integers(0, 10))
            new, casc = multiline_local_step(MultiLineState(t, eta.occupancy[None, :]), kind, j)
            jump = had_jump if kind is HAD else tasep_jump
            assert new.line(0) == jump(eta, j) and casc == (j,)

    def test_had_two_lines(self):
        # bell at 4 pulls the top line from 2; the bottom line is then rung at 2
        t = Topology.ring(6)
        lines = np.array([[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]], np.uint8)
        new, casc = multiline_local_step(MultiLineState(t, lines), HAD, 4)
        assert casc == (2, 4)
        assert new.lines.tolist() == [[0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0]]

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_cascade_equals_post_hoc_duals(self, kind, rng):
        t = Topology.ring(15)
        for _ in range(100):
            lines = ring_lines(t, rng.integers(1, 15, 3), rng)
            j = int(rng.integers(0, 15))
            state = MultiLineState(t, lines)
            new, casc = multiline_local_step(state, kind, j)
            mark = j
            for k in (2, 1, 0):
                assert casc[k] == mark
                traj = evolve(kind, state.line(k), one_mark(t, mark, kind.location_kind))
                assert traj.final.line(0) == new.line(k)
                mark = int(dual_points(traj).locations[0])


class TestMultiLine:
    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_empty_marks(self, kind, rng):
        t = Topology.ring(8)
        state = MultiLineState(t, ring_lines(t, (2, 3), rng))
        mt = multiline_evolve(state, kind, PointProcess(t, [], [], (0, 1), kind.location_kind))
        assert mt.final == state

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_two_lines_one_mark(self, kind, rng):
        t = Topology.ring(8)
        state = MultiLineState(t, ring_lines(t, (2, 3), rng))
        om = one_mark(t, 5, kind.location_kind)
        mt = multiline_evolve(state, kind, om)
        top = evolve(kind, state.line(1), om)
        assert mt.point_set(0).locations.tolist() == dual_points(top).locations.tolist()

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_lower_lines_form_a_multiline_process(self, kind, rng):
        for ring in (True, False):
            t = Topology.ring(20) if ring else Topology.segment(20, 0)
            state = MultiLineState(t, ring_lines(t, (3, 7, 12), rng))
            om = generate_poisson(1.0, t, (0, 5), kind.location_kind, rng)
            mt = multiline_evolve(state, kind, om)
            sub = multiline_evolve(MultiLineState(t, state.lines[:2]), kind, mt.point_set(1))
            assert np.array_equal(sub.final.lines, mt.final.lines[:2])

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_recursion_cross_check(self, kind, rng):
        for ring in (True, False):
            t = Topology.ring(24) if ring else Topology.segment(24, 0)
            state = MultiLineState(t, ring_lines(t, (4, 9, 15), rng))
            om = generate_poisson(1.0, t, (0, 6), kind.location_kind, rng)
            mt = multiline_evolve(state, kind, om)
            finals, sets = multiline_by_recursion(state, kind, om)
            assert np.array_equal(finals, mt.final.lines)
            for k, pp in enumerate(sets):
                assert np.array_equal(pp.locations, mt.point_set(k).locations)

    def test_refuses_other_kinds(self, rng):
        t = Topology.ring(8)
        with pytest.raises(ValueError):
            multiline_evolve(MultiLineState(t, ring_lines(t, (2, 3), rng)), DynamicsKind("lrep"),
                             PointProcess(t, [], [], (0, 1), "site"))


class TestTImage:
    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_single_line(self, kind, rng):
        t = Topology.ring(10)
        state = MultiLineState(t, ring_lines(t, (4,), rng))
        om = generate_poisson(1.0, t, (0, 5), kind.location_kind, rng)
        assert t_image_check(multiline_evolve(state, kind, om)).passed

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_commutation_single_mark(self, kind, rng):
        # departures of the moved lines equal the moved departures
        t = Topology.ring(12)
        jump = had_jump if kind is HAD else tasep_jump
        for _ in range(200):
            lines = ring_lines(t, (4, 8), rng)
            j = int(rng.integers(0, 12))
            new, casc = multiline_local_step(MultiLineState(t, lines), kind, j)
            a1, a2 = cfg(lines[0], t), cfg(lines[1], t)
            lhs = departures(new.line(0), new.line(1))
            rhs = jump(departures(a1, a2), j)
            assert lhs == rhs

    @pytest.mark.parametrize("kind", [HAD, TASEP])
    def test_ring_identity(self, kind, rng):
        t = Topology.ring(32)
        for _ in range(5):
            state = MultiLineState(t, ring_lines(t, (6, 14, 24), rng))
            om = generate_poisson(1.0, t, (0, 1000 / 32), kind.location_kind, rng)
            rep = t_image_check(multiline_evolve(state, kind, om))
            assert rep.passed and rep.mismatches == 0

    def test_needs_increasing_counts(self, rng):
        t = Topology.ring(10)
        state = MultiLineState(t, ring_lines(t, (5, 5), rng))
        om = generate_poisson(1.0, t, (0, 1), "site", rng)
        with pytest.raises(UnstableQueueError):
            t_image_check(multiline_evolve(state, HAD, om))
