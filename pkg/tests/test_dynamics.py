import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcips.dynamics import (
    DynamicsKind,
    PointProcess,
    asep_jump,
    discrete_step,
    evolve,
    evolve_augmented,
    evolve_multiclass,
    find_ordering_violation,
    generate_bernoulli_field,
    generate_poisson,
    had_jump,
    lrep_jump,
    recover_points,
    tasep_jump,
)
from mcips.lattice import (
    Configuration,
    MulticlassConfig,
    OrderedStack,
    Topology,
    r_inverse,
    r_map,
)

HAD, TASEP, LREP = DynamicsKind("had"), DynamicsKind("tasep"), DynamicsKind("lrep")
ORDERED_KINDS = ["had", "tasep", "lrep", "asep:0.7", "seq-lr:0.5", "seq-rl:0.5"]


def seg(L):
    return Topology.segment(L, 0)


def cfg(word, topo=None):
    word = np.array(word, np.uint8)
    return Configuration(topo or seg(word.size), word)


def marks(topo, locs, kind="site", flags=None):
    times = np.arange(1, len(locs) + 1, dtype=float)
    return PointProcess(topo, locs, times, (0.0, len(locs) + 1.0), kind, flags)


def random_marks(kind, topo, horizon, rng):
    if kind.discrete:
        return generate_bernoulli_field(kind.p, topo, int(horizon), rng)
    left = kind.p if kind.name == "asep" else None
    return generate_poisson(1.0, topo, (0.0, horizon), kind.location_kind, rng, left_prob=left)


class TestKind:
    def test_parse(self):
        assert DynamicsKind.parse("asep:0.7") == DynamicsKind("asep", 0.7)
        assert DynamicsKind.parse("seq_lr") == DynamicsKind("seq-lr", 0.5)
        assert str(DynamicsKind.parse("TASEP")) == "tasep"

    @pytest.mark.parametrize("bad", ["glauber", "tasep:0.5", "asep:1.5", "par:0"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            DynamicsKind.parse(bad)


class TestPointProcess:
    def test_poisson_count(self):
        pp = generate_poisson(1.0, Topology.ring(1000), (0.0, 1.0), "site", seed=4)
        assert abs(len(pp) - 1000) < 3 * np.sqrt(1000)

    def test_empty_horizon(self):
        assert len(generate_poisson(1.0, Topology.ring(50), (2.0, 2.0), "site", seed=1)) == 0

    def test_seeded(self):
        t = Topology.ring(30)
        assert generate_poisson(1.0, t, (0, 5), "bond", seed=9) == generate_poisson(1.0, t, (0, 5), "bond", seed=9)

    def test_rejects_ties_and_bad_locations(self):
        t = Topology.ring(5)
        with pytest.raises(ValueError):
            PointProcess(t, [1, 2], [1.0, 1.0], (0, 2))
        with pytest.raises(ValueError):
            PointProcess(t, [7], [1.0], (0, 2))

    def test_restrict(self):
        pp = marks(Topology.ring(5), [0, 1, 2, 3])
        sub = pp.restrict(1.5, 3.5)
        assert sub.locations.tolist() == [1, 2]

    def test_bernoulli_field_density(self):
        pp = generate_bernoulli_field(0.3, Topology.ring(200), 100, seed=3)
        assert abs(len(pp) / 20_000 - 0.3) < 0.01


class TestSingleJumps:
    def test_had_summons_from_left(self):
        assert had_jump(cfg([1, 0, 0]), 2).occupancy.tolist() == [0, 0, 1]

    def test_had_null_jump(self):
        assert had_jump(cfg([0, 1, 0]), 1) == cfg([0, 1, 0])

    def test_had_ring_wrap(self):
        t = Topology.ring(3)
        assert had_jump(cfg([0, 1, 0], t), 0).occupancy.tolist() == [1, 0, 0]

    def test_had_segment_without_source(self):
        assert had_jump(cfg([0, 0, 1]), 1) == cfg([0, 0, 1])

    def test_tasep(self):
        assert tasep_jump(cfg([0, 1]), 1).occupancy.tolist() == [1, 0]
        assert tasep_jump(cfg([1, 1]), 1) == cfg([1, 1])
        assert tasep_jump(cfg([0, 0]), 1) == cfg([0, 0])

    def test_asep_right(self):
        assert asep_jump(cfg([1, 0]), 1, True).occupancy.tolist() == [0, 1]
        assert asep_jump(cfg([1, 0]), 1, False) == cfg([1, 0])

    def test_lrep_examples(self):
        assert lrep_jump(cfg([0, 1, 1]), 0) == cfg([0, 1, 1])
        assert lrep_jump(cfg([0, 1, 1]), 2).occupancy.tolist() == [1, 1, 0]

    def test_lrep_is_complemented_had(self, rng):
        for _ in range(1000):
            L = int(rng.integers(2, 12))
            t = Topology.ring(L) if rng.random() < 0.5 else seg(L)
            eta = cfg(rng.integers(0, 2, L), t)
            if t.is_ring and eta.count in (0, L):
                continue
            j = int(rng.integers(0, L))
            assert lrep_jump(eta, j) == had_jump(eta.complement(), j).complement()


class TestDiscrete:
    def test_sequential_left_to_right(self):
        out = discrete_step(DynamicsKind.parse("seq-lr"), cfg([0, 1, 1]), [1, 2])
        assert out.occupancy.tolist() == [1, 1, 0]

    def test_sequential_right_to_left(self):
        out = discrete_step(DynamicsKind.parse("seq-rl"), cfg([0, 1, 1]), [1, 2])
        assert out.occupancy.tolist() == [1, 0, 1]

    def test_parallel(self):
        out = discrete_step(DynamicsKind.parse("par"), cfg([0, 1, 1]), [1, 2])
        assert out.occupancy.tolist() == [1, 0, 1]

    def test_no_marks(self):
        for name in ("seq-lr", "par"):
            assert discrete_step(DynamicsKind.parse(name), cfg([0, 1, 1]), []) == cfg([0, 1, 1])


class TestEvolve:
    def test_empty_marks(self):
        t = Topology.ring(6)
        eta = cfg([1, 0, 1, 0, 0, 1], t)
        traj = evolve(TASEP, eta, PointProcess(t, [], [], (0, 1), "bond"))
        assert traj.final.line(0) == eta

    def test_single_mark(self):
        t = Topology.ring(6)
        eta = cfg([1, 0, 1, 0, 0, 1], t)
        traj = evolve(HAD, eta, marks(t, [4]))
        assert traj.final.line(0) == had_jump(eta, 4)

    def test_coupling_moves_both_lines(self):
        t = seg(4)
        s = OrderedStack(t, np.array([[0, 0, 1, 0], [0, 1, 1, 0]], np.uint8))
        traj = evolve(TASEP, s, marks(t, [2], "bond"))
        assert traj.final.lines.tolist() == [[0, 1, 0, 0], [0, 1, 1, 0]]
        traj = evolve(TASEP, s, marks(t, [1], "bond"))
        assert traj.final.lines.tolist() == [[0, 0, 1, 0], [1, 0, 1, 0]]

    def test_rejects_wrong_mark_kind(self):
        t = Topology.ring(4)
        with pytest.raises(ValueError):
            evolve(TASEP, cfg([1, 0, 0, 0], t), marks(t, [1]))

    def test_replay_and_determinism(self, rng):
        t = Topology.ring(40)
        s = r_inverse(MulticlassConfig(t, rng.integers(1, 4, 40).astype(np.uint8), 2))
        om = generate_poisson(1.0, t, (0, 5), "site", rng)
        a, b = evolve(HAD, s, om), evolve(HAD, s, om)
        assert np.array_equal(a.jumps, b.jumps)
        assert np.array_equal(a.replayed_final(), a.final.lines)
        assert np.array_equal(a.state_at(5.0), a.final.lines)

    @pytest.mark.parametrize("name", ORDERED_KINDS)
    def test_order_and_conservation_on_rings(self, name, rng):
        kind = DynamicsKind.parse(name)
        t = Topology.ring(30)
        for _ in range(20):
            n = int(rng.integers(3, 5))
            xi = MulticlassConfig(t, rng.integers(1, n + 2, 30).astype(np.uint8), n)
            s = r_inverse(xi)
            if np.any(s.counts == 0) or np.any(s.counts == 30):
                continue
            traj = evolve(kind, s, random_marks(kind, t, 4, rng))
            # OrderedStack validates the order of the final state
            assert np.array_equal(traj.final.counts, s.counts)
            for _, _, after in traj.replay():
                assert np.all(after[:-1] <= after[1:])

    @pytest.mark.parametrize("name", ORDERED_KINDS)
    def test_order_exhaustive_small(self, name):
        kind = DynamicsKind.parse(name)
        assert find_ordering_violation(kind, max_sites=3) is None


class TestParallelCounterexample:
    FIXTURE = {
        "topology": "segment:3:0",
        "lower": [0, 0, 1],
        "upper": [0, 1, 1],
        "marks": [1, 2],
        "lower_after": [0, 1, 0],
        "upper_after": [1, 0, 1],
    }

    def test_search_finds_fixture(self):
        hit = find_ordering_violation(DynamicsKind.parse("par"), max_sites=4)
        assert hit is not None
        for key, value in self.FIXTURE.items():
            assert hit[key] == value

    def test_fixture_breaks_order(self):
        f = self.FIXTURE
        t = Topology.parse(f["topology"])
        s = OrderedStack(t, np.array([f["lower"], f["upper"]], np.uint8))
        out = discrete_step(DynamicsKind.parse("par"), s, f["marks"])
        assert out.lines.tolist() == [f["lower_after"], f["upper_after"]]
        assert np.any(out.lines[0] > out.lines[1])


class TestMulticlass:
    def test_bond_swap(self):
        xi = MulticlassConfig(seg(2), np.array([2, 1], np.uint8), 2)
        out = evolve_multiclass(TASEP, xi, marks(seg(2), [1], "bond"))
        assert out.final.classes.tolist() == [1, 2]

    def test_equal_classes(self):
        xi = MulticlassConfig(seg(2), np.array([2, 2], np.uint8), 2)
        assert evolve_multiclass(TASEP, xi, marks(seg(2), [1], "bond")).final == xi

    @pytest.mark.parametrize("name", ORDERED_KINDS)
    def test_matches_coupled_stack(self, name, rng):
        kind = DynamicsKind.parse(name)
        for i in range(10):
            t = Topology.ring(25) if i % 2 else seg(25)
            xi = MulticlassConfig(t, rng.integers(1, 5, 25).astype(np.uint8), 3)
            s = r_inverse(xi)
            if t.is_ring and (np.any(s.counts == 0) or np.any(s.counts == 25)):
                continue
            om = random_marks(kind, t, 40 if not kind.discrete else 40, rng)
            assert evolve_multiclass(kind, xi, om).final == r_map(evolve(kind, s, om).final)

    def test_pathwise_every_event(self, rng):
        t = Topology.ring(30)
        xi = MulticlassConfig(t, rng.integers(1, 5, 30).astype(np.uint8), 3)
        om = generate_poisson(1.0, t, (0, 1000 / 30), "bond", rng)
        mt = evolve_multiclass(TASEP, xi, om, record=True)
        traj = evolve(TASEP, r_inverse(xi), om)
        for (e, _, after), state in zip(traj.replay(), mt.states):
            assert np.array_equal(r_map(OrderedStack(t, after)).classes, state)

    def test_parallel_refused(self):
        xi = MulticlassConfig(seg(3), np.array([1, 2, 3], np.uint8), 2)
        with pytest.raises(ValueError):
            evolve_multiclass(DynamicsKind.parse("par"), xi, generate_bernoulli_field(0.5, seg(3), 2, seed=1))


class TestAugmented:
    def test_tasep_hole_flips_gamma(self):
        t = seg(3)
        traj = evolve_augmented(TASEP, cfg([1, 0, 0]), marks(t, [2], "bond"), gamma=[0, 0, 0], zeta=[0] * 4)
        assert traj.final.line(0) == cfg([1, 0, 0])
        assert traj.gamma_final.tolist() == [0, 0, 1]

    def test_tasep_blocked_flips_zeta(self):
        t = seg(3)
        traj = evolve_augmented(TASEP, cfg([1, 1, 0]), marks(t, [1], "bond"), gamma=[0, 0, 0], zeta=[0] * 4)
        assert traj.final.line(0) == cfg([1, 1, 0])
        assert traj.zeta_final.tolist() == [0, 1, 0, 0]

    def test_had_null_jump_flips_gamma(self):
        t = seg(3)
        traj = evolve_augmented(HAD, cfg([0, 1, 0]), marks(t, [1]), gamma=[0, 0, 0], zeta=[0] * 4)
        assert traj.gamma_final.tolist() == [0, 1, 0]
        assert recover_points(traj).locations.tolist() == [1]

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["had", "tasep"]), st.booleans())
    def test_recovery(self, seed, name, ring):
        rng = np.random.default_rng(seed)
        kind = DynamicsKind(name)
        t = Topology.ring(12) if ring else seg(12)
        eta = cfg(rng.integers(0, 2, 12), t)
        if ring and eta.count == 0:
            eta = cfg(np.r_[1, np.zeros(11, int)], t)
        om = generate_poisson(1.0, t, (0, 3), kind.location_kind, rng)
        traj = evolve_augmented(kind, eta, om, seed=rng)
        rec = recover_points(traj)
        assert np.array_equal(rec.locations, om.locations) and np.array_equal(rec.times, om.times)

    def test_refuses_other_kinds(self):
        with pytest.raises(ValueError):
            evolve_augmented(LREP, cfg([0, 1]), marks(seg(2), [1]))
