import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcips.lattice import Configuration, Topology, r_map, sample_bernoulli
from mcips.queues import (
    Boundary,
    UnstableQueueError,
    birth_death_stationary,
    class_split_step,
    class_splits,
    departures,
    geometric_stationary,
    m_map,
    queue_lengths,
    t_map,
    tandem,
)


def cfg(word, topo=None):
    word = np.array(word, np.uint8)
    return Configuration(topo or Topology.segment(word.size, 0), word)


A1 = [1, 0, 1, 0, 0, 0]
A2 = [0, 1, 0, 0, 1, 1]

words = st.lists(st.integers(0, 1), min_size=2, max_size=40)


class TestQueueLengths:
    def test_hand_example(self):
        z = queue_lengths(cfg(A1), cfg(A2), Boundary.empty())
        assert z.z.tolist() == [1, 0, 1, 1, 0, 0]

    def test_equal_inputs_stay_empty(self):
        a = cfg([1, 0, 1, 1, 0, 1])
        assert not queue_lengths(a, a).z.any()

    def test_no_arrivals_drain(self):
        z = queue_lengths(cfg([0] * 6), cfg([0, 1, 0, 1, 1, 0]), Boundary("empty")).z
        assert np.all(np.diff(z) <= 0) and z[-1] == 0

    def test_ring_periodic_solution(self, rng):
        # the periodic solution satisfies the recursion at every site, wrap included
        topo = Topology.ring(200)
        for _ in range(50):
            a1 = sample_bernoulli(0.3, topo, rng).occupancy
            a2 = sample_bernoulli(0.6, topo, rng).occupancy
            if a1.sum() >= a2.sum():
                continue
            z = queue_lengths(cfg(a1, topo), cfg(a2, topo)).z
            prev = np.roll(z, 1)
            assert np.array_equal(z, np.maximum(prev + a1 - a2, 0))

    def test_ring_unstable(self):
        topo = Topology.ring(4)
        with pytest.raises(UnstableQueueError):
            departures(cfg([1, 1, 0, 0], topo), cfg([1, 0, 1, 0], topo))

    def test_ring_needs_loynes(self):
        topo = Topology.ring(4)
        with pytest.raises(ValueError):
            departures(cfg([1, 0, 0, 0], topo), cfg([1, 0, 1, 0], topo), Boundary.empty())


class TestDepartures:
    def test_hand_example(self):
        assert departures(cfg(A1), cfg(A2)).occupancy.tolist() == [0, 1, 0, 0, 1, 0]

    def test_full_service_passes_arrivals(self):
        a = cfg([1, 0, 1, 1, 0])
        assert departures(a, cfg([1] * 5)) == a

    def test_no_arrivals(self):
        assert not departures(cfg([0] * 5), cfg([1, 0, 1, 1, 0])).occupancy.any()

    @given(words, st.data())
    def test_dominated_by_services(self, a1, data):
        a2 = data.draw(st.lists(st.integers(0, 1), min_size=len(a1), max_size=len(a1)))
        assert np.all(departures(cfg(a1), cfg(a2)).occupancy <= np.array(a2))

    @given(words, st.data())
    def test_monotone_in_arrivals(self, a1, data):
        L = len(a1)
        a2 = data.draw(st.lists(st.integers(0, 1), min_size=L, max_size=L))
        mask = data.draw(st.lists(st.integers(0, 1), min_size=L, max_size=L))
        smaller = np.array(a1) * np.array(mask)
        assert np.all(departures(cfg(smaller), cfg(a2)).occupancy <= departures(cfg(a1), cfg(a2)).occupancy)

    def test_monotone_exhaustive(self):
        for L in range(1, 7):
            ws = [np.array(w, np.uint8) for w in itertools.product((0, 1), repeat=L)]
            topo = Topology.segment(max(L, 2), 0)
            if L < 2:
                continue
            for a2 in ws:
                d = {w.tobytes(): departures(cfg(w, topo), cfg(a2, topo)).occupancy for w in ws}
                for a, b in itertools.product(ws, ws):
                    if np.all(a <= b):
                        assert np.all(d[a.tobytes()] <= d[b.tobytes()])


class TestTandem:
    def test_single_line(self):
        a = cfg([1, 0, 1])
        assert tandem([a]) == a

    def test_two_lines(self):
        assert tandem([cfg(A1), cfg(A2)]) == departures(cfg(A1), cfg(A2))

    def test_chain_inequality(self, rng):
        topo = Topology.segment(10_000, 1000)
        a = [sample_bernoulli(r, topo, rng) for r in (0.2, 0.5, 0.8)]
        d3 = tandem(a).occupancy
        d2 = tandem(a[1:]).occupancy
        assert np.all(d3 <= d2) and np.all(d2 <= a[2].occupancy)


class TestTMap:
    def test_single_line(self):
        a = cfg([0, 1, 1, 0])
        assert t_map([a]).lines.tolist() == [a.occupancy.tolist()]

    def test_two_lines(self):
        s = t_map([cfg(A1), cfg(A2)])
        assert s.lines[0].tolist() == departures(cfg(A1), cfg(A2)).occupancy.tolist()
        assert s.lines[1].tolist() == A2

    @given(st.lists(st.lists(st.integers(0, 1), min_size=12, max_size=12), min_size=3, max_size=3))
    def test_output_is_ordered(self, raw):
        s = t_map([cfg(w) for w in raw])
        assert np.all(s.lines[:-1] <= s.lines[1:])


class TestClassSplit:
    def test_two_lines(self):
        a1, a2 = cfg(A1), cfg(A2)
        split = class_split_step(class_splits([a1])[0], a2)
        d = departures(a1, a2)
        assert split.parts[0] == d
        assert split.parts[1].occupancy.tolist() == (a2.occupancy - d.occupancy).tolist()

    def test_equal_lines_use_every_service(self):
        a = cfg([1, 0, 1, 1, 0, 1])
        split = class_split_step(class_splits([a])[0], a)
        assert not split.parts[1].occupancy.any()

    def test_partial_sums_match_tandems(self, rng):
        topo = Topology.segment(400, 0)
        for _ in range(20):
            a = [sample_bernoulli(r, topo, rng) for r in (0.2, 0.45, 0.7)]
            last = class_splits(a)[-1]
            for r in range(1, 4):
                total = np.sum([p.occupancy for p in last.parts[:r]], axis=0)
                assert np.array_equal(total, tandem(a[r - 1 :]).occupancy)

    def test_geometric_boundary_refused(self):
        a = cfg(A1)
        with pytest.raises(ValueError):
            class_split_step(class_splits([a])[0], cfg(A2), Boundary.geometric())


class TestMMap:
    def test_single_line(self):
        assert m_map([cfg([1, 0, 1])]).classes.tolist() == [1, 2, 1]

    def test_holes_of_top_line(self, rng):
        topo = Topology.segment(300, 0)
        a = [sample_bernoulli(r, topo, rng) for r in (0.2, 0.5, 0.8)]
        xi = m_map(a)
        assert np.all(xi.classes[a[-1].occupancy == 0] == 4)

    def test_agrees_with_r_of_t(self, rng):
        for i in range(1000):
            n = int(rng.integers(1, 5))
            ring = i % 2 == 0
            topo = Topology.ring(24) if ring else Topology.segment(24, 0)
            while True:
                a = [sample_bernoulli(r, topo, rng) for r in np.sort(rng.uniform(0.1, 0.9, n))]
                counts = [c.count for c in a]
                if not ring or all(y > x for x, y in zip(counts, counts[1:])):
                    break
            assert m_map(a) == r_map(t_map(a))


class TestStationaryLaw:
    def test_ratio_value(self):
        # up-step rho1 (1 - rho2), down-step rho2 (1 - rho1)
        assert geometric_stationary(1 / 3, 2 / 3).ratio == pytest.approx(0.25, abs=1e-15)

    def test_ratio(self):
        law = geometric_stationary(1 / 3, 2 / 3)
        p = law.pmf(np.arange(20))
        assert np.allclose(p[1:] / p[:-1], law.ratio, rtol=0, atol=1e-15)

    def test_matches_birth_death_solve(self):
        law = geometric_stationary(1 / 3, 2 / 3)
        pi = birth_death_stationary(1 / 3, 2 / 3, K=60)
        assert np.max(np.abs(pi - law.pmf(np.arange(60)))) < 1e-12

    def test_light_arrivals_concentrate_at_zero(self):
        assert geometric_stationary(1e-9, 0.5).pmf(0) > 1 - 1e-8

    def test_unstable_rejected(self):
        with pytest.raises(ValueError):
            geometric_stationary(0.6, 0.5)

    def test_sampler_mean(self):
        law = geometric_stationary(0.3, 0.6)
        x = law.sample(np.random.default_rng(0), 200_000)
        mean = law.ratio / (1 - law.ratio)
        assert abs(x.mean() - mean) < 0.01
