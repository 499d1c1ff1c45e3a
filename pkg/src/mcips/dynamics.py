"""Graphical constructions: marks, single-mark maps and event-driven evolution.

Continuous-time kinds (HAD, TASEP, LREP, ASEP) are driven by a
:class:`PointProcess` of marks with strictly increasing times; the
discrete-time TASEPs (sequential left-to-right, right-to-left, parallel)
by a Bernoulli field whose marks share integer tick times.

HAD and LREP marks sit on sites.  TASEP-type marks sit on bonds; bond ``b``
joins positions ``b-1`` and ``b`` and a particle on the right of a marked
bond jumps left into an empty site.  For discrete kinds the mark on bond
``b`` is the attempt of the particle at position ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .lattice import (
    Configuration,
    MulticlassConfig,
    OrderedStack,
    Topology,
    as_rng,
    r_inverse,
    r_map,
)

__all__ = [
    "DynamicsKind",
    "PointProcess",
    "Trajectory",
    "asep_jump",
    "discrete_step",
    "evolve",
    "evolve_augmented",
    "evolve_multiclass",
    "find_ordering_violation",
    "generate_bernoulli_field",
    "generate_poisson",
    "had_jump",
    "lrep_jump",
    "recover_points",
    "tasep_jump",
]

_CODES = {
    "had": K.HAD,
    "tasep": K.TASEP,
    "lrep": K.LREP,
    "asep": K.ASEP,
    "seq-lr": K.SEQ_LR,
    "seq-rl": K.SEQ_RL,
    "par": K.PAR,
}
_NEEDS_P = ("asep", "seq-lr", "seq-rl", "par")


@dataclass(frozen=True)
class DynamicsKind:
    """Which dynamics, plus the jump parameter ``p`` where the kind has one.

    For ASEP ``p`` is the probability that a mark is a left jump; for the
    discrete kinds it is the per-tick mark probability.
    """

    name: str
    p: float | None = None

    def __post_init__(self):
        name = self.name.lower()
        if name not in _CODES:
            raise ValueError(f"unknown dynamics {self.name!r}; choose from {sorted(_CODES)}")
        object.__setattr__(self, "name", name)
        if name in _NEEDS_P:
            if self.p is None:
                raise ValueError(f"{name} needs a parameter p")
            if not 0.0 < self.p <= 1.0:
                raise ValueError(f"p must lie in (0, 1], got {self.p}")
        elif self.p is not None:
            raise ValueError(f"{name} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> DynamicsKind:
        """``had``, ``tasep``, ``lrep``, ``asep:0.7``, ``seq-lr:0.5`` ..."""
        name, _, p = text.strip().lower().partition(":")
        name = name.replace("_", "-")
        if name in _NEEDS_P and not p:
            p = "1.0" if name == "asep" else "0.5"
        return cls(name, float(p) if p else None)

    def __str__(self):
        return self.name if self.p is None else f"{self.name}:{self.p:g}"

    @property
    def code(self) -> int:
        return _CODES[self.name]

    @property
    def location_kind(self) -> str:
        return "site" if self.name in ("had", "lrep") else "bond"

    @property
    def discrete(self) -> bool:
        return self.name in ("seq-lr", "seq-rl", "par")

    @property
    def preserves_order(self) -> bool:
        return self.name != "par"


@dataclass(frozen=True, eq=False)
class PointProcess:
    """A finite, time-sorted set of marks ``(location, time)``.

    ``flags`` carries the per-mark direction for ASEP (1 = right jump).
    """

    topology: Topology
    locations: np.ndarray
    times: np.ndarray
    horizon: tuple
    location_kind: str = "site"
    flags: np.ndarray | None = None
    discrete: bool = False

    def __post_init__(self):
        locs = np.array(self.locations, dtype=np.int64).ravel()
        times = np.array(self.times, dtype=np.float64).ravel()
        if locs.shape != times.shape:
            raise ValueError("locations and times differ in length")
        t0, t1 = (float(self.horizon[0]), float(self.horizon[1]))
        if t1 < t0:
            raise ValueError("horizon end before start")
        if self.location_kind not in ("site", "bond"):
            raise ValueError("location_kind must be 'site' or 'bond'")
        if times.size:
            steps = np.diff(times)
            if self.discrete:
                if np.any(steps < 0):
                    raise ValueError("mark times must be non-decreasing")
            elif np.any(steps <= 0):
                raise ValueError("mark times must be strictly increasing")
            if times[0] < t0 or times[-1] > t1:
                raise ValueError("mark outside horizon")
            check = self.topology.valid_site if self.location_kind == "site" else self.topology.valid_bond
            bad = [int(x) for x in np.unique(locs) if not check(int(x))]
            if bad:
                raise ValueError(f"invalid {self.location_kind} locations {bad[:5]}")
        flags = None
        if self.flags is not None:
            flags = np.array(self.flags, dtype=np.uint8).ravel()
            if flags.shape != locs.shape:
                raise ValueError("flags and locations differ in length")
            flags.setflags(write=False)
        for a in (locs, times):
            a.setflags(write=False)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "horizon", (t0, t1))
        object.__setattr__(self, "flags", flags)

    def __len__(self):
        return self.locations.size

    def __eq__(self, other):
        if not isinstance(other, PointProcess):
            return NotImplemented
        same_flags = (self.flags is None and other.flags is None) or (
            self.flags is not None
            and other.flags is not None
            and np.array_equal(self.flags, other.flags)
        )
        return (
            self.topology == other.topology
            and self.location_kind == other.location_kind
            and self.horizon == other.horizon
            and self.discrete == other.discrete
            and np.array_equal(self.locations, other.locations)
            and np.array_equal(self.times, other.times)
            and same_flags
        )

    def __repr__(self):
        return f"PointProcess({self.topology}, {len(self)} {self.location_kind} marks, horizon={self.horizon})"

    def flag_array(self) -> np.ndarray:
        if self.flags is None:
            return np.zeros(len(self), dtype=np.uint8)
        return np.asarray(self.flags)

    def restrict(self, t0: float, t1: float) -> PointProcess:
        keep = (self.times >= t0) & (self.times < t1)
        return PointProcess(
            self.topology,
            self.locations[keep],
            self.times[keep],
            (t0, t1),
            self.location_kind,
            None if self.flags is None else self.flags[keep],
            self.discrete,
        )


def _candidates(topology: Topology, location_kind: str) -> np.ndarray:
    if location_kind == "site":
        return np.arange(topology.n_sites)
    return topology.bonds


def generate_poisson(
    rate: float,
    topology: Topology,
    horizon,
    location_kind: str = "site",
    seed=None,
    left_prob: float | None = None,
) -> PointProcess:
    """Independent rate-``rate`` Poisson marks on every site or bond.

    The superposition is drawn directly: a Poisson total count, uniform times
    and uniform locations.  ``left_prob`` attaches ASEP direction flags.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    t0, t1 = float(horizon[0]), float(horizon[1])
    rng = as_rng(seed)
    cand = _candidates(topology, location_kind)
    while True:
        count = rng.poisson(rate * cand.size * (t1 - t0)) if t1 > t0 else 0
        times = np.sort(t0 + (t1 - t0) * rng.random(count))
        if count < 2 or np.all(np.diff(times) > 0):
            break
    locs = cand[rng.integers(0, cand.size, size=count)]
    flags = None
    if left_prob is not None:
        flags = (rng.random(count) >= left_prob).astype(np.uint8)
    return PointProcess(topology, locs, times, (t0, t1), location_kind, flags)


def generate_bernoulli_field(
    p: float, topology: Topology, ticks, seed=None, location_kind: str = "bond"
) -> PointProcess:
    """Each (location, integer tick) in ``[t0, t1)`` is marked with probability ``p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    if np.isscalar(ticks):
        t0, t1 = 0, int(ticks)
    else:
        t0, t1 = int(ticks[0]), int(ticks[1])
    rng = as_rng(seed)
    cand = _candidates(topology, location_kind)
    hit = rng.random((max(t1 - t0, 0), cand.size)) < p
    tt, ll = np.nonzero(hit)
    return PointProcess(
        topology, cand[ll], (tt + t0).astype(float), (t0, t1), location_kind, discrete=True
    )


# -------------------------------------------------------------- single maps


def _single(config: Configuration, code: int, loc: int, flag: int = 0) -> Configuration:
    line = config.occupancy.copy()
    rec = np.empty(2, np.int64)
    K.apply_mark(code, line, loc, flag, config.topology.is_ring, rec)
    return Configuration(config.topology, line)


def had_jump(eta: Configuration, j: int) -> Configuration:
    """Bell at position ``j``: the closest particle at or left of ``j`` jumps to ``j``."""
    if eta.topology.is_ring and eta.count == 0:
        raise ValueError("HAD bell on an empty ring")
    return _single(eta, K.HAD, j)


def lrep_jump(eta: Configuration, j: int) -> Configuration:
    """Bell at ``j``: a particle at ``j`` jumps to the first empty site on its left."""
    if eta.topology.is_ring and eta.count == eta.topology.n_sites:
        raise ValueError("LREP bell on a full ring")
    return _single(eta, K.LREP, j)


def tasep_jump(eta: Configuration, bond: int) -> Configuration:
    """Swap across ``bond`` when its right site is full and its left site empty."""
    return _single(eta, K.TASEP, bond)


def asep_jump(eta: Configuration, bond: int, right: bool) -> Configuration:
    return _single(eta, K.ASEP, bond, int(right))


def discrete_step(kind: DynamicsKind, eta, marks) -> Configuration | OrderedStack:
    """One tick of a discrete-time TASEP on a configuration or ordered stack.

    ``marks`` is the set of bonds marked at this tick (the attempting
    particles' positions).  Sequential kinds scan the marks in their
    direction; the parallel kind reads every enablement from the pre-tick
    state, so for ``par`` the returned stack may be out of order.
    """
    if not kind.discrete:
        raise ValueError(f"{kind} is not a discrete-time kind")
    lines, topo = _as_lines(eta)
    locs = np.unique(np.asarray(list(marks), dtype=np.int64))
    jumps = np.full((locs.size, lines.shape[0], 2), -1, np.int64)
    _tick(kind, lines, locs, topo.is_ring, jumps)
    if isinstance(eta, Configuration):
        return Configuration(topo, lines[0])
    return OrderedStack(topo, lines) if kind.preserves_order else _unordered(topo, lines)


def _as_lines(eta):
    if isinstance(eta, Configuration):
        return eta.occupancy[None, :].copy(), eta.topology
    return np.array(eta.lines, copy=True), eta.topology


def _tick(kind: DynamicsKind, lines: np.ndarray, locs: np.ndarray, ring: bool, jumps: np.ndarray):
    """Apply one tick; ``locs`` must be sorted ascending.  Returns application order."""
    if kind.name == "par":
        for k in range(lines.shape[0]):
            K.parallel_tick(lines[k], locs, ring, jumps, k)
        return np.arange(locs.size)
    order = np.arange(locs.size)
    if kind.name == "seq-rl":
        order = order[::-1]
    ordered = np.ascontiguousarray(locs[order])
    sub = np.empty((locs.size, lines.shape[0], 2), np.int64)
    K.run_stack(K.TASEP, lines, ordered, np.zeros(locs.size, np.uint8), ring, sub)
    jumps[:] = sub
    return order


# ---------------------------------------------------------------- trajectories


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Initial state, marks in application order, per-line moves, final state.

    ``jumps[e, k]`` is the ``(from, to)`` move of line ``k`` at event ``e``
    (``-1`` for none).  Augmented trajectories also carry spin words:
    ``gamma`` (sites) and ``zeta`` (bonds), with one flip position per event.
    """

    kind: DynamicsKind
    initial: OrderedStack
    marks: PointProcess
    jumps: np.ndarray
    final: OrderedStack
    gamma0: np.ndarray | None = None
    zeta0: np.ndarray | None = None
    gamma_flips: np.ndarray | None = None
    zeta_flips: np.ndarray | None = None
    gamma_final: np.ndarray | None = None
    zeta_final: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def topology(self) -> Topology:
        return self.initial.topology

    @property
    def n_events(self) -> int:
        return len(self.marks)

    @property
    def augmented(self) -> bool:
        return self.gamma0 is not None

    def replay(self):
        """Yield ``(event, lines_before, lines_after)`` from the recorded moves.

        Arrays are fresh copies.  Augmented trajectories yield
        ``(event, (lines, gamma, zeta)_before, (lines, gamma, zeta)_after)``.
        """
        lines = np.array(self.initial.lines, copy=True)
        gamma = None if self.gamma0 is None else np.array(self.gamma0, copy=True)
        zeta = None if self.zeta0 is None else np.array(self.zeta0, copy=True)
        for e in range(self.n_events):
            before = (lines.copy(), None if gamma is None else gamma.copy(), None if zeta is None else zeta.copy())
            for k in range(lines.shape[0]):
                src, dst = self.jumps[e, k]
                if src >= 0:
                    lines[k, src] = 0
                    lines[k, dst] = 1
            if self.gamma_flips is not None and self.gamma_flips[e] >= 0:
                gamma[self.gamma_flips[e]] ^= 1
            if self.zeta_flips is not None and self.zeta_flips[e] >= 0:
                zeta[self.zeta_flips[e]] ^= 1
            after = (lines.copy(), None if gamma is None else gamma.copy(), None if zeta is None else zeta.copy())
            if self.augmented:
                yield e, before, after
            else:
                yield e, before[0], after[0]

    def replayed_final(self) -> np.ndarray:
        lines = np.array(self.initial.lines, copy=True)
        for e in range(self.n_events):
            for k in range(lines.shape[0]):
                src, dst = self.jumps[e, k]
                if src >= 0:
                    lines[k, src] = 0
                    lines[k, dst] = 1
        return lines

    def state_at(self, t: float) -> np.ndarray:
        """Lines at time ``t`` (marks at times ``<= t`` applied)."""
        stop = int(np.searchsorted(self.marks.times, t, side="right"))
        lines = np.array(self.initial.lines, copy=True)
        for e in range(stop):
            for k in range(lines.shape[0]):
                src, dst = self.jumps[e, k]
                if src >= 0:
                    lines[k, src] = 0
                    lines[k, dst] = 1
        return lines


def _as_stack(initial) -> OrderedStack:
    if isinstance(initial, OrderedStack):
        return initial
    if isinstance(initial, Configuration):
        return OrderedStack(initial.topology, initial.occupancy[None, :])
    raise TypeError("initial state must be a Configuration or OrderedStack")


def _check_marks(kind: DynamicsKind, stack: OrderedStack, omega: PointProcess, horizon):
    if omega.topology != stack.topology:
        raise ValueError("marks and initial state live on different topologies")
    if omega.location_kind != kind.location_kind:
        raise ValueError(f"{kind} needs {kind.location_kind} marks, got {omega.location_kind}")
    if omega.discrete != kind.discrete:
        raise ValueError(f"{kind} needs {'discrete' if kind.discrete else 'continuous'} marks")
    if horizon is not None:
        t0, t1 = horizon
        if len(omega) and (omega.times[0] < t0 or omega.times[-1] > t1):
            raise ValueError("mark outside horizon")
    if stack.topology.is_ring:
        counts = stack.counts
        if kind.name == "had" and np.any(counts == 0):
            raise ValueError("HAD on a ring needs every line non-empty")
        if kind.name == "lrep" and np.any(counts == stack.topology.n_sites):
            raise ValueError("LREP on a ring needs a hole in every line")


def evolve(kind: DynamicsKind, initial, omega: PointProcess, horizon=None) -> Trajectory:
    """Run the basic coupling: every mark acts on every line simultaneously."""
    stack = _as_stack(initial)
    _check_marks(kind, stack, omega, horizon)
    lines = np.array(stack.lines, copy=True)
    ring = stack.topology.is_ring
    n_ev = len(omega)
    jumps = np.full((n_ev, lines.shape[0], 2), -1, np.int64)
    marks = omega
    if not kind.discrete:
        K.run_stack(kind.code, lines, np.ascontiguousarray(omega.locations), omega.flag_array().copy(), ring, jumps)
    else:
        order_all = []
        times = omega.times
        start = 0
        while start < n_ev:
            stop = int(np.searchsorted(times, times[start], side="right"))
            idx = np.arange(start, stop)
            idx = idx[np.argsort(omega.locations[idx], kind="stable")]
            locs = omega.locations[idx]
            if np.any(np.diff(locs) == 0):
                raise ValueError("duplicate mark within a tick")
            sub = np.full((idx.size, lines.shape[0], 2), -1, np.int64)
            order = _tick(kind, lines, np.ascontiguousarray(locs), ring, sub)
            jumps[start:stop] = sub
            order_all.append(idx[order])
            start = stop
        if order_all:
            perm = np.concatenate(order_all)
            marks = PointProcess(
                omega.topology, omega.locations[perm], omega.times[perm], omega.horizon,
                omega.location_kind, None, True,
            )
    final = OrderedStack(stack.topology, lines) if kind.preserves_order else _unordered(stack.topology, lines)
    return Trajectory(kind, stack, marks, jumps, final)


def _unordered(topology: Topology, lines: np.ndarray):
    """Final state of a kind that may break ordering; skips the stack check."""
    obj = object.__new__(OrderedStack)
    arr = np.array(lines, copy=True)
    arr.setflags(write=False)
    object.__setattr__(obj, "topology", topology)
    object.__setattr__(obj, "lines", arr)
    return obj


@dataclass(frozen=True, eq=False)
class MulticlassTrajectory:
    kind: DynamicsKind
    initial: MulticlassConfig
    marks: PointProcess
    states: np.ndarray | None
    final: MulticlassConfig


def evolve_multiclass(
    kind: DynamicsKind, xi0: MulticlassConfig, omega: PointProcess, horizon=None, record: bool = False
) -> MulticlassTrajectory:
    """Evolve a multiclass word directly (without going through the stack).

    TASEP-type marks swap a lower class on the right of a bond with a higher
    class on its left (reverse for ASEP right jumps).  A HAD bell at ``j``
    pulls a chain: scanning left from ``j``, each site whose class beats the
    running minimum hands its class to the chain and takes the previous one;
    ``j`` ends with the lowest class found.  LREP is the same with classes
    reversed.  With ``record=True`` the state after every event is kept.
    """
    if kind.name == "par":
        raise ValueError("the parallel TASEP does not preserve ordering; no multiclass process")
    _check_marks(kind, r_inverse(xi0), omega, horizon)
    xi = np.array(xi0.classes, copy=True)
    ring = xi0.topology.is_ring
    locs = np.ascontiguousarray(omega.locations)
    states = None
    if kind.discrete:
        if record:
            raise ValueError("per-event recording is only available for continuous kinds")
        K.run_multiclass_ticks(kind.code, xi, locs, omega.times.astype(np.int64), ring)
    elif record:
        states = np.empty((len(omega), xi.size), np.uint8)
        flags = omega.flag_array()
        for e in range(len(omega)):
            K.run_multiclass(kind.code, xi, xi0.n, locs[e : e + 1], flags[e : e + 1].copy(), ring)
            states[e] = xi
    else:
        K.run_multiclass(kind.code, xi, xi0.n, locs, omega.flag_array().copy(), ring)
    return MulticlassTrajectory(kind, xi0, omega, states, MulticlassConfig(xi0.topology, xi, xi0.n))


# ------------------------------------------------------------- augmented

def evolve_augmented(
    kind: DynamicsKind,
    initial: Configuration,
    omega: PointProcess,
    gamma=None,
    zeta=None,
    horizon=None,
    seed=None,
) -> Trajectory:
    """Single-line HAD or TASEP with spin words marking the invisible marks.

    HAD: a bell at an occupied site flips ``gamma`` there (on a segment, so
    does a bell with no particle to its left).  TASEP: a mark whose right
    site is empty flips ``gamma`` at that site; a mark between two particles
    flips ``zeta`` at the bond.  Missing spin words are drawn Bernoulli(1/2).
    """
    if kind.name not in ("had", "tasep"):
        raise ValueError("augmented dynamics exist for HAD and TASEP only")
    stack = _as_stack(initial)
    if stack.n != 1:
        raise ValueError("augmented dynamics act on a single line")
    _check_marks(kind, stack, omega, horizon)
    topo = stack.topology
    rng = as_rng(seed)
    n_bonds = topo.n_sites if topo.is_ring else topo.n_sites + 1
    g = rng.integers(0, 2, topo.n_sites).astype(np.uint8) if gamma is None else np.array(gamma, np.uint8)
    z = rng.integers(0, 2, n_bonds).astype(np.uint8) if zeta is None else np.array(zeta, np.uint8)
    if g.size != topo.n_sites or z.size != n_bonds:
        raise ValueError("spin word lengths do not match the topology")
    g0, z0 = g.copy(), z.copy()
    line = np.array(stack.lines[0], copy=True)
    n_ev = len(omega)
    jumps = np.full((n_ev, 1, 2), -1, np.int64)
    gf = np.empty(n_ev, np.int64)
    zf = np.empty(n_ev, np.int64)
    K.run_augmented(kind.code, line, g, z, np.ascontiguousarray(omega.locations), topo.is_ring, jumps, gf, zf)
    return Trajectory(
        kind, stack, omega, jumps, OrderedStack(topo, line[None, :]),
        gamma0=g0, zeta0=z0, gamma_flips=gf, zeta_flips=zf, gamma_final=g, zeta_final=z,
    )


def recover_points(traj: Trajectory) -> PointProcess:
    """Rebuild the marks from the observed (state, spins) trajectory alone.

    HAD: marks are where a particle arrives or ``gamma`` flips.  TASEP: bond
    ``x`` is marked at ``t`` when ``(eta(r), gamma(r), zeta(x))`` at ``t-``
    differs from ``(eta_t(r) * eta_{t-}(r), gamma_t(r), zeta_t(x))``, ``r`` being
    the site right of ``x``; only a particle leaving ``r`` registers in the
    first coordinate.
    """
    if not traj.augmented:
        raise ValueError("point recovery needs an augmented trajectory")
    topo = traj.topology
    locs, times = [], []
    bonds = right = topo.bonds
    for e, (eb, gb, zb), (ea, ga, za) in traj.replay():
        t = traj.marks.times[e]
        if traj.kind.name == "had":
            arrive = (eb[0] == 0) & (ea[0] == 1)
            hit = np.flatnonzero(arrive | (gb != ga))
        else:
            before = np.stack([eb[0][right], gb[right], zb[bonds]])
            after = np.stack([ea[0][right] * eb[0][right], ga[right], za[bonds]])
            hit = bonds[np.any(before != after, axis=0)]
        for x in hit:
            locs.append(int(x))
            times.append(t)
    return PointProcess(topo, locs, times, traj.marks.horizon, traj.marks.location_kind)


# --------------------------------------------------------- ordering search


def find_ordering_violation(kind: DynamicsKind, max_sites: int = 4, ring: bool = False):
    """Exhaustively look for an ordered 2-stack and a mark set whose update breaks order.

    Searches sizes ``2..max_sites`` in increasing order and returns the first
    hit as a dict (topology, lower, upper, marks, results), or ``None``.
    """
    import itertools

    for size in range(2, max_sites + 1):
        topo = Topology.ring(size) if ring else Topology.segment(size, 0)
        bonds = list(topo.bonds)
        words = list(itertools.product((0, 1), repeat=size))
        for lo in words:
            for hi in words:
                if any(a > b for a, b in zip(lo, hi)):
                    continue
                stack = OrderedStack(topo, np.array([lo, hi], np.uint8))
                for r in range(1, len(bonds) + 1):
                    for marks in itertools.combinations(bonds, r):
                        lines, _ = _as_lines(stack)
                        locs = np.array(marks, np.int64)
                        jumps = np.full((locs.size, 2, 2), -1, np.int64)
                        if kind.discrete:
                            _tick(kind, lines, locs, topo.is_ring, jumps)
                        else:
                            K.run_stack(kind.code, lines, locs, np.zeros(locs.size, np.uint8), topo.is_ring, jumps)
                        if np.any(lines[0] > lines[1]):
                            return {
                                "kind": str(kind),
                                "topology": str(topo),
                                "lower": list(lo),
                                "upper": list(hi),
                                "marks": [int(b) for b in marks],
                                "lower_after": lines[0].tolist(),
                                "upper_after": lines[1].tolist(),
                            }
    return None


def stack_after(kind: DynamicsKind, stack: OrderedStack, omega: PointProcess) -> np.ndarray:
    """Final lines without building a trajectory (no recording)."""
    lines = np.array(stack.lines, copy=True)
    K.run_stack_final(kind.code, lines, np.ascontiguousarray(omega.locations), omega.flag_array().copy(), stack.topology.is_ring)
    return lines


def multiclass_from_lines(topology: Topology, lines: np.ndarray) -> MulticlassConfig:
    return r_map(OrderedStack(topology, lines))
