"""Dual points, time reversal and multi-line processes.

Every mark of a HAD or TASEP trajectory has a dual point at the same time:

* HAD: the site the summoned particle left, ``i(eta_{t-}, j)`` (the mark's
  own site for a null jump).
* TASEP: bond ``x`` when the site right of ``x`` holds a particle just
  before the mark, bond ``x + 1`` otherwise.

Run backwards in time and reflected in space, the trajectory is again a HAD
(or TASEP) trajectory, now driven by the reflected dual points.  Stacking
lines so that each is driven by the duals of the line below gives the
multi-line process; it is evolved here by the local cascade, with the
dual-point recursion kept as an independent cross-check.

On a segment a HAD bell with no particle to its left has dual ``-1`` and a
TASEP mark on the last bond with a hole on its right has dual
``n_sites``; both are virtual locations on which marks are null events.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .dynamics import DynamicsKind, PointProcess, Trajectory, evolve
from .lattice import Configuration, OrderedStack, Topology
from .queues import Boundary, UnstableQueueError, _t_map_array

__all__ = [
    "IdentityReport",
    "MultiLineState",
    "MultiLineTrajectory",
    "ReversalReport",
    "dual_points",
    "had_dual_points",
    "multiline_by_recursion",
    "multiline_evolve",
    "multiline_local_step",
    "reverse_check",
    "t_image_check",
    "tasep_dual_points",
]


def _pick_line(traj: Trajectory, line) -> int:
    n = traj.initial.n
    if line is None:
        line = n - 1
    if not -n <= line < n:
        raise IndexError(f"line {line} out of range for {n} lines")
    return line % n


def _duals(code: int, traj: Trajectory, line) -> PointProcess:
    k = _pick_line(traj, line)
    topo = traj.topology
    state = np.array(traj.initial.lines[k], copy=True)
    out = np.empty(traj.n_events, np.int64)
    K.trace_duals(code, state, np.ascontiguousarray(traj.marks.locations), topo.is_ring, out)
    kind = "site" if code == K.HAD else "bond"
    return PointProcess(topo, out, traj.marks.times, traj.marks.horizon, kind)


def had_dual_points(traj: Trajectory, line=None, include_null: bool = True) -> PointProcess:
    """Dual points of a HAD trajectory (for line ``line``, default the densest).

    ``include_null=False`` drops duals of null jumps; use it for plotting only,
    since the full set is the one with the Poisson law.
    """
    if traj.kind.name != "had":
        raise ValueError(f"HAD dual points need a HAD trajectory, got {traj.kind}")
    pts = _duals(K.HAD, traj, line)
    if include_null:
        return pts
    keep = pts.locations != traj.marks.locations
    return PointProcess(pts.topology, pts.locations[keep], pts.times[keep], pts.horizon, "site")


def tasep_dual_points(traj: Trajectory, line=None) -> PointProcess:
    """Dual points of a TASEP trajectory (for line ``line``, default the densest)."""
    if traj.kind.name != "tasep":
        raise ValueError(f"TASEP dual points need a TASEP trajectory, got {traj.kind}")
    return _duals(K.TASEP, traj, line)


def dual_points(traj: Trajectory, line=None) -> PointProcess:
    if traj.kind.name == "had":
        return had_dual_points(traj, line)
    return tasep_dual_points(traj, line)


# ------------------------------------------------------------------ reversal


@dataclass(frozen=True)
class ReversalReport:
    passed: bool
    n_events: int
    mismatches: int
    first_mismatch: int | None = None

    def __bool__(self):
        return self.passed


def reverse_check(traj: Trajectory, duals: PointProcess, line=None) -> ReversalReport:
    """Replay the reflected, time-reversed trajectory under the reflected duals.

    Starting from the reflection of the final state, the dual of event ``e``
    (taken in reverse order) must carry the reflected state back to the
    reflection of the state just before ``e``.  Ring trajectories only.
    """
    topo = traj.topology
    if not topo.is_ring:
        raise ValueError("reverse_check needs a ring trajectory")
    if traj.kind.name not in ("had", "tasep"):
        raise ValueError("dual points exist for HAD and TASEP only")
    if len(duals) != traj.n_events or not np.array_equal(duals.times, traj.marks.times):
        return ReversalReport(False, traj.n_events, traj.n_events, 0)
    k = _pick_line(traj, line)
    code = traj.kind.code
    n_ev = traj.n_events
    before = np.empty((n_ev, topo.n_sites), np.uint8)
    state = np.array(traj.initial.lines[k], copy=True)
    rec = np.empty(2, np.int64)
    locs = traj.marks.locations
    for e in range(n_ev):
        before[e] = state
        K.apply_mark(code, state, locs[e], 0, True, rec)
    if traj.kind.name == "had":
        rlocs = topo.reflect_site(duals.locations)
    else:
        rlocs = topo.reflect_bond(duals.locations)
    rev = state[::-1].copy()
    bad = 0
    first = None
    for e in range(n_ev - 1, -1, -1):
        K.apply_mark(code, rev, int(rlocs[e]), 0, True, rec)
        if not np.array_equal(rev, before[e][::-1]):
            bad += 1
            if first is None:
                first = e
            rev = before[e][::-1].copy()
    return ReversalReport(bad == 0, n_ev, bad, first)


# ---------------------------------------------------------------- multi-line


@dataclass(frozen=True, eq=False)
class MultiLineState:
    """``n`` lines on one topology, not necessarily ordered.

    ``lines[n-1]`` is the line driven by the original marks; line ``k`` is
    driven by the duals of line ``k + 1``.
    """

    topology: Topology
    lines: np.ndarray
    densities: tuple | None = None

    def __post_init__(self):
        arr = np.array(np.atleast_2d(self.lines), dtype=np.uint8, copy=True)
        if arr.shape[1] != self.topology.n_sites:
            raise ValueError("line length does not match topology")
        if arr.size and arr.max() > 1:
            raise ValueError("lines must be 0/1")
        if self.densities is not None and len(self.densities) != arr.shape[0]:
            raise ValueError("one density per line")
        arr.setflags(write=False)
        object.__setattr__(self, "lines", arr)

    @classmethod
    def from_configurations(cls, configs, densities=None) -> MultiLineState:
        configs = list(configs)
        topo = configs[0].topology
        if any(c.topology != topo for c in configs):
            raise ValueError("lines live on different topologies")
        return cls(topo, np.stack([c.occupancy for c in configs]), densities)

    def __eq__(self, other):
        if not isinstance(other, MultiLineState):
            return NotImplemented
        return self.topology == other.topology and np.array_equal(self.lines, other.lines)

    @property
    def n(self) -> int:
        return self.lines.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return self.lines.sum(axis=1)

    def line(self, k: int) -> Configuration:
        return Configuration(self.topology, self.lines[k])


def _check_multiline(kind: DynamicsKind, state: MultiLineState):
    if kind.name not in ("had", "tasep"):
        raise ValueError("multi-line processes exist for HAD and TASEP only")
    if kind.name == "had" and state.topology.is_ring and np.any(state.counts == 0):
        raise ValueError("multi-line HAD on a ring needs every line non-empty")


def multiline_local_step(state: MultiLineState, kind: DynamicsKind, mark: int):
    """Apply one mark through the local cascade.

    Returns the new state and the marks seen by each line (index ``k`` is the
    mark that moved line ``k``).
    """
    _check_multiline(kind, state)
    lines = np.array(state.lines, copy=True)
    cascade = np.empty((1, state.n), np.int64)
    jumps = np.empty((1, state.n, 2), np.int64)
    K.multiline_run(kind.code, lines, np.array([mark], np.int64), state.topology.is_ring, cascade, jumps)
    return MultiLineState(state.topology, lines, state.densities), tuple(int(m) for m in cascade[0])


@dataclass(frozen=True, eq=False)
class MultiLineTrajectory:
    kind: DynamicsKind
    initial: MultiLineState
    marks: PointProcess
    cascade: np.ndarray
    jumps: np.ndarray
    final: MultiLineState

    @property
    def n_events(self) -> int:
        return len(self.marks)

    def point_set(self, k: int) -> PointProcess:
        """Marks governing line ``k`` (line ``n - 1`` gets the original marks)."""
        return PointProcess(
            self.initial.topology,
            self.cascade[:, k],
            self.marks.times,
            self.marks.horizon,
            self.marks.location_kind,
        )

    def point_sets(self) -> list[PointProcess]:
        return [self.point_set(k) for k in range(self.initial.n)]

    def line_trajectory(self, k: int) -> Trajectory:
        stack = OrderedStack(self.initial.topology, self.initial.lines[k][None, :])
        final = OrderedStack(self.initial.topology, self.final.lines[k][None, :])
        return Trajectory(self.kind, stack, self.point_set(k), self.jumps[:, k : k + 1], final)

    def states(self):
        """Yield the lines after each event (fresh copies)."""
        lines = np.array(self.initial.lines, copy=True)
        for e in range(self.n_events):
            for k in range(lines.shape[0]):
                src, dst = self.jumps[e, k]
                if src >= 0:
                    lines[k, src] = 0
                    lines[k, dst] = 1
            yield lines.copy()


def multiline_evolve(state0: MultiLineState, kind: DynamicsKind, omega: PointProcess, horizon=None) -> MultiLineTrajectory:
    """Evolve the multi-line process by the local cascade at every mark."""
    _check_multiline(kind, state0)
    if omega.topology != state0.topology:
        raise ValueError("marks and state live on different topologies")
    if omega.location_kind != kind.location_kind:
        raise ValueError(f"{kind} needs {kind.location_kind} marks")
    if horizon is not None and len(omega):
        if omega.times[0] < horizon[0] or omega.times[-1] > horizon[1]:
            raise ValueError("mark outside horizon")
    lines = np.array(state0.lines, copy=True)
    n_ev = len(omega)
    cascade = np.empty((n_ev, state0.n), np.int64)
    jumps = np.empty((n_ev, state0.n, 2), np.int64)
    K.multiline_run(kind.code, lines, np.ascontiguousarray(omega.locations), state0.topology.is_ring, cascade, jumps)
    final = MultiLineState(state0.topology, lines, state0.densities)
    return MultiLineTrajectory(kind, state0, omega, cascade, jumps, final)


def multiline_by_recursion(state0: MultiLineState, kind: DynamicsKind, omega: PointProcess):
    """The same process built top-down from whole trajectories.

    Line ``n - 1`` is run under ``omega``; its dual points drive line
    ``n - 2``, and so on.  Returns ``(final_lines, point_sets)``.
    """
    _check_multiline(kind, state0)
    n = state0.n
    finals = [None] * n
    sets = [None] * n
    marks = omega
    for k in range(n - 1, -1, -1):
        sets[k] = marks
        traj = evolve(kind, Configuration(state0.topology, state0.lines[k]), marks)
        finals[k] = traj.final.lines[0]
        marks = dual_points(traj, 0)
    return np.stack(finals), sets


# --------------------------------------------------------- T-image identity


@dataclass(frozen=True)
class IdentityReport:
    passed: bool
    n_events: int
    mismatches: int
    first_mismatch: int | None = None

    def __bool__(self):
        return self.passed


def t_image_check(mltraj: MultiLineTrajectory) -> IdentityReport:
    """Check that the tandem image of the multi-line state is the coupled
    trajectory started from the tandem image of the initial lines.

    Compared after every event, sitewise.  Needs a ring and strictly
    increasing line counts (for the periodic queues).
    """
    topo = mltraj.initial.topology
    if not topo.is_ring:
        raise ValueError("t_image_check needs a ring")
    counts = mltraj.initial.counts
    if np.any(np.diff(counts) <= 0):
        raise UnstableQueueError("line counts must be strictly increasing")
    eta0 = OrderedStack(topo, _t_map_array(np.asarray(mltraj.initial.lines), topo, Boundary.loynes()))
    coupled = evolve(mltraj.kind, eta0, mltraj.marks)
    bad = 0
    first = None
    for e, (alpha, (_, eta, _)) in enumerate(zip(mltraj.states(), _coupled_states(coupled))):
        image = _t_map_array(alpha, topo, Boundary.loynes())
        if not np.array_equal(image, eta):
            bad += 1
            if first is None:
                first = e
    return IdentityReport(bad == 0, mltraj.n_events, bad, first)


def _coupled_states(traj: Trajectory):
    for e, _, after in traj.replay():
        yield e, after, None

