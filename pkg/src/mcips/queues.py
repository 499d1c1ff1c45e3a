"""Discrete-time ./M/1 queues in tandem and the multiclass measures they build.

A pair of configurations ``(a1, a2)`` on a common topology is read as a
queue in discrete time: sites are time steps, particles of ``a1`` are
arrivals and particles of ``a2`` are potential services.  The queue length
just after step ``j`` is ``Z(j) = (Z(j-1) + a1(j) - a2(j))^+`` and a
departure happens at ``j`` when ``a2(j) = 1`` and ``Z(j-1) + a1(j) > 0``
(a customer may arrive and leave in the same step).

The left-edge queue length is fixed by a :class:`Boundary`:

* ``Boundary.empty()``  -- ``Z = 0`` before the first site (segments).
* ``Boundary.geometric(rho1, rho2, seed)`` -- drawn from the exact
  stationary law, so the segment queue is stationary from its first site.
* ``Boundary.loynes()`` -- on a ring, the periodic solution; on a segment the
  supremum runs over the segment only, which coincides with ``empty``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .lattice import (
    Configuration,
    MulticlassConfig,
    OrderedStack,
    Topology,
    as_rng,
    check_density,
)

__all__ = [
    "Boundary",
    "ClassSplit",
    "QueueLengthLaw",
    "QueueLengths",
    "UnstableQueueError",
    "birth_death_stationary",
    "class_split_step",
    "class_splits",
    "default_burn_in",
    "departures",
    "geometric_stationary",
    "m_map",
    "queue_lengths",
    "sample_measure",
    "t_map",
    "tandem",
]


class UnstableQueueError(ValueError):
    """Raised when a ring queue has no periodic solution (arrivals >= services)."""


@dataclass(frozen=True)
class Boundary:
    kind: str = "empty"
    rho1: float | None = None
    rho2: float | None = None
    seed: object = None

    def __post_init__(self):
        if self.kind not in ("empty", "geometric", "loynes"):
            raise ValueError(f"unknown boundary {self.kind!r}")

    @classmethod
    def empty(cls) -> Boundary:
        return cls("empty")

    @classmethod
    def loynes(cls) -> Boundary:
        return cls("loynes")

    @classmethod
    def geometric(cls, rho1=None, rho2=None, seed=None) -> Boundary:
        """Stationary left edge.  Densities default to the empirical ones."""
        return cls("geometric", rho1, rho2, seed)

    @classmethod
    def parse(cls, text: str) -> Boundary:
        text = text.strip().lower()
        if text in ("empty", "loynes", "geometric"):
            return cls(text)
        raise ValueError(f"unknown boundary {text!r}; use empty, geometric or loynes")


@dataclass(frozen=True, eq=False)
class QueueLengths:
    topology: Topology
    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=np.int64)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    def __eq__(self, other):
        if not isinstance(other, QueueLengths):
            return NotImplemented
        return self.topology == other.topology and np.array_equal(self.z, other.z)


@dataclass(frozen=True)
class ClassSplit:
    """Partition of line ``k`` into classes ``1..k`` (``parts[r-1]`` is class r)."""

    k: int
    parts: tuple

    def total(self) -> Configuration:
        topo = self.parts[0].topology
        return Configuration(topo, np.sum([p.occupancy for p in self.parts], axis=0))


# ------------------------------------------------------------ stationary law


@dataclass(frozen=True)
class QueueLengthLaw:
    """Geometric law ``P(Z = k) = (1 - ratio) * ratio**k`` on ``k >= 0``."""

    ratio: float
    norm: float

    def pmf(self, k):
        k = np.asarray(k)
        return np.where(k >= 0, self.norm * self.ratio ** np.maximum(k, 0), 0.0)

    def sf(self, k):
        """``P(Z >= k)``."""
        return self.ratio ** np.maximum(np.asarray(k), 0)

    def sample(self, rng, size=None):
        rng = as_rng(rng)
        if self.ratio == 0.0:
            return np.zeros(size, dtype=np.int64) if size is not None else 0
        # numpy's geometric counts trials, starting at 1
        return rng.geometric(1.0 - self.ratio, size=size) - 1

    def truncation_level(self, tail: float) -> int:
        """Smallest K with ``P(Z >= K) < tail``."""
        if self.ratio == 0.0:
            return 1
        return int(math.floor(math.log(tail) / math.log(self.ratio))) + 1


def _step_probs(rho1, rho2):
    up = rho1 * (1.0 - rho2)
    down = rho2 * (1.0 - rho1)
    return up, down


def geometric_stationary(rho1: float, rho2: float) -> QueueLengthLaw:
    """Exact stationary law of the queue length for Bernoulli inputs.

    The chain moves up with probability ``rho1 (1 - rho2)`` and down (when
    positive) with probability ``rho2 (1 - rho1)``, so detailed balance gives a
    geometric law with ratio ``rho1 (1 - rho2) / (rho2 (1 - rho1))``.  Note
    this is not ``rho1 / rho2``: the simple ratio is the continuous-time
    answer and does not make the discrete departure process Bernoulli.
    """
    rho1 = check_density(rho1, "rho1")
    rho2 = check_density(rho2, "rho2")
    if rho1 >= rho2:
        raise UnstableQueueError(f"unstable queue: rho1={rho1} >= rho2={rho2}")
    up, down = _step_probs(rho1, rho2)
    ratio = up / down
    # sum_k ratio^k computed, then inverted
    norm = 1.0 / math.fsum([1.0, ratio / (1.0 - ratio)])
    return QueueLengthLaw(ratio, norm)


def birth_death_stationary(rho1: float, rho2: float, K: int = 60) -> np.ndarray:
    """Stationary vector of the queue-length chain truncated at ``K`` states.

    Solves ``pi P = pi, sum(pi) = 1`` for the explicit transition matrix on
    ``0..K-1`` (reflecting at the top).  Independent of
    :func:`geometric_stationary`; used as its oracle.
    """
    up, down = _step_probs(rho1, rho2)
    P = np.zeros((K, K))
    for k in range(K):
        if k + 1 < K:
            P[k, k + 1] = up
        if k > 0:
            P[k, k - 1] = down
        P[k, k] = 1.0 - P[k].sum()
    A = P.T - np.eye(K)
    A[-1, :] = 1.0
    rhs = np.zeros(K)
    rhs[-1] = 1.0
    return np.linalg.solve(A, rhs)


# ------------------------------------------------------------ queue operators


def _check_pair(a1: Configuration, a2: Configuration):
    if a1.topology != a2.topology:
        raise ValueError("arrival and service configurations are on different topologies")


def _empirical(a: np.ndarray) -> float:
    return min(max(float(a.mean()), 1e-12), 1 - 1e-12)


def _z_start(a1, a2, boundary: Boundary, rng=None):
    if boundary.kind != "geometric":
        return 0
    r1 = boundary.rho1 if boundary.rho1 is not None else _empirical(a1)
    r2 = boundary.rho2 if boundary.rho2 is not None else _empirical(a2)
    law = geometric_stationary(r1, r2)
    return int(law.sample(rng if rng is not None else boundary.seed))


def _run(a1: np.ndarray, a2: np.ndarray, topo: Topology, boundary: Boundary, rng=None):
    z = np.empty(a1.shape[0], np.int64)
    d = np.empty(a1.shape[0], np.uint8)
    if topo.is_ring:
        if boundary.kind != "loynes":
            raise ValueError("queues on a ring need the loynes boundary")
        c1, c2 = int(a1.sum()), int(a2.sum())
        if c1 >= c2:
            raise UnstableQueueError(
                f"ring queue unstable: {c1} arrivals >= {c2} services"
            )
        back = K.ring_loynes(a1, a2, z, d)
        assert back == 0
    else:
        K.queue_run(a1, a2, _z_start(a1, a2, boundary, rng), z, d)
    return z, d


def queue_lengths(a1: Configuration, a2: Configuration, boundary: Boundary | None = None) -> QueueLengths:
    """Queue length just after each site for arrivals ``a1``, services ``a2``."""
    _check_pair(a1, a2)
    boundary = boundary or _default_boundary(a1.topology)
    z, _ = _run(a1.occupancy, a2.occupancy, a1.topology, boundary)
    return QueueLengths(a1.topology, z)


def departures(a1: Configuration, a2: Configuration, boundary: Boundary | None = None) -> Configuration:
    """The departure configuration ``D(a1, a2)``."""
    _check_pair(a1, a2)
    boundary = boundary or _default_boundary(a1.topology)
    _, d = _run(a1.occupancy, a2.occupancy, a1.topology, boundary)
    return Configuration(a1.topology, d)


def _default_boundary(topo: Topology) -> Boundary:
    return Boundary.loynes() if topo.is_ring else Boundary.empty()


def _tandem_arrays(lines: np.ndarray, topo: Topology, boundary: Boundary, rhos=None, rng=None):
    out = lines[0]
    for k in range(1, lines.shape[0]):
        b = boundary
        if boundary.kind == "geometric" and rhos is not None:
            # arrivals into every queue of the chain have the first density
            b = Boundary("geometric", rhos[0], rhos[k])
        _, out = _run(np.ascontiguousarray(out), np.ascontiguousarray(lines[k]), topo, b, rng)
    return out


def _lines_array(lines) -> tuple[np.ndarray, Topology]:
    lines = list(lines)
    if not lines:
        raise ValueError("need at least one line")
    topo = lines[0].topology
    if any(c.topology != topo for c in lines):
        raise ValueError("lines live on different topologies")
    return np.stack([c.occupancy for c in lines]), topo


def _geometric_rhos(boundary: Boundary, arr: np.ndarray):
    if boundary.kind != "geometric":
        return None
    if boundary.rho1 is not None and np.ndim(boundary.rho1):
        return list(boundary.rho1)
    return [_empirical(a) for a in arr]


def tandem(lines, boundary: Boundary | None = None) -> Configuration:
    """Departures from ``len(lines) - 1`` queues in tandem.

    ``lines[0]`` feeds the first queue; ``lines[k]`` serves queue ``k``.
    For a geometric boundary, ``boundary.rho1`` may be the full density list.
    """
    arr, topo = _lines_array(lines)
    boundary = boundary or _default_boundary(topo)
    rng = as_rng(boundary.seed) if boundary.kind == "geometric" else None
    out = _tandem_arrays(arr, topo, boundary, _geometric_rhos(boundary, arr), rng)
    return Configuration(topo, out)


def _t_map_array(arr: np.ndarray, topo: Topology, boundary: Boundary) -> np.ndarray:
    n = arr.shape[0]
    rhos = _geometric_rhos(boundary, arr)
    rng = as_rng(boundary.seed) if boundary.kind == "geometric" else None
    out = np.empty_like(arr)
    for k in range(n):
        sub = rhos[k:] if rhos is not None else None
        out[k] = _tandem_arrays(arr[k:], topo, boundary, sub, rng)
    return out


def t_map(alpha, boundary: Boundary | None = None) -> OrderedStack:
    """Ordered stack whose line ``k`` is the tandem output of ``alpha[k:]``.

    With a geometric boundary each tandem draws its own left-edge queues, so
    every line is exactly stationary but the joint law near the edge is not;
    use an empty boundary plus a burn-in when the joint law matters.
    """
    arr, topo = _lines_array(alpha)
    boundary = boundary or _default_boundary(topo)
    return OrderedStack(topo, _t_map_array(arr, topo, boundary))


def class_split_step(prev: ClassSplit, ak: Configuration, boundary: Boundary | None = None) -> ClassSplit:
    """Split line ``k`` into classes given the split of line ``k - 1``.

    Class ``r`` customers arriving from the previous line are served by the
    services of ``ak`` left over after classes ``1..r-1``; unused services
    become class ``k``.
    """
    topo = ak.topology
    boundary = boundary or _default_boundary(topo)
    if boundary.kind == "geometric":
        raise ValueError("the class split needs an empty or loynes boundary")
    prev_arr = np.stack([p.occupancy for p in prev.parts])
    if prev_arr.shape[0] != prev.k:
        raise ValueError("inconsistent split: number of parts differs from k")
    if np.any(prev_arr.sum(axis=0) > 1):
        raise ValueError("inconsistent split: parts overlap")
    a_prev = prev_arr.sum(axis=0).astype(np.uint8)
    a = ak.occupancy
    remaining = a.astype(np.uint8).copy()
    parts = []
    for r in range(prev.k):
        _, d = _run(np.ascontiguousarray(prev_arr[r]), remaining, topo, boundary)
        parts.append(d)
        remaining = (remaining - d).astype(np.uint8)
    _, used = _run(a_prev, a.copy(), topo, boundary)
    last = (a - used).astype(np.uint8)
    if not np.array_equal(last, remaining):
        # holds whenever the per-class queues share the boundary convention
        raise AssertionError("class split: leftover services disagree with total departures")
    parts.append(last)
    return ClassSplit(prev.k + 1, tuple(Configuration(topo, p) for p in parts))


def class_splits(alpha, boundary: Boundary | None = None) -> list[ClassSplit]:
    """All splits ``k = 1..n``, starting from ``alpha[0]`` as a single class."""
    alpha = list(alpha)
    splits = [ClassSplit(1, (alpha[0],))]
    for ak in alpha[1:]:
        splits.append(class_split_step(splits[-1], ak, boundary))
    return splits


def _m_map_array(arr: np.ndarray, topo: Topology, boundary: Boundary) -> np.ndarray:
    """Class word from stacked lines; same recursion as :func:`class_split_step`."""
    n = arr.shape[0]
    classes = np.where(arr[0] == 1, 1, n + 1).astype(np.uint8)
    for k in range(1, n):
        remaining = arr[k].copy()
        new = np.full(arr.shape[1], n + 1, np.uint8)
        for r in range(1, k + 1):
            prev = np.ascontiguousarray((classes == r).astype(np.uint8))
            _, d = _run(prev, remaining, topo, boundary)
            new[d == 1] = r
            remaining -= d
        new[remaining == 1] = k + 1
        classes = new
    return classes


def m_map(alpha, boundary: Boundary | None = None) -> MulticlassConfig:
    """Multiclass configuration read off the class split of the last line."""
    alpha = list(alpha)
    arr, topo = _lines_array(alpha)
    boundary = boundary or _default_boundary(topo)
    if boundary.kind == "geometric":
        raise ValueError("the class split needs an empty or loynes boundary")
    return MulticlassConfig(topo, _m_map_array(arr, topo, boundary), arr.shape[0])


def default_burn_in(densities) -> int:
    """Left burn-in for segment constructions: ``ceil(20 / min density gap)``."""
    d = np.asarray(densities, dtype=float)
    if d.size < 2:
        return 0
    gap = np.min(np.diff(np.sort(d)))
    if gap <= 0:
        raise ValueError("densities must be distinct")
    return int(math.ceil(20.0 / gap))


def sample_measure(densities, topology: Topology, seed=None, max_tries: int = 1000) -> MulticlassConfig:
    """Draw one configuration from the multiclass measure with these densities.

    On a segment the lines are Bernoulli and the queues start empty at the
    left edge (callers discard a burn-in, see :func:`default_burn_in`).  On a
    ring the lines are Bernoulli conditioned on strictly increasing counts,
    with periodic queues.
    """
    from .lattice import sample_bernoulli

    dens = [check_density(r) for r in densities]
    if any(b <= a for a, b in zip(dens, dens[1:])):
        raise ValueError("densities must be strictly increasing")
    rng = as_rng(seed)
    for _ in range(max_tries):
        alpha = [sample_bernoulli(r, topology, rng) for r in dens]
        counts = [a.count for a in alpha]
        if topology.is_ring and any(b <= a for a, b in zip(counts, counts[1:])):
            continue
        boundary = Boundary.loynes() if topology.is_ring else Boundary.empty()
        return m_map(alpha, boundary)
    raise RuntimeError("could not draw lines with increasing counts; ring too small?")
