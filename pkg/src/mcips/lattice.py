"""Configuration spaces on finite lattices.

Everything lives on one of two finite topologies:

* ``Ring(L)``: sites ``0 .. L-1`` with periodic wrap.
* ``Segment(L, B)``: sites labelled ``-B .. L-1+B``; the observation
  window is ``0 .. L-1`` and the ``B`` sites on either side are buffer.

Internally a configuration is a dense ``uint8`` array indexed by position
``0 .. n_sites-1``; :meth:`Topology.label` converts positions to site labels.

Bonds (used by TASEP-type dynamics) are indexed by the position of the site
on their right: bond ``b`` sits between positions ``b-1`` and ``b``.  On a
ring every ``b`` in ``0 .. L-1`` is a bond.  On a segment the internal bonds
are ``1 .. n_sites-1``; ``0`` and ``n_sites`` are virtual edge bonds on which
any mark is a null event.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Configuration",
    "MulticlassConfig",
    "OrderedStack",
    "Topology",
    "as_rng",
    "check_density",
    "r_inverse",
    "r_map",
    "sample_bernoulli",
    "sample_fixed_count",
    "truncate",
]


def as_rng(seed) -> np.random.Generator:
    """Return a Generator for ``seed`` (int, SeedSequence, Generator or None)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_density(rho: float, name: str = "density") -> float:
    rho = float(rho)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {rho}")
    return rho


def _frozen(arr, dtype=np.uint8) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Topology:
    kind: str
    length: int
    buffer: int = 0

    def __post_init__(self):
        if self.kind not in ("ring", "segment"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.length < 2:
            raise ValueError("topology needs at least 2 sites")
        if self.buffer < 0:
            raise ValueError("buffer length must be non-negative")
        if self.kind == "ring" and self.buffer:
            raise ValueError("a ring has no buffer")

    @classmethod
    def ring(cls, length: int) -> Topology:
        return cls("ring", int(length))

    @classmethod
    def segment(cls, length: int, buffer: int = 0) -> Topology:
        return cls("segment", int(length), int(buffer))

    @classmethod
    def parse(cls, text: str) -> Topology:
        """Parse ``ring:L`` or ``segment:L:B`` (``segment:L`` means B=0)."""
        parts = text.strip().lower().split(":")
        try:
            if parts[0] == "ring" and len(parts) == 2:
                return cls.ring(int(parts[1]))
            if parts[0] == "segment" and len(parts) in (2, 3):
                return cls.segment(int(parts[1]), int(parts[2]) if len(parts) == 3 else 0)
        except ValueError as exc:
            raise ValueError(f"bad topology {text!r}: {exc}") from None
        raise ValueError(f"bad topology {text!r}; expected ring:L or segment:L:B")

    def __str__(self) -> str:
        if self.is_ring:
            return f"ring:{self.length}"
        return f"segment:{self.length}:{self.buffer}"

    @property
    def is_ring(self) -> bool:
        return self.kind == "ring"

    @property
    def n_sites(self) -> int:
        return self.length + 2 * self.buffer

    @property
    def window(self) -> slice:
        """Positions of the observation window."""
        return slice(self.buffer, self.buffer + self.length)

    def label(self, position):
        """Site label of a position (vectorised)."""
        return np.asarray(position) - self.buffer if np.ndim(position) else int(position) - self.buffer

    def position(self, label):
        return np.asarray(label) + self.buffer if np.ndim(label) else int(label) + self.buffer

    @property
    def bonds(self) -> np.ndarray:
        """Bond indices on which marks may be placed."""
        if self.is_ring:
            return np.arange(self.n_sites)
        return np.arange(1, self.n_sites)

    def valid_site(self, pos: int) -> bool:
        # -1 is the virtual site left of a segment (source of empty HAD summons)
        lo = 0 if self.is_ring else -1
        return lo <= pos < self.n_sites

    def valid_bond(self, b: int) -> bool:
        if self.is_ring:
            return 0 <= b < self.n_sites
        return 0 <= b <= self.n_sites

    def reflect_site(self, pos):
        return self.n_sites - 1 - np.asarray(pos)

    def reflect_bond(self, b):
        b = np.asarray(b)
        if self.is_ring:
            return (self.n_sites - b) % self.n_sites
        return self.n_sites - b


@dataclass(frozen=True, eq=False)
class Configuration:
    """A 0/1 occupancy word on a topology."""

    topology: Topology
    occupancy: np.ndarray

    def __post_init__(self):
        occ = _frozen(self.occupancy)
        if occ.ndim != 1 or occ.size != self.topology.n_sites:
            raise ValueError(
                f"occupancy length {occ.size} does not match {self.topology.n_sites} sites"
            )
        if occ.size and occ.max() > 1:
            raise ValueError("occupancy must be 0/1")
        object.__setattr__(self, "occupancy", occ)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.topology == other.topology and np.array_equal(self.occupancy, other.occupancy)

    def __len__(self):
        return self.occupancy.size

    def __repr__(self):
        word = "".join(map(str, self.occupancy[:64]))
        return f"Configuration({self.topology}, {word}{'...' if len(self) > 64 else ''})"

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    def complement(self) -> Configuration:
        return Configuration(self.topology, 1 - self.occupancy)

    def window(self) -> np.ndarray:
        return self.occupancy[self.topology.window]


@dataclass(frozen=True, eq=False)
class OrderedStack:
    """``n`` configurations with ``lines[k] <= lines[k+1]`` sitewise.

    ``lines[0]`` is the sparsest line (the first marginal).
    """

    topology: Topology
    lines: np.ndarray

    def __post_init__(self):
        arr = _frozen(np.atleast_2d(self.lines))
        if arr.shape[1] != self.topology.n_sites:
            raise ValueError("line length does not match topology")
        if arr.size and arr.max() > 1:
            raise ValueError("lines must be 0/1")
        if arr.shape[0] > 1 and np.any(arr[:-1] > arr[1:]):
            k, x = np.argwhere(arr[:-1] > arr[1:])[0]
            raise ValueError(f"unordered stack: line {k} exceeds line {k + 1} at position {x}")
        object.__setattr__(self, "lines", arr)

    @classmethod
    def from_configurations(cls, configs) -> OrderedStack:
        configs = list(configs)
        topo = configs[0].topology
        if any(c.topology != topo for c in configs):
            raise ValueError("configurations live on different topologies")
        return cls(topo, np.stack([c.occupancy for c in configs]))

    def __eq__(self, other):
        if not isinstance(other, OrderedStack):
            return NotImplemented
        return self.topology == other.topology and np.array_equal(self.lines, other.lines)

    def __repr__(self):
        return f"OrderedStack({self.topology}, n={self.n})"

    @property
    def n(self) -> int:
        return self.lines.shape[0]

    def line(self, k: int) -> Configuration:
        return Configuration(self.topology, self.lines[k])

    @property
    def counts(self) -> np.ndarray:
        return self.lines.sum(axis=1)


@dataclass(frozen=True, eq=False)
class MulticlassConfig:
    """A word over ``{1, ..., n+1}``; class ``n+1`` is displayed as a hole."""

    topology: Topology
    classes: np.ndarray
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("class count n must be >= 1")
        if self.n > 254:
            raise ValueError("at most 254 classes are supported")
        cls_ = _frozen(self.classes)
        if cls_.ndim != 1 or cls_.size != self.topology.n_sites:
            raise ValueError("class word length does not match topology")
        if cls_.size and (cls_.min() < 1 or cls_.max() > self.n + 1):
            raise ValueError(f"classes must lie in 1..{self.n + 1}")
        object.__setattr__(self, "classes", cls_)

    def __eq__(self, other):
        if not isinstance(other, MulticlassConfig):
            return NotImplemented
        return (
            self.topology == other.topology
            and self.n == other.n
            and np.array_equal(self.classes, other.classes)
        )

    def __repr__(self):
        return f"MulticlassConfig({self.topology}, n={self.n})"

    def class_counts(self) -> np.ndarray:
        """Counts of classes ``1..n+1`` (index 0 is class 1)."""
        return np.bincount(self.classes, minlength=self.n + 2)[1:]

    def window(self) -> np.ndarray:
        return self.classes[self.topology.window]


def r_map(stack: OrderedStack) -> MulticlassConfig:
    """Recode an ordered stack as a multiclass word: ``n + 1 - sum_k eta^k(x)``."""
    if not isinstance(stack, OrderedStack):
        stack = OrderedStack(stack[0].topology, np.stack([c.occupancy for c in stack]))
    n = stack.n
    classes = n + 1 - stack.lines.sum(axis=0, dtype=np.int64)
    return MulticlassConfig(stack.topology, classes.astype(np.uint8), n)


def r_inverse(xi: MulticlassConfig) -> OrderedStack:
    """The unique ordered stack mapped to ``xi``: line ``k`` holds sites of class ``<= k``."""
    ks = np.arange(1, xi.n + 1, dtype=np.int64)[:, None]
    lines = (xi.classes[None, :] <= ks).astype(np.uint8)
    return OrderedStack(xi.topology, lines)


def truncate(xi: MulticlassConfig, m: int) -> MulticlassConfig:
    """Merge classes above ``m`` into holes: ``min(xi, m + 1)``."""
    if not 1 <= m <= xi.n:
        raise ValueError(f"truncation level m={m} outside 1..{xi.n}")
    return MulticlassConfig(xi.topology, np.minimum(xi.classes, m + 1), m)


def sample_bernoulli(rho: float, topology: Topology, seed=None) -> Configuration:
    """I.i.d. Bernoulli(``rho``) occupancies."""
    rho = check_density(rho)
    rng = as_rng(seed)
    occ = (rng.random(topology.n_sites) < rho).astype(np.uint8)
    return Configuration(topology, occ)


def sample_fixed_count(m: int, topology: Topology, seed=None) -> Configuration:
    """Uniform configuration with exactly ``m`` particles."""
    n_sites = topology.n_sites
    if not 0 <= m <= n_sites:
        raise ValueError(f"particle count {m} outside 0..{n_sites}")
    rng = as_rng(seed)
    occ = np.zeros(n_sites, dtype=np.uint8)
    occ[rng.choice(n_sites, size=m, replace=False)] = 1
    return Configuration(topology, occ)
