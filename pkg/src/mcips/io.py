"""Text formats for configurations, point sets, event logs and run records.

* Configurations: one line of ``0``/``1`` per line of a stack.
* Class words: digits ``1-9``, then ``a-z`` and ``A-Z`` for classes 10 to
  61, ``.`` for the hole class ``n + 1``.
* Both may start with ``# key=value`` header lines (topology, n, metadata).
* Point sets: ``# key=value`` header, then one ``location time`` line per
  mark (a third ``flag`` column for ASEP).  Sites are written as labels,
  bonds as half-integers (bond ``b`` sits between labels ``b - 1`` and
  ``b`` and is written ``b - 0.5``).  Times use ``repr`` so they round-trip.
* Event logs: JSON lines, a header record then one record per event.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .dynamics import DynamicsKind, PointProcess, Trajectory
from .lattice import Configuration, MulticlassConfig, OrderedStack, Topology

__all__ = [
    "class_symbol",
    "format_configuration",
    "format_multiclass",
    "format_points",
    "format_stack",
    "parse_configuration",
    "parse_multiclass",
    "parse_points",
    "parse_stack",
    "read_events",
    "read_multiclass",
    "read_points",
    "symbol_class",
    "versions",
    "write_csv",
    "write_events",
    "write_manifest",
    "write_multiclass",
    "write_plot_data",
    "write_points",
]

_SYMBOLS = "123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def class_symbol(c: int, n: int) -> str:
    if c == n + 1:
        return "."
    if not 1 <= c <= len(_SYMBOLS):
        raise ValueError(f"class {c} has no symbol")
    return _SYMBOLS[c - 1]


def symbol_class(ch: str, n: int) -> int:
    if ch == ".":
        return n + 1
    i = _SYMBOLS.find(ch)
    if i < 0:
        raise ValueError(f"unknown class symbol {ch!r}")
    return i + 1


def _header(meta: dict) -> list[str]:
    return [f"# {k}={v}" for k, v in meta.items()]


def _split_header(text: str):
    meta, body = {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = val.strip()
            continue
        body.append(line)
    return meta, body


def format_configuration(c: Configuration) -> str:
    return "".join("1" if v else "0" for v in c.occupancy)


def parse_configuration(text: str, topology: Topology) -> Configuration:
    word = text.strip()
    if set(word) - {"0", "1"}:
        raise ValueError("configuration lines may contain only 0 and 1")
    return Configuration(topology, np.frombuffer(word.encode(), np.uint8) - ord("0"))


def format_stack(stack: OrderedStack, meta: dict | None = None) -> str:
    head = _header({"topology": stack.topology, "n": stack.n, **(meta or {})})
    body = [format_configuration(stack.line(k)) for k in range(stack.n)]
    return "\n".join(head + body) + "\n"


def parse_stack(text: str, topology: Topology | None = None) -> OrderedStack:
    meta, body = _split_header(text)
    topo = topology or _topology_from(meta, len(body[0]) if body else 0)
    return OrderedStack.from_configurations([parse_configuration(b, topo) for b in body])


def _topology_from(meta: dict, length: int) -> Topology:
    if "topology" in meta:
        return Topology.parse(meta["topology"])
    return Topology.segment(length, 0)


def format_multiclass(xi: MulticlassConfig, meta: dict | None = None) -> str:
    if xi.n > len(_SYMBOLS):
        raise ValueError(f"the text format holds at most {len(_SYMBOLS)} classes")
    head = _header({"topology": xi.topology, "n": xi.n, **(meta or {})})
    word = "".join(class_symbol(int(c), xi.n) for c in xi.classes)
    return "\n".join(head + [word]) + "\n"


def parse_multiclass(text: str, n: int | None = None, topology: Topology | None = None):
    """Return ``(MulticlassConfig, header dict)``."""
    meta, body = _split_header(text)
    if len(body) != 1:
        raise ValueError("a class-word file holds exactly one word")
    word = body[0]
    if n is None:
        if "n" not in meta:
            raise ValueError("class count n missing from header")
        n = int(meta["n"])
    topo = topology or _topology_from(meta, len(word))
    classes = np.array([symbol_class(ch, n) for ch in word], np.uint8)
    return MulticlassConfig(topo, classes, n), meta


def write_multiclass(path, xi: MulticlassConfig, meta: dict | None = None):
    _write_text(path, format_multiclass(xi, meta))


def read_multiclass(path, n: int | None = None):
    return parse_multiclass(_read_text(path), n)


# ---------------------------------------------------------------- points


def _loc_text(pp: PointProcess, loc: int) -> str:
    label = pp.topology.label(int(loc))
    if pp.location_kind == "site":
        return str(label)
    return repr(label - 0.5)


def format_points(pp: PointProcess) -> str:
    meta = {
        "topology": pp.topology,
        "kind": pp.location_kind,
        "horizon": f"{pp.horizon[0]!r},{pp.horizon[1]!r}",
        "discrete": int(pp.discrete),
        "count": len(pp),
    }
    lines = _header(meta)
    flags = pp.flags
    for i, (loc, t) in enumerate(zip(pp.locations, pp.times)):
        row = f"{_loc_text(pp, loc)} {float(t)!r}"
        if flags is not None:
            row += f" {int(flags[i])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def parse_points(text: str, topology: Topology | None = None) -> PointProcess:
    meta, body = _split_header(text)
    topo = topology or Topology.parse(meta["topology"])
    kind = meta.get("kind", "site")
    locs, times, flags = [], [], []
    for row in body:
        parts = row.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"bad point line {row!r}")
        if kind == "site":
            lab = int(parts[0])
        else:
            half = float(parts[0]) + 0.5
            if half != int(half):
                raise ValueError(f"bond location {parts[0]} is not a half-integer")
            lab = int(half)
        locs.append(topo.position(lab))
        times.append(float(parts[1]))
        if len(parts) == 3:
            flags.append(int(parts[2]))
    if "horizon" in meta:
        t0, t1 = (float(x) for x in meta["horizon"].split(","))
    else:
        t0, t1 = 0.0, max(times, default=0.0)
    return PointProcess(
        topo, np.array(locs, np.int64), np.array(times), (t0, t1), kind,
        np.array(flags, np.uint8) if flags else None, bool(int(meta.get("discrete", 0))),
    )


def write_points(path, pp: PointProcess):
    _write_text(path, format_points(pp))


def read_points(path, topology: Topology | None = None) -> PointProcess:
    return parse_points(_read_text(path), topology)


# ---------------------------------------------------------------- events


def _class_change(before: np.ndarray, after: np.ndarray):
    n = before.shape[0]
    sites = np.flatnonzero(np.any(before != after, axis=0))
    if sites.size == 0:
        return None
    cb = n + 1 - before[:, sites].sum(0)
    ca = n + 1 - after[:, sites].sum(0)
    return {"sites": sites.tolist(), "before": cb.tolist(), "after": ca.tolist()}


def write_events(path, traj: Trajectory, meta: dict | None = None):
    """JSON-lines event log: header record, then one record per event."""
    topo = traj.topology
    head = {
        "type": "header",
        "kind": str(traj.kind),
        "topology": str(topo),
        "n": traj.initial.n,
        "initial": [format_configuration(traj.initial.line(k)) for k in range(traj.initial.n)],
        "location_kind": traj.marks.location_kind,
        "horizon": list(traj.marks.horizon),
        "events": traj.n_events,
        **(meta or {}),
    }
    flags = traj.marks.flags
    with _open(path, "w") as fh:
        fh.write(json.dumps(head) + "\n")
        for e, before, after in traj.replay():
            jumps = [None if src < 0 else [int(src), int(dst)] for src, dst in traj.jumps[e]]
            rec = {
                "time": float(traj.marks.times[e]),
                "location": int(traj.marks.locations[e]),
                "jumps": jumps,
                "classes": _class_change(before, after),
            }
            if flags is not None:
                rec["flag"] = int(flags[e])
            fh.write(json.dumps(rec) + "\n")


def read_events(path):
    """Return ``(header, initial stack, PointProcess of marks, jumps array)``."""
    with _open(path, "r") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if not records or records[0].get("type") != "header":
        raise ValueError(f"{path}: missing header record")
    head, events = records[0], records[1:]
    topo = Topology.parse(head["topology"])
    stack = OrderedStack.from_configurations([parse_configuration(w, topo) for w in head["initial"]])
    kind = DynamicsKind.parse(head["kind"])
    flags = [ev["flag"] for ev in events] if events and "flag" in events[0] else None
    marks = PointProcess(
        topo,
        np.array([ev["location"] for ev in events], np.int64),
        np.array([ev["time"] for ev in events], float),
        tuple(head["horizon"]),
        head["location_kind"],
        flags,
        kind.discrete,
    )
    jumps = np.full((len(events), stack.n, 2), -1, np.int64)
    for e, ev in enumerate(events):
        for k, j in enumerate(ev["jumps"]):
            if j is not None:
                jumps[e, k] = j
    return head, stack, marks, jumps


# ---------------------------------------------------------- tables, plots


def write_csv(path, header, rows):
    """CSV with a header row; an empty ``rows`` gives a header-only file."""
    with _open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def write_plot_data(path, traj: Trajectory, duals: PointProcess | None = None, line: int = -1, samples: int = 50):
    """Space-time plot data, one ``x t symbol`` line per item.

    Symbols: ``p`` particle position (sampled at ``samples`` times), ``m``
    mark, ``d`` dual point.  Bonds are written at half-integer ``x``.
    """
    topo = traj.topology
    t0, t1 = traj.marks.horizon
    out = ["# x t symbol"]
    grid = np.linspace(t0, t1, samples) if t1 > t0 else np.array([t0])
    k = line % traj.initial.n
    for t in grid:
        state = traj.state_at(t)[k]
        for x in np.flatnonzero(state):
            out.append(f"{topo.label(int(x))} {t!r} p")
    for pp, sym in ((traj.marks, "m"), (duals, "d")):
        if pp is None:
            continue
        for loc, t in zip(pp.locations, pp.times):
            out.append(f"{_loc_text(pp, loc)} {float(t)!r} {sym}")
    _write_text(path, "\n".join(out) + "\n")


def versions() -> dict:
    import numba
    import scipy

    from . import __version__

    return {
        "mcips": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def write_manifest(path, config: dict, seeds, outputs=None, extra=None):
    record = {"config": config, "versions": versions(), "seeds": seeds, "outputs": outputs or []}
    if extra:
        record.update(extra)
    _write_text(path, json.dumps(record, indent=2, sort_keys=True, default=str) + "\n")


def _open(path, mode, **kw):
    try:
        return open(path, mode, encoding="utf-8", **kw)
    except OSError as exc:
        raise OSError(f"cannot open {path}: {exc.strerror}") from exc


def _write_text(path, text: str):
    with _open(path, "w") as fh:
        fh.write(text)


def _read_text(path) -> str:
    with _open(path, "r") as fh:
        return fh.read()


def ensure_parent(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
