"""Command-line front end.

Every subcommand accepts ``--config FILE``: an INI file whose ``[common]``
section and the section named after the subcommand supply defaults for any
long flag (``densities = 0.2,0.5,0.8``).  Flags given on the command line
win.  ``MCIPS_SEED`` supplies the seed when ``--seed`` is absent.

Every run that writes files also writes a manifest (config echo, package
versions, seed) to ``--manifest`` or next to its first output as
``<output>.manifest.json``.

Exit codes: 0 pass, 1 check failed, 2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import io
from . import verification as V
from .duality import (
    MultiLineState,
    dual_points,
    had_dual_points,
    multiline_by_recursion,
    multiline_evolve,
    t_image_check,
)
from .dynamics import (
    DynamicsKind,
    evolve,
    generate_bernoulli_field,
    generate_poisson,
)
from .lattice import MulticlassConfig, Topology, r_inverse, r_map
from .queues import Boundary, UnstableQueueError, _m_map_array, default_burn_in

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

SUITES = ("invariance", "burke", "multiline", "duals", "pathwise", "negative", "simulator", "exact")
# suites whose theorem needs increasing densities
_INCREASING = ("invariance", "burke", "negative")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    kind: DynamicsKind | None = None
    topology: Topology | None = None
    densities: list | None = None
    classes: int | None = None
    horizon: float | None = None
    seed: int | None = None
    boundary: str | None = None
    suite: str | None = None
    outputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    config_file: str | None = None
    overrides: list = field(default_factory=list)

    def echo(self) -> dict:
        d = asdict(self)
        d["kind"] = str(self.kind) if self.kind else None
        d["topology"] = str(self.topology) if self.topology else None
        return d


# ------------------------------------------------------------------ parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _densities(text: str) -> list:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad density list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty density list")
    for v in vals:
        if not 0 < v < 1:
            raise argparse.ArgumentTypeError(f"density {v} outside (0, 1)")
    return vals


def _ints(text: str) -> list:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _topology(text: str) -> Topology:
    try:
        return Topology.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _kind(text: str) -> DynamicsKind:
    try:
        return DynamicsKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p):
    p.add_argument("--config", help="INI file with defaults for any flag")
    p.add_argument("--seed", type=int, help="base seed (default: $MCIPS_SEED)")
    p.add_argument("--manifest", help="write a run manifest (JSON) here")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="mcips", description="Multiclass TASEP/HAD simulation and verification.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    p = sub.add_parser("simulate", help="evolve a multiclass configuration and log events")
    _common(p)
    p.add_argument("--kind", type=_kind, default=DynamicsKind("tasep"))
    p.add_argument("--classes", type=int, default=1)
    p.add_argument("--topology", type=_topology, default=Topology.ring(64))
    p.add_argument("--t", type=float, default=10.0, help="time horizon (ticks for discrete kinds)")
    p.add_argument("--densities", type=_densities)
    p.add_argument("--log", help="JSON-lines event log")
    p.add_argument("--points", help="write the marks as a point file")
    p.add_argument("--out", help="final class word")
    p.add_argument("--plot", help="space-time plot data")
    subs["simulate"] = p

    p = sub.add_parser("construct-measure", help="sample the tandem-queue multiclass measure")
    _common(p)
    p.add_argument("--densities", type=_densities, required=True)
    p.add_argument("--topology", type=_topology, default=Topology.segment(1000, 0))
    p.add_argument("--boundary", choices=("empty", "loynes"))
    p.add_argument("--burn-in", type=int)
    p.add_argument("--out", help="class word file (default stdout)")
    subs["construct-measure"] = p

    p = sub.add_parser("dual-points", help="dual points of a logged trajectory")
    _common(p)
    p.add_argument("--kind", type=_kind, required=True)
    p.add_argument("--in", dest="points_in", required=True, help="point file of the marks")
    p.add_argument("--traj", required=True, help="event log carrying the initial state")
    p.add_argument("--out", required=True)
    p.add_argument("--line", type=int, default=-1)
    p.add_argument("--no-null", action="store_true", help="drop duals of null jumps (plots only)")
    p.add_argument("--plot")
    subs["dual-points"] = p

    p = sub.add_parser("multiline", help="evolve a multi-line process and check identities")
    _common(p)
    p.add_argument("--kind", type=_kind, default=DynamicsKind("tasep"))
    p.add_argument("--densities", type=_densities, required=True)
    p.add_argument("--topology", type=_topology, default=Topology.ring(64))
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--check", choices=("t-image", "recursion", "none"), default="none")
    p.add_argument("--out", help="final lines")
    subs["multiline"] = p

    p = sub.add_parser("burke", help="exact or multiclass Burke checks")
    _common(p)
    p.add_argument("--rho1", type=float, default=1 / 3)
    p.add_argument("--rho2", type=float, default=2 / 3)
    p.add_argument("--w", type=int, default=6)
    p.add_argument("--densities", type=_densities, help="run the multiclass truncation test instead")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--replicas", type=int, default=2000)
    p.add_argument("--json")
    subs["burke"] = p

    p = sub.add_parser("verify", help="run a verification suite")
    _common(p)
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--kind", type=_kind)
    p.add_argument("--densities", type=_densities)
    p.add_argument("--t", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed-sets", type=int, default=3)
    p.add_argument("--json")
    p.add_argument("--csv")
    subs["verify"] = p

    p = sub.add_parser("oracle", help="exact stationary law on a small ring")
    _common(p)
    p.add_argument("--kind", type=_kind, default=DynamicsKind("tasep"))
    p.add_argument("--topology", type=_topology, default=Topology.ring(5))
    p.add_argument("--class-counts", type=_ints, required=True, help="counts of classes 1..n+1")
    p.add_argument("--out", help="CSV of states and probabilities")
    p.add_argument("--json")
    subs["oracle"] = p
    return parser, subs


def _config_defaults(path: str, command: str, sub: argparse.ArgumentParser) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    actions = {a.dest: a for a in sub._actions}
    values = {}
    for section in ("common", command):
        if not cp.has_section(section):
            continue
        for key, raw in cp.items(section):
            dest = key.replace("-", "_")
            if dest == "in":
                dest = "points_in"
            if dest not in actions or dest in ("help", "config"):
                raise UsageError(f"unknown config key {key!r} in section [{section}]")
            act = actions[dest]
            try:
                if isinstance(act, argparse._StoreTrueAction):
                    val = cp.getboolean(section, key)
                elif act.type is not None:
                    val = act.type(raw)
                else:
                    val = raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"config key {key!r}: {val!r} not in {list(act.choices)}")
            values[dest] = val
    return values


def parse_config(argv) -> tuple[RunConfig, argparse.Namespace]:
    """Parse arguments plus optional config file into a validated RunConfig."""
    parser, subs = build_parser()
    argv = list(argv)
    if not argv:
        raise UsageError(parser.format_usage().strip())
    command = argv[0]
    file_values = {}
    if command in subs:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv[1:])
        if known.config:
            sub = subs[command]
            file_values = _config_defaults(known.config, command, sub)
            # required flags may come from the file
            for act in sub._actions:
                if act.dest in file_values:
                    act.required = False
            sub.set_defaults(**file_values)
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError(parser.format_usage().strip())
    overrides = [k for k, v in file_values.items() if getattr(ns, k) != v]
    seed = ns.seed
    if seed is None and os.environ.get("MCIPS_SEED"):
        try:
            seed = int(os.environ["MCIPS_SEED"])
        except ValueError:
            raise UsageError("MCIPS_SEED must be an integer") from None
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (1 << 63))
    cfg = RunConfig(
        command=ns.command,
        kind=getattr(ns, "kind", None),
        topology=getattr(ns, "topology", None),
        densities=getattr(ns, "densities", None),
        classes=getattr(ns, "classes", None),
        horizon=getattr(ns, "t", None),
        seed=seed,
        boundary=getattr(ns, "boundary", None),
        suite=getattr(ns, "suite", None),
        config_file=getattr(ns, "config", None),
        overrides=overrides,
    )
    for key in ("log", "points", "out", "plot", "json", "csv", "manifest"):
        if getattr(ns, key, None):
            cfg.outputs[key] = getattr(ns, key)
    cfg.options = {k: v for k, v in vars(ns).items() if k not in cfg.echo() and k not in cfg.outputs}
    _validate(cfg, ns)
    return cfg, ns


def _increasing(d) -> bool:
    return all(b > a for a, b in zip(d, d[1:]))


def _validate(cfg: RunConfig, ns):
    needs_increasing = cfg.command in ("construct-measure", "simulate") or (
        cfg.command == "verify" and cfg.suite in _INCREASING
    ) or (cfg.command == "multiline" and ns.check == "t-image") or (
        cfg.command == "burke" and cfg.densities is not None
    )
    if cfg.densities and needs_increasing and not _increasing(cfg.densities):
        raise UsageError("densities must be strictly increasing")
    if cfg.horizon is not None and cfg.horizon < 0:
        raise UsageError("--t must be non-negative")
    if cfg.command == "simulate":
        if cfg.classes < 1:
            raise UsageError("--classes must be >= 1")
        if cfg.densities and len(cfg.densities) != cfg.classes:
            raise UsageError("--densities needs one value per class")
    if cfg.command == "multiline":
        if cfg.kind.name not in ("had", "tasep"):
            raise UsageError("multi-line processes exist for had and tasep only")
        if ns.check == "t-image" and not cfg.topology.is_ring:
            raise UsageError("--check t-image needs a ring topology")
    if cfg.command == "burke":
        if not 0 < ns.rho1 < ns.rho2 < 1:
            raise UsageError("need 0 < rho1 < rho2 < 1")
        if not 1 <= ns.w <= 8:
            raise UsageError("--w must lie in 1..8")
    if cfg.command == "oracle" and not cfg.topology.is_ring:
        raise UsageError("the exact oracle runs on ring topologies")


# ----------------------------------------------------------------- commands


def _rng(cfg: RunConfig):
    return np.random.default_rng(np.random.SeedSequence(cfg.seed))


def _marks(kind: DynamicsKind, topo: Topology, horizon: float, rng):
    if kind.discrete:
        return generate_bernoulli_field(kind.p, topo, int(horizon), rng)
    return generate_poisson(1.0, topo, (0.0, horizon), kind.location_kind, rng,
                            left_prob=kind.p if kind.name == "asep" else None)


def _initial_measure(densities, topo: Topology, kind: DynamicsKind, rng, burn=None, boundary="auto"):
    """Class word from the tandem measure; rings redraw until counts are usable."""
    d = np.asarray(densities)
    if topo.is_ring:
        for _ in range(10_000):
            arr = (rng.random((d.size, topo.n_sites)) < d[:, None]).astype(np.uint8)
            c = arr.sum(1)
            if not _increasing(list(c)) or c[0] == 0 or c[-1] == topo.n_sites:
                continue
            return _m_map_array(arr, topo, Boundary.loynes()), 0
        raise RuntimeError("could not draw lines with increasing counts on this ring")
    burn = default_burn_in(d) if burn is None else burn
    return V.sample_mu_windows(d, topo, rng, burn), burn


def cmd_simulate(cfg: RunConfig, ns) -> int:
    rng = _rng(cfg)
    n = cfg.classes
    dens = cfg.densities or [k / (n + 1) for k in range(1, n + 1)]
    classes, burn = _initial_measure(dens, cfg.topology, cfg.kind, rng)
    xi0 = MulticlassConfig(cfg.topology, classes, n)
    om = _marks(cfg.kind, cfg.topology, cfg.horizon, rng)
    traj = evolve(cfg.kind, r_inverse(xi0), om)
    meta = {"seed": cfg.seed, "densities": dens, "burn_in": burn}
    if "log" in cfg.outputs:
        io.write_events(cfg.outputs["log"], traj, meta)
    if "points" in cfg.outputs:
        io.write_points(cfg.outputs["points"], om)
    final = r_map(traj.final) if cfg.kind.preserves_order else None
    if "out" in cfg.outputs:
        if final is None:
            io._write_text(cfg.outputs["out"], io.format_stack(traj.final, meta))
        else:
            io.write_multiclass(cfg.outputs["out"], final, meta)
    if "plot" in cfg.outputs:
        io.write_plot_data(cfg.outputs["plot"], traj)
    print(f"{cfg.kind} on {cfg.topology}: {traj.n_events} events, final counts {traj.final.counts.tolist()}")
    return EXIT_PASS


def cmd_construct(cfg: RunConfig, ns) -> int:
    rng = _rng(cfg)
    topo = cfg.topology
    boundary = cfg.boundary or ("loynes" if topo.is_ring else "empty")
    if topo.is_ring and boundary != "loynes":
        raise UsageError("rings use the loynes boundary")
    if not topo.is_ring and boundary != "empty":
        raise UsageError("segments use the empty boundary plus a burn-in")
    classes, burn = _initial_measure(cfg.densities, topo, DynamicsKind("tasep"), rng, ns.burn_in)
    xi = MulticlassConfig(topo, classes, len(cfg.densities))
    meta = {"densities": ",".join(repr(d) for d in cfg.densities), "boundary": boundary,
            "burn_in": burn, "seed": cfg.seed}
    text = io.format_multiclass(xi, meta)
    if "out" in cfg.outputs:
        io._write_text(cfg.outputs["out"], text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_dual_points(cfg: RunConfig, ns) -> int:
    if cfg.kind.name not in ("had", "tasep"):
        raise UsageError("dual points exist for had and tasep only")
    head, stack, logged, jumps = io.read_events(ns.traj)
    om = io.read_points(ns.points_in, stack.topology)
    traj = evolve(cfg.kind, stack, om)
    if len(logged) == len(om) and jumps.shape == traj.jumps.shape and not np.array_equal(jumps, traj.jumps):
        print("event log does not match a replay of the marks", file=sys.stderr)
        return EXIT_FAIL
    if ns.no_null and cfg.kind.name == "had":
        duals = had_dual_points(traj, ns.line, include_null=False)
    else:
        duals = dual_points(traj, ns.line)
    io.write_points(cfg.outputs["out"], duals)
    if "plot" in cfg.outputs:
        io.write_plot_data(cfg.outputs["plot"], traj, duals, ns.line)
    print(f"{len(duals)} dual points written to {cfg.outputs['out']}")
    return EXIT_PASS


def cmd_multiline(cfg: RunConfig, ns) -> int:
    rng = _rng(cfg)
    topo = cfg.topology
    d = np.asarray(cfg.densities)
    for _ in range(10_000):
        lines = (rng.random((d.size, topo.n_sites)) < d[:, None]).astype(np.uint8)
        c = lines.sum(1)
        ok = not (cfg.kind.name == "had" and topo.is_ring and c.min() == 0)
        if ns.check == "t-image":
            ok = ok and _increasing(list(c))
        if ok:
            break
    else:
        raise RuntimeError("could not draw usable initial lines")
    state = MultiLineState(topo, lines, tuple(cfg.densities))
    om = _marks(cfg.kind, topo, cfg.horizon, rng)
    mt = multiline_evolve(state, cfg.kind, om)
    status = EXIT_PASS
    if ns.check == "t-image":
        rep = t_image_check(mt)
        print(f"t-image: {rep.n_events} events, {rep.mismatches} mismatches")
        status = EXIT_PASS if rep.passed else EXIT_FAIL
    elif ns.check == "recursion":
        fin, sets = multiline_by_recursion(state, cfg.kind, om)
        same = np.array_equal(fin, mt.final.lines) and all(
            np.array_equal(s.locations, mt.point_set(k).locations) and np.array_equal(s.times, mt.point_set(k).times)
            for k, s in enumerate(sets)
        )
        print(f"recursion cross-check: {'agree' if same else 'DISAGREE'}")
        status = EXIT_PASS if same else EXIT_FAIL
    if "out" in cfg.outputs:
        text = "\n".join(io._header({"topology": topo, "n": state.n, "seed": cfg.seed})
                         + ["".join(map(str, row)) for row in mt.final.lines]) + "\n"
        io._write_text(cfg.outputs["out"], text)
    return status


def _emit_reports(cfg: RunConfig, reports) -> int:
    for r in reports:
        print(r.summary())
    if "json" in cfg.outputs:
        payload = {"config": cfg.echo(), "reports": [r.to_dict() for r in reports],
                   "passed": all(r.passed for r in reports)}
        io._write_text(cfg.outputs["json"], json.dumps(io_jsonable(payload), indent=2) + "\n")
    if "csv" in cfg.outputs:
        rows = [(r.name, r.kind, int(r.passed), f"{r.runtime:.3f}") for r in reports]
        io.write_csv(cfg.outputs["csv"], ["name", "kind", "passed", "runtime"], rows)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def io_jsonable(obj):
    return V._jsonable(obj)


def cmd_burke(cfg: RunConfig, ns) -> int:
    if cfg.densities:
        rep = V.multiclass_burke_test(cfg.densities, ns.m, ns.replicas, seed=cfg.seed)
    else:
        rep = V.burke_exact(ns.rho1, ns.rho2, ns.w)
    return _emit_reports(cfg, [rep])


def cmd_verify(cfg: RunConfig, ns) -> int:
    suite = cfg.suite
    kind = cfg.kind
    seed = cfg.seed
    sets = ns.seed_sets
    reports = []
    if suite == "invariance":
        kinds = [kind] if kind else [DynamicsKind.parse(k) for k in ("had", "tasep", "seq-lr:0.5", "seq-rl:0.5")]
        for k in kinds:
            reports.append(V.invariance_test(k, cfg.densities or [0.2, 0.5, 0.8], cfg.horizon or 2.0,
                                             ns.replicas or 10_000, seed=seed, seed_sets=sets))
    elif suite == "burke":
        d = cfg.densities or [0.2, 0.5, 0.8]
        reports.append(V.burke_exact(1 / 3, 2 / 3, 6))
        for m in range(1, len(d)):
            reports.append(V.multiclass_burke_test(d, m, ns.replicas or 10_000, seed=seed, seed_sets=sets))
    elif suite == "multiline":
        kinds = [kind] if kind else [DynamicsKind("had"), DynamicsKind("tasep")]
        vectors = [cfg.densities] if cfg.densities else [[0.7, 0.3], [0.2, 0.5, 0.8]]
        for k in kinds:
            for d in vectors:
                reports.append(V.multiline_product_test(k, d, cfg.horizon or 32.0, ns.replicas or 2000,
                                                        seed=seed, seed_sets=sets))
    elif suite == "duals":
        kinds = [kind] if kind else [DynamicsKind("had"), DynamicsKind("tasep")]
        for k in kinds:
            reports.append(V.dual_poisson_test(k, horizon=cfg.horizon or 64.0, replicas=ns.replicas or 10_000,
                                               seed=seed, seed_sets=sets))
    elif suite == "pathwise":
        kinds = [kind] if kind else [DynamicsKind("had"), DynamicsKind("tasep")]
        for k in kinds:
            reports += [V.t_image_test(k, seed=seed), V.reversal_test(k, seed=seed),
                        V.recovery_test(k, seed=seed), V.ordering_test(k)]
    elif suite == "negative":
        reports.append(V.noninvariance_test(DynamicsKind("asep", 0.7), cfg.densities or [0.2, 0.5],
                                            cfg.horizon or 4.0, ns.replicas or 10_000, seed=seed, seed_sets=sets))
        reports.append(V.noninvariance_test(DynamicsKind("par", 0.5)))
    elif suite == "simulator":
        kinds = [kind] if kind else [DynamicsKind(k) for k in ("tasep", "had", "lrep")]
        for k in kinds:
            reports.append(V.simulator_correctness(k, seed=seed))
    elif suite == "exact":
        kinds = [kind] if kind else [DynamicsKind("had"), DynamicsKind("tasep")]
        for k in kinds:
            reports.append(V.exact_measure_invariance(k, 6, (2, 3, 5)))
            reports.append(V.exact_multiline_stationarity(k, 5, (3, 1, 2)))
        reports.append(V.queue_length_law_check(1 / 3, 2 / 3))
    return _emit_reports(cfg, reports)


def cmd_oracle(cfg: RunConfig, ns) -> int:
    counts = ns.class_counts
    n = len(counts) - 1
    if n < 1:
        raise UsageError("--class-counts needs at least two entries")
    t0 = time.perf_counter()
    res = V.exact_ctmc_stationary(cfg.kind, cfg.topology, n, counts)
    rows = [("".join(io.class_symbol(int(c), n) for c in s), repr(float(p))) for s, p in zip(res.states, res.pi)]
    if "out" in cfg.outputs:
        io.write_csv(cfg.outputs["out"], ["state", "probability"], rows)
    else:
        for r in rows:
            print(*r)
    rep = V.TestReport(
        name=f"oracle[{cfg.kind},{cfg.topology},{tuple(counts)}]", kind="exact", passed=True,
        statistics={"residual": res.residual, "states": res.n_states}, thresholds={"residual": 1e-12},
        tolerance=1e-12, runtime=time.perf_counter() - t0,
    )
    if "json" in cfg.outputs:
        io._write_text(cfg.outputs["json"], rep.to_json(indent=2) + "\n")
    return EXIT_PASS


COMMANDS = {
    "simulate": cmd_simulate,
    "construct-measure": cmd_construct,
    "dual-points": cmd_dual_points,
    "multiline": cmd_multiline,
    "burke": cmd_burke,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, ns = parse_config(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE
    try:
        status = COMMANDS[cfg.command](cfg, ns)
        files = [v for k, v in cfg.outputs.items() if k != "manifest"]
        path = cfg.outputs.get("manifest") or (files[0] + ".manifest.json" if files else None)
        if path:
            io.write_manifest(path, cfg.echo(), [cfg.seed], sorted(files),
                              {"status": status, "overrides": cfg.overrides, "argv": list(argv)})
        return status
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (UnstableQueueError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
