"""Exact oracles and statistical batteries.

Exact checks enumerate small state spaces and solve linear systems; they
carry a tolerance and fail loudly above it.  Statistical checks run at a
significance level with a Bonferroni correction over their statistics and
are repeated on independent seed sets; a check fails only when at least two
of three seed sets reject.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse import linalg as splinalg

from . import _kernels as K
from . import stats as S
from .duality import (
    MultiLineState,
    dual_points,
    multiline_evolve,
    reverse_check,
    t_image_check,
)
from .dynamics import (
    DynamicsKind,
    PointProcess,
    evolve,
    evolve_augmented,
    find_ordering_violation,
    generate_bernoulli_field,
    generate_poisson,
    recover_points,
)
from .lattice import Topology, sample_fixed_count
from .queues import (
    Boundary,
    QueueLengthLaw,
    _m_map_array,
    birth_death_stationary,
    default_burn_in,
    geometric_stationary,
)

__all__ = [
    "CTMCResult",
    "ReducibleChainError",
    "TestReport",
    "burke_exact",
    "dual_poisson_test",
    "exact_ctmc_stationary",
    "exact_measure_invariance",
    "exact_multiline_stationarity",
    "influence_buffer",
    "invariance_test",
    "multiclass_burke_test",
    "multiline_product_test",
    "noninvariance_test",
    "ordering_test",
    "queue_length_law_check",
    "recovery_test",
    "reversal_test",
    "sample_mu_windows",
    "simulator_correctness",
    "t_image_test",
]

EXACT_TOL = 1e-10


@dataclass
class TestReport:
    """Outcome of one check.  ``kind`` is ``"exact"`` or ``"statistical"``."""

    # keep pytest from collecting this class
    __test__ = False

    name: str
    kind: str
    passed: bool
    statistics: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    sample_sizes: dict = field(default_factory=dict)
    runtime: float = 0.0
    level: float | None = None
    correction: str | None = None
    tolerance: float | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.runtime:.2f}s)"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _seed_sets(seed, k: int):
    root = np.random.SeedSequence(seed)
    return root, root.spawn(k)


def _majority(rejects) -> bool:
    """True (check passes) unless at least two seed sets reject."""
    return sum(bool(r) for r in rejects) < 2


# ------------------------------------------------------------ exact oracles


class ReducibleChainError(RuntimeError):
    pass


@dataclass(frozen=True)
class CTMCResult:
    states: np.ndarray
    pi: np.ndarray
    residual: float
    generator: sparse.csr_matrix

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    def index(self) -> dict:
        return {s.tobytes(): i for i, s in enumerate(self.states)}


def _words_with_counts(counts) -> np.ndarray:
    """All words over classes ``1..len(counts)`` with the given class counts."""
    size = int(sum(counts))
    out = []

    def place(word, free, cls):
        if cls > len(counts):
            out.append(word.copy())
            return
        c = counts[cls - 1]
        for pos in itertools.combinations(free, c):
            for p in pos:
                word[p] = cls
            rest = [f for f in free if f not in pos]
            place(word, rest, cls + 1)
        for p in free:
            word[p] = 0

    place(np.zeros(size, np.uint8), list(range(size)), 1)
    return np.array(out, dtype=np.uint8).reshape(-1, size)


def _mark_rates(kind: DynamicsKind, n_sites: int):
    """(location, flag, rate) triples of a continuous-time kind on a ring."""
    if kind.discrete:
        raise ValueError("exact generators exist for continuous-time kinds only")
    if kind.name == "asep":
        return [(x, 0, kind.p) for x in range(n_sites)] + [(x, 1, 1.0 - kind.p) for x in range(n_sites)]
    return [(x, 0, 1.0) for x in range(n_sites)]


def _generator(kind: DynamicsKind, states: np.ndarray, n: int):
    index = {s.tobytes(): i for i, s in enumerate(states)}
    rows, cols, vals = [], [], []
    flags = np.zeros(1, np.uint8)
    for i, s in enumerate(states):
        for loc, flag, rate in _mark_rates(kind, states.shape[1]):
            if rate == 0.0:
                continue
            xi = s.copy()
            flags[0] = flag
            K.run_multiclass(kind.code, xi, n, np.array([loc], np.int64), flags, True)
            j = index[xi.tobytes()]
            if j != i:
                rows.append(i)
                cols.append(j)
                vals.append(rate)
    m = states.shape[0]
    Q = sparse.csr_matrix((vals, (rows, cols)), shape=(m, m))
    Q = Q - sparse.diags(np.asarray(Q.sum(axis=1)).ravel())
    return Q.tocsr()


def exact_ctmc_stationary(
    kind: DynamicsKind, topology: Topology, n: int, class_counts, max_states: int = 10**6, tol: float = 1e-12
) -> CTMCResult:
    """Solve ``pi Q = 0`` for the multiclass chain on a ring with fixed class counts.

    ``class_counts[c]`` is the number of sites of class ``c + 1``
    (``n + 1`` entries, the last being holes).
    """
    if not topology.is_ring:
        raise ValueError("exact solves run on rings")
    counts = [int(c) for c in class_counts]
    if len(counts) != n + 1 or sum(counts) != topology.n_sites or min(counts) < 0:
        raise ValueError("class counts must have n + 1 entries summing to the ring size")
    size = math.factorial(topology.n_sites)
    for c in counts:
        size //= math.factorial(c)
    if size > max_states:
        raise ValueError(f"state space of {size} states exceeds {max_states}")
    if kind.name == "had" and counts[:-1] and sum(counts[:-1]) == 0:
        raise ValueError("HAD needs at least one particle")
    if kind.name == "lrep" and counts[-1] == 0:
        raise ValueError("LREP needs at least one hole")
    states = _words_with_counts(counts)
    Q = _generator(kind, states, n)
    m = states.shape[0]
    if m == 1:
        return CTMCResult(states, np.ones(1), 0.0, Q)
    n_comp, _ = csgraph.connected_components(Q != 0, directed=True, connection="strong")
    if n_comp > 1:
        raise ReducibleChainError(f"generator has {n_comp} communicating classes")
    A = Q.T.tolil()
    A[m - 1, :] = np.ones(m)
    b = np.zeros(m)
    b[-1] = 1.0
    pi = splinalg.spsolve(A.tocsc(), b)
    residual = float(np.abs(Q.T @ pi).max())
    if residual > tol or abs(pi.sum() - 1) > tol:
        raise RuntimeError(f"stationary solve residual {residual:.3e} above {tol:.0e}")
    return CTMCResult(states, pi, residual, Q)


def _fixed_count_words(L: int, c: int) -> np.ndarray:
    out = np.zeros((math.comb(L, c), L), np.uint8)
    for i, pos in enumerate(itertools.combinations(range(L), c)):
        out[i, list(pos)] = 1
    return out


def exact_measure_invariance(kind: DynamicsKind, L: int, counts, tol: float = EXACT_TOL) -> TestReport:
    """Exact ring analogue of the invariance theorem.

    The lines are independent and uniform with the given (strictly
    increasing) particle counts; the law of their tandem class word is
    computed by enumeration and checked against ``mu Q = 0``.
    """
    t0 = time.perf_counter()
    if kind.name not in ("had", "tasep", "asep"):
        raise ValueError("the tandem measure is built for HAD and TASEP (ASEP as a control)")
    counts = [int(c) for c in counts]
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("line counts must be strictly increasing")
    topo = Topology.ring(L)
    n = len(counts)
    per_line = [_fixed_count_words(L, c) for c in counts]
    class_counts = [counts[0]] + [b - a for a, b in zip(counts, counts[1:])] + [L - counts[-1]]
    states = _words_with_counts(class_counts)
    index = {s.tobytes(): i for i, s in enumerate(states)}
    mu = np.zeros(states.shape[0])
    weight = 1.0 / np.prod([w.shape[0] for w in per_line])
    boundary = Boundary.loynes()
    for combo in itertools.product(*[range(w.shape[0]) for w in per_line]):
        arr = np.stack([per_line[k][i] for k, i in enumerate(combo)])
        xi = _m_map_array(arr, topo, boundary)
        mu[index[xi.tobytes()]] += weight
    Q = _generator(kind, states, n)
    residual = float(np.abs(Q.T @ mu).max())
    return TestReport(
        name=f"exact-invariance[{kind},ring:{L},counts={tuple(counts)}]",
        kind="exact",
        passed=residual <= tol,
        statistics={"residual": residual, "states": int(states.shape[0]), "mass": float(mu.sum())},
        thresholds={"residual": tol},
        tolerance=tol,
        runtime=time.perf_counter() - t0,
    )


def exact_multiline_stationarity(kind: DynamicsKind, L: int, counts, tol: float = EXACT_TOL) -> TestReport:
    """Uniform product law over fixed-count lines is stationary for the cascade.

    Checks ``pi Q = 0`` with ``pi`` uniform: every state must receive total
    rate ``L`` (its exit rate).  Counts need not be monotone.
    """
    t0 = time.perf_counter()
    per_line = [_fixed_count_words(L, int(c)) for c in counts]
    keys = [{w.tobytes(): i for i, w in enumerate(pl)} for pl in per_line]
    shape = tuple(w.shape[0] for w in per_line)
    inflow = np.zeros(shape)
    n = len(per_line)
    cascade = np.empty((1, n), np.int64)
    jumps = np.empty((1, n, 2), np.int64)
    for combo in itertools.product(*[range(s) for s in shape]):
        base = np.stack([per_line[k][i] for k, i in enumerate(combo)])
        for loc in range(L):
            lines = base.copy()
            K.multiline_run(kind.code, lines, np.array([loc], np.int64), True, cascade, jumps)
            target = tuple(keys[k][lines[k].tobytes()] for k in range(n))
            inflow[target] += 1.0
    # uniform pi: inflow rate (times pi) must equal outflow L (times pi)
    residual = float(np.abs(inflow - L).max() / inflow.size)
    return TestReport(
        name=f"exact-multiline[{kind},ring:{L},counts={tuple(int(c) for c in counts)}]",
        kind="exact",
        passed=residual <= tol,
        statistics={"residual": residual, "states": int(inflow.size)},
        thresholds={"residual": tol},
        tolerance=tol,
        runtime=time.perf_counter() - t0,
    )


def queue_length_law_check(rho1: float, rho2: float, ratio: float | None = None, K_states: int = 60, tol: float = 1e-12) -> TestReport:
    """Compare the birth-death stationary vector with a geometric law.

    ``ratio`` defaults to the one from :func:`geometric_stationary`; pass
    another value to test a candidate ratio.
    """
    t0 = time.perf_counter()
    pi = birth_death_stationary(rho1, rho2, K_states)
    if ratio is None:
        ratio = geometric_stationary(rho1, rho2).ratio
    k = np.arange(K_states)
    geo = (1.0 - ratio) * ratio**k
    err = float(np.abs(pi - geo).max())
    successive = pi[1:8] / pi[:7]
    tail = ratio**K_states
    return TestReport(
        name=f"queue-length-law[{rho1:g},{rho2:g},ratio={ratio:g}]",
        kind="exact",
        passed=err <= tol,
        statistics={"max_abs_error": err, "empirical_ratios": successive.tolist(), "tail_mass": tail},
        thresholds={"max_abs_error": tol},
        tolerance=tol,
        runtime=time.perf_counter() - t0,
    )


def _bits(w: int) -> np.ndarray:
    idx = np.arange(1 << w)
    return ((idx[:, None] >> np.arange(w)) & 1).astype(np.int64)


def burke_exact(rho1: float, rho2: float, w: int, ratio: float | None = None, tol: float = EXACT_TOL) -> TestReport:
    """Exact law of ``w`` departure bits for a stationary Bernoulli queue.

    Enumerates all ``4**w`` arrival/service words and every boundary queue
    length.  Boundary values ``>= w`` are lumped into one term: the queue
    cannot empty within the window, so the departures are then exactly the
    services and no truncation is needed.  ``ratio`` overrides the boundary
    law's ratio (for testing candidate laws).
    """
    t0 = time.perf_counter()
    if not 1 <= w <= 8:
        raise ValueError("window w must lie in 1..8")
    law = geometric_stationary(rho1, rho2)
    if ratio is not None:
        law = QueueLengthLaw(ratio, 1.0 - ratio)
    bits = _bits(w)
    ones = bits.sum(1)
    p1 = rho1**ones * (1 - rho1) ** (w - ones)
    p2 = rho2**ones * (1 - rho2) ** (w - ones)
    i1, i2 = np.meshgrid(np.arange(1 << w), np.arange(1 << w), indexing="ij")
    i1 = i1.ravel()
    i2 = i2.ravel()
    a1 = bits[i1]
    a2 = bits[i2]
    prob = p1[i1] * p2[i2]
    weights = np.append(law.pmf(np.arange(w)), law.sf(w))
    dlaw = np.zeros(1 << w)
    for z0, wz in enumerate(weights):
        z = np.full(prob.size, z0, np.int64)
        didx = np.zeros(prob.size, np.int64)
        for j in range(w):
            s = z + a1[:, j]
            d = (a2[:, j] == 1) & (s > 0)
            didx |= d.astype(np.int64) << j
            z = np.maximum(s - a2[:, j], 0)
        dlaw += np.bincount(didx, weights=prob * wz, minlength=1 << w)
    tv = 0.5 * float(np.abs(dlaw - p1).sum())
    return TestReport(
        name=f"burke-exact[{rho1:g},{rho2:g},w={w}]",
        kind="exact",
        passed=tv <= tol,
        statistics={"tv": tv, "mass": float(dlaw.sum()), "ratio": law.ratio, "p_first": float(dlaw[1::2].sum())},
        thresholds={"tv": tol},
        tolerance=tol,
        runtime=time.perf_counter() - t0,
        details={"law": dlaw},
    )


# -------------------------------------------------------- measure sampling


def influence_buffer(t: float, rho: float) -> int:
    """Buffer on each side of the window: ``ceil(50 max(t, 1) / rho)``."""
    return int(math.ceil(50.0 * max(t, 1.0) / rho))


def sample_mu_windows(densities, topology: Topology, rng, burn: int | None = None) -> np.ndarray:
    """One draw of the multiclass measure on every site of a segment.

    The lines are Bernoulli on ``burn`` extra sites to the left; queues start
    empty there and the burn-in is discarded.
    """
    dens = np.asarray(densities, float)
    burn = default_burn_in(dens) if burn is None else burn
    total = topology.n_sites + burn
    ext = Topology.segment(total, 0)
    u = rng.random((dens.size, total))
    arr = (u < dens[:, None]).astype(np.uint8)
    return _m_map_array(arr, ext, Boundary.empty())[burn:]


def _evolve_classes(kind: DynamicsKind, xi: np.ndarray, n: int, topo: Topology, t: float, rng):
    if kind.discrete:
        ticks = int(round(t / kind.p))
        om = generate_bernoulli_field(kind.p, topo, ticks, rng)
        K.run_multiclass_ticks(kind.code, xi, np.ascontiguousarray(om.locations), om.times.astype(np.int64), topo.is_ring)
        return len(om)
    om = generate_poisson(1.0, topo, (0.0, t), kind.location_kind, rng, left_prob=kind.p if kind.name == "asep" else None)
    K.run_multiclass(kind.code, xi, n, np.ascontiguousarray(om.locations), om.flag_array().copy(), topo.is_ring)
    return len(om)


def _invariance_samples(kind, densities, t, replicas, ss, window, buffer, max_lag):
    n = len(densities)
    topo = Topology.segment(window, buffer)
    burn = default_burn_in(densities)
    w0 = np.empty((replicas, window), np.uint8)
    wt = np.empty((replicas, window), np.uint8)
    n_events = 0
    for r, child in enumerate(ss.spawn(replicas)):
        rng = np.random.default_rng(child)
        xi = sample_mu_windows(densities, topo, rng, burn)
        w0[r] = xi[topo.window]
        if t > 0:
            n_events += _evolve_classes(kind, xi, n, topo, t, rng)
        wt[r] = xi[topo.window]
    return S.statistics_matrix(w0, n, max_lag), S.statistics_matrix(wt, n, max_lag), n_events


def _check_densities(densities, increasing=True):
    d = [float(x) for x in densities]
    if any(not 0 < x < 1 for x in d):
        raise ValueError("densities must lie in (0, 1)")
    if increasing and any(b <= a for a, b in zip(d, d[1:])):
        raise ValueError("densities must be strictly increasing")
    return d


def invariance_test(
    kind: DynamicsKind,
    densities,
    t: float,
    replicas: int,
    seed=None,
    window: int = 1000,
    buffer: int | None = None,
    level: float = 0.01,
    max_lag: int = 8,
    seed_sets: int = 3,
) -> TestReport:
    """Is the tandem-queue measure invariant under ``kind``?

    Each replica draws a configuration on a buffered segment, records the
    window statistics, evolves to time ``t`` (``t / p`` ticks for discrete
    kinds) and records them again.  Paired z-tests per statistic, Bonferroni
    at ``level``.
    """
    t0 = time.perf_counter()
    d = _check_densities(densities)
    need = influence_buffer(t, min(d))
    buffer = need if buffer is None else buffer
    if buffer < need:
        raise ValueError(f"buffer {buffer} below the influence bound {need}")
    root, sets = _seed_sets(seed, seed_sets)
    names = S.statistic_names(len(d), max_lag)
    rejects, zmax, per_set = [], [], []
    events = 0
    for ss in sets:
        s0, st, ev = _invariance_samples(kind, d, t, replicas, ss, window, buffer, max_lag)
        events += ev
        z, p = S.paired_z(st, s0)
        rej, thr, mask = S.bonferroni(p, level)
        rejects.append(rej)
        worst = int(np.argmax(np.abs(z)))
        zmax.append(float(np.abs(z).max()))
        per_set.append({"reject": rej, "max_abs_z": float(np.abs(z).max()), "worst": names[worst],
                        "rejected": [names[i] for i in np.flatnonzero(mask)]})
    return TestReport(
        name=f"invariance[{kind},n={len(d)},t={t:g}]",
        kind="statistical",
        passed=_majority(rejects),
        statistics={"max_abs_z": zmax, "seed_sets_rejecting": int(sum(rejects))},
        thresholds={"per_test_p": level / len(names), "z": float(S.stats.norm.isf(level / len(names) / 2))},
        seeds=[root.entropy],
        sample_sizes={"replicas": replicas, "seed_sets": seed_sets, "window": window, "buffer": buffer,
                      "burn_in": default_burn_in(d), "statistics": len(names), "events": events},
        runtime=time.perf_counter() - t0,
        level=level,
        correction="bonferroni",
        details={"per_set": per_set, "densities": d, "t": t},
    )


def noninvariance_test(
    kind: DynamicsKind,
    densities=(0.2, 0.5),
    t: float = 4.0,
    replicas: int = 10_000,
    seed=None,
    window: int = 1000,
    threshold: float = 5.0,
    max_lag: int = 8,
    seed_sets: int = 3,
) -> TestReport:
    """Negative controls.

    ASEP: the same pipeline as :func:`invariance_test`; passes when some
    statistic drifts by more than ``threshold`` standard errors in at least
    two of three seed sets.  Parallel TASEP: passes when the exhaustive
    search finds an ordered stack that one parallel tick unorders.
    """
    t0 = time.perf_counter()
    if kind.name == "par":
        found = find_ordering_violation(kind, max_sites=4)
        return TestReport(
            name=f"noninvariance[{kind}]",
            kind="exact",
            passed=found is not None,
            statistics={"counterexample_found": found is not None},
            runtime=time.perf_counter() - t0,
            details={"fixture": found},
        )
    if kind.name != "asep":
        raise ValueError("negative controls exist for ASEP and parallel TASEP")
    d = _check_densities(densities)
    buffer = influence_buffer(t, min(d))
    root, sets = _seed_sets(seed, seed_sets)
    names = S.statistic_names(len(d), max_lag)
    detect, per_set = [], []
    for ss in sets:
        s0, st, _ = _invariance_samples(kind, d, t, replicas, ss, window, buffer, max_lag)
        z, _ = S.paired_z(st, s0)
        worst = int(np.argmax(np.abs(z)))
        detect.append(bool(np.abs(z[worst]) > threshold))
        per_set.append({"max_abs_z": float(np.abs(z[worst])), "worst": names[worst]})
    return TestReport(
        name=f"noninvariance[{kind},n={len(d)},t={t:g}]",
        kind="statistical",
        passed=sum(detect) >= 2,
        statistics={"max_abs_z": [p["max_abs_z"] for p in per_set]},
        thresholds={"z": threshold},
        seeds=[root.entropy],
        sample_sizes={"replicas": replicas, "seed_sets": seed_sets, "window": window, "buffer": buffer},
        runtime=time.perf_counter() - t0,
        details={"per_set": per_set, "densities": d},
    )


def multiclass_burke_test(
    densities,
    m: int,
    replicas: int,
    seed=None,
    window: int = 1000,
    level: float = 0.01,
    max_lag: int = 8,
    seed_sets: int = 3,
    block: int = 6,
) -> TestReport:
    """Truncating the ``n``-class measure to ``m`` classes gives the ``m``-class measure.

    Compares window statistics of ``truncate(M(a^1..a^n), m)`` with those of
    an independent ``M(a^1..a^m)``.  For ``m = 1`` the class-1 indicator is
    also compared block by block with the exact departure law of
    :func:`burke_exact` (chi-square, non-overlapping blocks).
    """
    t0 = time.perf_counter()
    d = _check_densities(densities)
    n = len(d)
    if not 1 <= m <= n:
        raise ValueError(f"m={m} outside 1..{n}")
    topo = Topology.segment(window, 0)
    burn_n = default_burn_in(d)
    burn_m = default_burn_in(d[:m])
    names = S.statistic_names(m, max_lag)
    root, sets = _seed_sets(seed, seed_sets)
    exact = burke_exact(d[0], d[1], block).details["law"] if (m == 1 and n >= 2) else None
    rejects, per_set = [], []
    for ss in sets:
        a_ss, b_ss = ss.spawn(2)
        wa = np.empty((replicas, window), np.uint8)
        wb = np.empty((replicas, window), np.uint8)
        for r, (ca, cb) in enumerate(zip(a_ss.spawn(replicas), b_ss.spawn(replicas))):
            xa = sample_mu_windows(d, topo, np.random.default_rng(ca), burn_n)
            wa[r] = np.minimum(xa, m + 1)
            wb[r] = sample_mu_windows(d[:m], topo, np.random.default_rng(cb), burn_m)
        z, p = S.two_sample_z(S.statistics_matrix(wa, m, max_lag), S.statistics_matrix(wb, m, max_lag))
        pvals = list(p)
        info = {"max_abs_z": float(np.abs(z).max())}
        if exact is not None:
            nb = window // block
            blocks = (wa[:, : nb * block] == 1).reshape(-1, block).astype(np.int64)
            idx = (blocks << np.arange(block)).sum(1)
            obs = np.bincount(idx, minlength=1 << block)
            chi2, pc = S.stats.chisquare(obs, exact * obs.sum())
            pvals.append(pc)
            info["block_chi2_p"] = float(pc)
        rej, thr, mask = S.bonferroni(pvals, level)
        info["reject"] = rej
        rejects.append(rej)
        per_set.append(info)
    return TestReport(
        name=f"multiclass-burke[n={n},m={m}]",
        kind="statistical",
        passed=_majority(rejects),
        statistics={"max_abs_z": [p["max_abs_z"] for p in per_set],
                    "block_chi2_p": [p.get("block_chi2_p") for p in per_set]},
        thresholds={"per_test_p": level / (len(names) + (exact is not None))},
        seeds=[root.entropy],
        sample_sizes={"replicas": replicas, "seed_sets": seed_sets, "window": window},
        runtime=time.perf_counter() - t0,
        level=level,
        correction="bonferroni",
        details={"per_set": per_set, "densities": d},
    )


def multiline_product_test(
    kind: DynamicsKind,
    densities,
    t: float,
    replicas: int,
    seed=None,
    L: int = 256,
    sigma: float = 3.0,
    seed_sets: int = 3,
) -> TestReport:
    """After time ``t`` the multi-line state is still a product of Bernoulli lines.

    Runs on a ring from independent Bernoulli lines (a mixture of uniform
    fixed-count lines, each stationary for the cascade).  Checks per-line
    densities against their targets and the cross-line covariances at
    offsets -1, 0, +1 against zero, each within ``sigma`` standard errors.
    Densities need not be increasing.
    """
    t0 = time.perf_counter()
    d = _check_densities(densities, increasing=False)
    n = len(d)
    topo = Topology.ring(L)
    rho = np.asarray(d)
    root, sets = _seed_sets(seed, seed_sets)
    pairs = [(k, l, off) for k in range(n) for l in range(k + 1, n) for off in (-1, 0, 1)]
    names = [f"density[{k + 1}]" for k in range(n)] + [f"cov[{k + 1},{l + 1},{off:+d}]" for k, l, off in pairs]
    rejects, per_set = [], []
    for ss in sets:
        dens = np.empty((replicas, n))
        cov = np.empty((replicas, len(pairs)))
        for r, child in enumerate(ss.spawn(replicas)):
            rng = np.random.default_rng(child)
            while True:
                lines = (rng.random((n, L)) < rho[:, None]).astype(np.uint8)
                if kind.name != "had" or lines.sum(1).min() > 0:
                    break
            om = generate_poisson(1.0, topo, (0.0, t), kind.location_kind, rng)
            casc = np.empty((len(om), n), np.int64)
            jumps = np.empty((len(om), n, 2), np.int64)
            K.multiline_run(kind.code, lines, np.ascontiguousarray(om.locations), True, casc, jumps)
            c = lines - rho[:, None]
            dens[r] = lines.mean(1)
            for i, (k, l, off) in enumerate(pairs):
                cov[r, i] = (c[k] * np.roll(c[l], -off)).mean()
        stat = np.concatenate([dens.mean(0) - rho, cov.mean(0)])
        se = np.concatenate([dens.std(0, ddof=1), cov.std(0, ddof=1)]) / np.sqrt(replicas)
        z = stat / se
        rej = bool(np.any(np.abs(z) > sigma))
        rejects.append(rej)
        per_set.append({"z": dict(zip(names, z.tolist())), "reject": rej})
    return TestReport(
        name=f"multiline-product[{kind},densities={tuple(d)},t={t:g}]",
        kind="statistical",
        passed=_majority(rejects),
        statistics={"max_abs_z": [float(np.max(np.abs(list(p["z"].values())))) for p in per_set]},
        thresholds={"z": sigma},
        seeds=[root.entropy],
        sample_sizes={"replicas": replicas, "seed_sets": seed_sets, "ring": L},
        runtime=time.perf_counter() - t0,
        level=float(2 * S.stats.norm.sf(sigma)),
        correction="none (per-statistic 3 sigma)",
        details={"per_set": per_set, "densities": d},
    )


def dual_poisson_test(
    kind: DynamicsKind,
    L: int = 512,
    horizon: float = 64.0,
    replicas: int = 10_000,
    seed=None,
    level: float = 0.01,
    n_gaps: int = 4,
    times=(16.0, 32.0, 64.0),
    sigma: float = 3.0,
    seed_sets: int = 3,
    gap_stride: int = 8,
) -> TestReport:
    """Dual points of a stationary ring run are rate-1 Poisson and independent of the present.

    Every replica starts from a uniform half-filled ring (stationary).  Per
    location the first ``n_gaps`` gaps are KS-tested against Exp(1), one
    test per gap index, on every ``gap_stride``-th location; the dual counts
    on ``[0, horizon)`` get a dispersion and a mean test.  Bonferroni over
    these.  Separately, at four sites and each time in ``times``, the count
    of duals before ``t`` at ``x`` must be uncorrelated with the occupation
    of ``x`` and ``x - 1`` at ``t`` (``sigma`` standard errors).
    """
    t0 = time.perf_counter()
    if kind.name not in ("had", "tasep"):
        raise ValueError("dual points exist for HAD and TASEP only")
    topo = Topology.ring(L)
    sites = np.array([0, L // 4, L // 2, 3 * L // 4])
    probes = np.ravel(np.column_stack([sites, (sites - 1) % L])).astype(np.int64)
    checkpoints = np.asarray(times, float)
    root, sets = _seed_sets(seed, seed_sets)
    gap_sites = np.arange(0, L, gap_stride)
    rejects, per_set = [], []
    for ss in sets:
        gaps = np.empty((replicas, n_gaps, gap_sites.size))
        counts = np.empty((replicas, L), np.int64)
        pc = np.empty((replicas, checkpoints.size, probes.size), np.int64)
        po = np.empty((replicas, checkpoints.size, probes.size), np.uint8)
        short = 0
        g = np.empty((n_gaps, L))
        cnt = np.empty(L, np.int64)
        for r, child in enumerate(ss.spawn(replicas)):
            rng = np.random.default_rng(child)
            line = np.array(sample_fixed_count(L // 2, topo, rng).occupancy, copy=True)
            kseed = int(child.generate_state(1)[0] & 0x7FFFFFFF)
            short += K.dual_poisson_replica(kind.code, line, horizon, kseed, n_gaps, checkpoints,
                                            probes, g, cnt, pc[r], po[r])
            gaps[r] = g[:, gap_sites]
            counts[r] = cnt
        # a location with too few duals leaves NaN gaps; drop them
        ks_p = [S.ks_exponential(_finite(gaps[:, i]))[1] for i in range(n_gaps)]
        disp, disp_p = S.dispersion_test(counts.ravel(), mean=horizon)
        total = counts.sum()
        expect = horizon * L * replicas
        mean_z = (total - expect) / math.sqrt(expect)
        mean_p = float(2 * S.stats.norm.sf(abs(mean_z)))
        pvals = ks_p + [disp_p, mean_p]
        rej, thr, _ = S.bonferroni(pvals, level)
        corr = {}
        worst = 0.0
        for c, tc in enumerate(checkpoints):
            for q, x in enumerate(sites):
                cx = pc[:, c, 2 * q]
                for off, col in ((0, 2 * q), (-1, 2 * q + 1)):
                    rr, zz = S.correlation_z(cx, po[:, c, col])
                    corr[f"x={x},off={off},t={tc:g}"] = rr
                    worst = max(worst, abs(zz))
        corr_rej = worst > sigma
        rejects.append(rej or corr_rej)
        per_set.append({
            "ks_p": ks_p, "dispersion_index": disp, "dispersion_p": disp_p, "mean_z": mean_z,
            "max_corr_z": worst, "short_locations": int(short), "reject": rejects[-1],
            "correlations": corr,
        })
    return TestReport(
        name=f"dual-poisson[{kind},ring:{L},T={horizon:g}]",
        kind="statistical",
        passed=_majority(rejects),
        statistics={"min_ks_p": [min(p["ks_p"]) for p in per_set],
                    "dispersion_p": [p["dispersion_p"] for p in per_set],
                    "max_corr_z": [p["max_corr_z"] for p in per_set]},
        thresholds={"per_test_p": level / (n_gaps + 2), "corr_z": sigma},
        seeds=[root.entropy],
        sample_sizes={"replicas": replicas, "seed_sets": seed_sets, "ring": L, "gap_locations": int(gap_sites.size)},
        runtime=time.perf_counter() - t0,
        level=level,
        correction="bonferroni",
        details={"per_set": per_set},
    )


def _finite(a):
    a = np.ravel(a)
    return a[np.isfinite(a)]


def simulator_correctness(
    kind: DynamicsKind, L: int = 5, m: int = 2, horizon: float = 1e5, seed=None, tv_max: float = 0.01, tol: float = 1e-12
) -> TestReport:
    """Long-run occupation law of one ring run against the exact stationary solve.

    Also checks that the solve returns the uniform law on the fixed-count
    hyperplane.
    """
    t0 = time.perf_counter()
    topo = Topology.ring(L)
    res = exact_ctmc_stationary(kind, topo, 1, (m, L - m), tol=tol)
    uniform_err = float(np.abs(res.pi - 1.0 / res.n_states).max())
    root = np.random.SeedSequence(seed)
    rng = np.random.default_rng(root)
    line = np.array(sample_fixed_count(m, topo, rng).occupancy, copy=True)
    if kind.name == "asep":
        rates = np.concatenate([np.full(L, kind.p), np.full(L, 1.0 - kind.p)])
    else:
        rates = np.ones(L)
    occ = np.zeros(1 << L)
    K.occupation_times(kind.code, line, rates, horizon, int(root.generate_state(1)[0] & 0x7FFFFFFF), occ)
    masks = (res.states.astype(np.int64) == 1) @ (1 << np.arange(L))
    emp = occ[masks] / horizon
    tv = 0.5 * float(np.abs(emp - res.pi).sum())
    return TestReport(
        name=f"simulator[{kind},ring:{L},m={m}]",
        kind="statistical",
        passed=tv < tv_max and uniform_err <= tol and res.residual <= tol,
        statistics={"tv": tv, "uniform_error": uniform_err, "residual": res.residual, "states": res.n_states},
        thresholds={"tv": tv_max, "uniform_error": tol, "residual": tol},
        seeds=[root.entropy],
        sample_sizes={"horizon": horizon},
        runtime=time.perf_counter() - t0,
        tolerance=tol,
    )


# ------------------------------------------------------------- pathwise


def t_image_test(kind: DynamicsKind, L: int = 32, counts=(6, 14, 24), events: int = 1000, runs: int = 100, seed=None) -> TestReport:
    """Tandem image of the multi-line process equals the coupled process, event by event."""
    t0 = time.perf_counter()
    topo = Topology.ring(L)
    root, sets = _seed_sets(seed, runs)
    bad_runs, mismatches, total = 0, 0, 0
    for ss in sets:
        rng = np.random.default_rng(ss)
        state = MultiLineState(topo, np.stack([sample_fixed_count(c, topo, rng).occupancy for c in counts]))
        om = _exact_count_marks(kind, topo, events, rng)
        rep = t_image_check(multiline_evolve(state, kind, om))
        total += rep.n_events
        mismatches += rep.mismatches
        bad_runs += not rep.passed
    return TestReport(
        name=f"t-image[{kind},ring:{L},counts={tuple(counts)}]",
        kind="exact",
        passed=mismatches == 0,
        statistics={"mismatches": mismatches, "failing_runs": bad_runs, "events_checked": total},
        thresholds={"mismatches": 0},
        seeds=[root.entropy],
        sample_sizes={"runs": runs, "events_per_run": events},
        runtime=time.perf_counter() - t0,
        tolerance=0.0,
    )


def _exact_count_marks(kind, topo, events, rng):
    """``events`` marks at uniform locations and sorted uniform times."""
    cand = np.arange(topo.n_sites)
    horizon = events / topo.n_sites
    while True:
        times = np.sort(rng.random(events) * horizon)
        if events < 2 or np.all(np.diff(times) > 0):
            break
    return PointProcess(topo, cand[rng.integers(0, cand.size, events)], times, (0.0, horizon), kind.location_kind)


def reversal_test(kind: DynamicsKind, trajectories: int = 1000, L: int = 32, horizon: float = 4.0, seed=None) -> TestReport:
    """Reflected time reversal under the reflected duals reproduces each trajectory."""
    t0 = time.perf_counter()
    topo = Topology.ring(L)
    root, sets = _seed_sets(seed, trajectories)
    failures, events = 0, 0
    for ss in sets:
        rng = np.random.default_rng(ss)
        lo = 1 if kind.name == "had" else 0
        eta = sample_fixed_count(int(rng.integers(lo, L + 1)), topo, rng)
        om = generate_poisson(1.0, topo, (0.0, horizon), kind.location_kind, rng)
        traj = evolve(kind, eta, om)
        rep = reverse_check(traj, dual_points(traj))
        failures += not rep.passed
        events += rep.n_events
    return TestReport(
        name=f"reversal[{kind},ring:{L}]",
        kind="exact",
        passed=failures == 0,
        statistics={"failures": failures, "events_checked": events},
        thresholds={"failures": 0},
        seeds=[root.entropy],
        sample_sizes={"trajectories": trajectories},
        runtime=time.perf_counter() - t0,
        tolerance=0.0,
    )


def recovery_test(kind: DynamicsKind, instances: int = 1000, L: int = 32, horizon: float = 4.0, seed=None) -> TestReport:
    """Marks are recovered exactly from the augmented trajectory (rings and segments)."""
    t0 = time.perf_counter()
    root, sets = _seed_sets(seed, instances)
    failures = 0
    for i, ss in enumerate(sets):
        rng = np.random.default_rng(ss)
        topo = Topology.ring(L) if i % 2 == 0 else Topology.segment(L, 4)
        lo = 1 if (kind.name == "had" and topo.is_ring) else 0
        eta = sample_fixed_count(int(rng.integers(lo, topo.n_sites + 1)), topo, rng)
        om = generate_poisson(1.0, topo, (0.0, horizon), kind.location_kind, rng)
        traj = evolve_augmented(kind, eta, om, seed=rng)
        failures += recover_points(traj) != om
    return TestReport(
        name=f"recovery[{kind}]",
        kind="exact",
        passed=failures == 0,
        statistics={"failures": int(failures)},
        thresholds={"failures": 0},
        seeds=[root.entropy],
        sample_sizes={"instances": instances},
        runtime=time.perf_counter() - t0,
        tolerance=0.0,
    )


def ordering_test(kind: DynamicsKind, L: int = 3) -> TestReport:
    """Every single mark (every mark subset for discrete kinds) keeps every ordered 2-stack ordered."""
    t0 = time.perf_counter()
    found = find_ordering_violation(kind, max_sites=L) if kind.discrete else _single_mark_violation(kind, L)
    return TestReport(
        name=f"ordering[{kind},L<={L}]",
        kind="exact",
        passed=found is None,
        statistics={"violation": found},
        runtime=time.perf_counter() - t0,
        tolerance=0.0,
    )


def _single_mark_violation(kind: DynamicsKind, L: int):
    rec = np.empty(2, np.int64)
    for size in range(2, L + 1):
        for ring in (True, False):
            words = list(itertools.product((0, 1), repeat=size))
            locs = range(size) if ring else range(size + 1)
            for lo, hi in itertools.product(words, words):
                if any(a > b for a, b in zip(lo, hi)):
                    continue
                for loc in locs:
                    for flag in ((0, 1) if kind.name == "asep" else (0,)):
                        a = np.array(lo, np.uint8)
                        b = np.array(hi, np.uint8)
                        if kind.code in (K.HAD, K.LREP) and loc == size:
                            continue
                        K.apply_mark(kind.code, a, loc, flag, ring, rec)
                        K.apply_mark(kind.code, b, loc, flag, ring, rec)
                        if np.any(a > b):
                            return {"lower": lo, "upper": hi, "loc": loc, "ring": ring}
    return None
