"""Compiled inner loops.

All kernels work on raw positions (``0 .. N-1``) and mutate their array
arguments in place.  Callers validate inputs; kernels assume them valid.
Bond ``b`` joins positions ``b-1`` (left) and ``b`` (right).
"""

import numpy as np
from numba import njit

HAD = 0
TASEP = 1
LREP = 2
ASEP = 3
SEQ_LR = 4
SEQ_RL = 5
PAR = 6

NONE = -1


# --------------------------------------------------------------------- queues


@njit(cache=True)
def queue_run(a1, a2, z_start, z_out, d_out):
    """Run ``Z(j) = (Z(j-1) + a1(j) - a2(j))^+`` from ``Z(-1) = z_start``."""
    z = z_start
    for j in range(a1.shape[0]):
        s = z + a1[j]
        if a2[j] == 1 and s > 0:
            d_out[j] = 1
        else:
            d_out[j] = 0
        z = s - a2[j]
        z = max(z, 0)
        z_out[j] = z


@njit(cache=True)
def ring_loynes(a1, a2, z_out, d_out):
    """Periodic solution of the queue recursion on a ring (stable input assumed).

    The periodic queue is empty at an argmin of the cumulative net input, so
    one lap from there gives the solution.  Returns the queue length found
    back at the start site after the lap (0 when consistent).
    """
    n = a1.shape[0]
    c = 0
    cmin = 0
    jmin = 0
    for j in range(n):
        c += a1[j] - a2[j]
        if j == 0 or c < cmin:
            cmin = c
            jmin = j
    z = 0
    for step in range(1, n + 1):
        j = (jmin + step) % n
        s = z + a1[j]
        if a2[j] == 1 and s > 0:
            d_out[j] = 1
        else:
            d_out[j] = 0
        z = s - a2[j]
        z = max(z, 0)
        z_out[j] = z
    return z_out[jmin]


# ------------------------------------------------------------- single jumps


@njit(cache=True)
def had_source(line, j, ring):
    """Closest occupied position at or left of ``j``; -1 if none."""
    n = line.shape[0]
    if ring:
        i = j
        for _ in range(n):
            if line[i] == 1:
                return i
            i -= 1
            if i < 0:
                i += n
        return NONE
    for i in range(j, -1, -1):
        if line[i] == 1:
            return i
    return NONE


@njit(cache=True)
def lrep_source(line, j, ring):
    """Closest empty position at or left of ``j``; -1 if none."""
    n = line.shape[0]
    if ring:
        i = j
        for _ in range(n):
            if line[i] == 0:
                return i
            i -= 1
            if i < 0:
                i += n
        return NONE
    for i in range(j, -1, -1):
        if line[i] == 0:
            return i
    return NONE


@njit(cache=True)
def bond_sites(b, n, ring):
    """(left, right) positions of bond ``b``; (-1, -1) for a virtual edge bond."""
    if ring:
        left = b - 1
        if left < 0:
            left += n
        return left, b
    if b <= 0 or b >= n:
        return NONE, NONE
    return b - 1, b


@njit(cache=True)
def apply_mark(code, line, loc, flag, ring, rec):
    """Apply one continuous-time mark to a single line.

    ``rec`` (length 2) receives the move as (from, to), or (-1, -1).
    """
    n = line.shape[0]
    rec[0] = NONE
    rec[1] = NONE
    if code == HAD:
        if loc < 0:
            return
        i = had_source(line, loc, ring)
        if i != NONE and i != loc:
            line[i] = 0
            line[loc] = 1
            rec[0] = i
            rec[1] = loc
    elif code == LREP:
        if loc < 0:
            return
        i = lrep_source(line, loc, ring)
        if i != NONE and i != loc:
            line[i] = 1
            line[loc] = 0
            rec[0] = loc
            rec[1] = i
    else:
        left, right = bond_sites(loc, n, ring)
        if left == NONE:
            return
        if code == ASEP and flag == 1:
            if line[left] == 1 and line[right] == 0:
                line[left] = 0
                line[right] = 1
                rec[0] = left
                rec[1] = right
        else:
            if line[right] == 1 and line[left] == 0:
                line[right] = 0
                line[left] = 1
                rec[0] = right
                rec[1] = left


@njit(cache=True)
def run_stack(code, stack, locs, flags, ring, jumps):
    """Apply marks in order to every line of ``stack``; record moves in ``jumps``."""
    n_lines = stack.shape[0]
    rec = np.empty(2, np.int64)
    for e in range(locs.shape[0]):
        for k in range(n_lines):
            apply_mark(code, stack[k], locs[e], flags[e], ring, rec)
            jumps[e, k, 0] = rec[0]
            jumps[e, k, 1] = rec[1]


@njit(cache=True)
def run_stack_final(code, stack, locs, flags, ring):
    rec = np.empty(2, np.int64)
    for e in range(locs.shape[0]):
        for k in range(stack.shape[0]):
            apply_mark(code, stack[k], locs[e], flags[e], ring, rec)


@njit(cache=True)
def parallel_tick(line, locs, ring, jumps, k):
    """Parallel TASEP tick on one line: enablement read from the pre-tick state."""
    n = line.shape[0]
    m = locs.shape[0]
    enabled = np.zeros(m, np.bool_)
    for e in range(m):
        left, right = bond_sites(locs[e], n, ring)
        if left != NONE and line[right] == 1 and line[left] == 0:
            enabled[e] = True
    for e in range(m):
        jumps[e, k, 0] = NONE
        jumps[e, k, 1] = NONE
        if enabled[e]:
            left, right = bond_sites(locs[e], n, ring)
            line[right] = 0
            line[left] = 1
            jumps[e, k, 0] = right
            jumps[e, k, 1] = left


# -------------------------------------------------------------- multiclass


@njit(cache=True)
def mc_had(xi, j, ring):
    """Multiclass HAD bell at ``j``: records to the left are pulled in a chain."""
    n = xi.shape[0]
    cur = xi[j]
    if cur == 1:
        return
    y = j
    for _ in range(n - 1 if ring else j):
        y -= 1
        if y < 0:
            y += n
        if xi[y] < cur:
            old = xi[y]
            xi[y] = cur
            cur = old
            if cur == 1:
                break
    xi[j] = cur


@njit(cache=True)
def mc_lrep(xi, j, hole, ring):
    """Multiclass LREP bell at ``j`` (class ``hole`` is the empty site)."""
    n = xi.shape[0]
    cur = xi[j]
    if cur == hole:
        return
    y = j
    for _ in range(n - 1 if ring else j):
        y -= 1
        if y < 0:
            y += n
        if xi[y] > cur:
            old = xi[y]
            xi[y] = cur
            cur = old
            if cur == hole:
                break
    xi[j] = cur


@njit(cache=True)
def mc_bond(xi, b, right_jump, ring):
    n = xi.shape[0]
    left, right = bond_sites(b, n, ring)
    if left == NONE:
        return
    if right_jump:
        if xi[left] < xi[right]:
            tmp = xi[left]
            xi[left] = xi[right]
            xi[right] = tmp
    elif xi[right] < xi[left]:
        tmp = xi[left]
        xi[left] = xi[right]
        xi[right] = tmp


@njit(cache=True)
def run_multiclass(code, xi, n_classes, locs, flags, ring):
    hole = n_classes + 1
    for e in range(locs.shape[0]):
        loc = locs[e]
        if code == HAD:
            if loc >= 0:
                mc_had(xi, loc, ring)
        elif code == LREP:
            if loc >= 0:
                mc_lrep(xi, loc, hole, ring)
        elif code == ASEP:
            mc_bond(xi, loc, flags[e] == 1, ring)
        else:
            mc_bond(xi, loc, False, ring)


@njit(cache=True)
def run_multiclass_ticks(code, xi, locs, ticks, ring):
    """Sequential TASEP ticks on a multiclass word; marks sorted by (tick, loc)."""
    m = locs.shape[0]
    start = 0
    while start < m:
        stop = start
        while stop < m and ticks[stop] == ticks[start]:
            stop += 1
        if code == SEQ_LR:
            for e in range(start, stop):
                mc_bond(xi, locs[e], False, ring)
        else:
            for e in range(stop - 1, start - 1, -1):
                mc_bond(xi, locs[e], False, ring)
        start = stop


# ---------------------------------------------------------------- augmented


@njit(cache=True)
def run_augmented(code, line, gamma, zeta, locs, ring, jumps, gflip, zflip):
    """Single line plus spin words; records moves and spin flips per event."""
    n = line.shape[0]
    rec = np.empty(2, np.int64)
    for e in range(locs.shape[0]):
        loc = locs[e]
        gflip[e] = NONE
        zflip[e] = NONE
        if code == HAD:
            if line[loc] == 1 or had_source(line, loc, ring) == NONE:
                gamma[loc] ^= 1
                gflip[e] = loc
                jumps[e, 0, 0] = NONE
                jumps[e, 0, 1] = NONE
            else:
                apply_mark(HAD, line, loc, 0, ring, rec)
                jumps[e, 0, 0] = rec[0]
                jumps[e, 0, 1] = rec[1]
        else:
            left, right = bond_sites(loc, n, ring)
            jumps[e, 0, 0] = NONE
            jumps[e, 0, 1] = NONE
            if left == NONE:
                continue
            if line[right] == 0:
                gamma[right] ^= 1
                gflip[e] = right
            elif line[left] == 1:
                zeta[loc] ^= 1
                zflip[e] = loc
            else:
                line[right] = 0
                line[left] = 1
                jumps[e, 0, 0] = right
                jumps[e, 0, 1] = left


# ------------------------------------------------------------ multi-line


@njit(cache=True)
def multiline_run(code, lines, locs, ring, cascade, jumps):
    """Local cascade: the bottom line takes the mark, each line above takes
    the dual point of the line below it.  ``cascade[e, k]`` is the mark seen
    by line ``k`` at event ``e`` and ``jumps[e, k]`` its move.
    """
    n_lines = lines.shape[0]
    rec = np.empty(2, np.int64)
    for e in range(locs.shape[0]):
        mark = locs[e]
        for k in range(n_lines - 1, -1, -1):
            cascade[e, k] = mark
            line = lines[k]
            rec[0] = NONE
            rec[1] = NONE
            dual = dual_of(code, line, mark, ring)
            apply_mark(code, line, mark, 0, ring, rec)
            jumps[e, k, 0] = rec[0]
            jumps[e, k, 1] = rec[1]
            mark = dual


# ----------------------------------------------------- fused statistics runs


@njit(cache=True)
def dual_poisson_replica(code, line, horizon, seed, n_gaps, checkpoints,
                         probe_sites, gaps_out, counts_out, probe_counts, probe_occ):
    """One stationary ring run with on-the-fly dual-point bookkeeping.

    Generates rate-1 marks on every site (HAD) or bond (TASEP) with numba's
    own generator seeded by ``seed``.  Records, per location, the first
    ``n_gaps`` inter-arrival gaps of the dual points (the first gap measured
    from time 0) and the total dual count on [0, horizon).  At each checkpoint
    time it stores the dual counts and occupancies at ``probe_sites``.
    Gaps never observed are NaN.  Returns the number of locations that saw
    fewer than ``n_gaps`` duals.
    """
    np.random.seed(seed)
    n = line.shape[0]
    last = np.zeros(n, np.float64)
    seen = np.zeros(n, np.int64)
    for x in range(n):
        counts_out[x] = 0
        for g in range(n_gaps):
            gaps_out[g, x] = np.nan
    t = 0.0
    cp = 0
    n_cp = checkpoints.shape[0]
    rec = np.empty(2, np.int64)
    while True:
        t += np.random.exponential(1.0 / n)
        while cp < n_cp and checkpoints[cp] <= t:
            for q in range(probe_sites.shape[0]):
                probe_counts[cp, q] = counts_out[probe_sites[q]]
                probe_occ[cp, q] = line[probe_sites[q]]
            cp += 1
        if t >= horizon:
            break
        loc = np.random.randint(0, n)
        if code == HAD:
            dual = had_source(line, loc, True)
            apply_mark(HAD, line, loc, 0, True, rec)
        else:
            if line[loc] == 1:
                dual = loc
            else:
                dual = loc + 1
                if dual == n:
                    dual = 0
            apply_mark(TASEP, line, loc, 0, True, rec)
        counts_out[dual] += 1
        g = seen[dual]
        if g < n_gaps:
            gaps_out[g, dual] = t - last[dual]
            last[dual] = t
            seen[dual] = g + 1
    short = 0
    for x in range(n):
        if seen[x] < n_gaps:
            short += 1
    return short


@njit(cache=True)
def dual_of(code, line, mark, ring):
    """Dual location of ``mark`` for the line's state just before the mark."""
    n = line.shape[0]
    if code == HAD:
        if mark < 0:
            return mark
        i = had_source(line, mark, ring)
        return i if i != NONE else -1
    left, right = bond_sites(mark, n, ring)
    if left == NONE:
        return mark if mark <= 0 else n
    if line[right] == 1:
        return mark
    if ring and mark + 1 == n:
        return 0
    return mark + 1


@njit(cache=True)
def trace_duals(code, line, locs, ring, out):
    """Run one line through its marks, writing the dual location of each."""
    rec = np.empty(2, np.int64)
    for e in range(locs.shape[0]):
        out[e] = dual_of(code, line, locs[e], ring)
        apply_mark(code, line, locs[e], 0, ring, rec)


@njit(cache=True)
def occupation_times(code, line, rates, horizon, seed, out):
    """Time spent in each state (bit mask of the line) over ``[0, horizon)``.

    ``rates[loc]`` is the mark rate at location ``loc``; for ASEP the first
    half of ``rates`` are left marks and the second half right marks.
    """
    np.random.seed(seed)
    n = line.shape[0]
    total = 0.0
    for r in rates:
        total += r
    cum = np.cumsum(rates)
    rec = np.empty(2, np.int64)
    t = 0.0
    while True:
        mask = 0
        for x in range(n):
            if line[x] == 1:
                mask |= 1 << x
        dt = np.random.exponential(1.0 / total)
        if t + dt >= horizon:
            out[mask] += horizon - t
            break
        out[mask] += dt
        t += dt
        u = np.random.random() * total
        loc = np.searchsorted(cum, u, side="right")
        if loc >= rates.shape[0]:
            loc = rates.shape[0] - 1
        flag = 0
        if code == ASEP and loc >= n:
            loc -= n
            flag = 1
        apply_mark(code, line, loc, flag, True, rec)
