"""Dual points and time reversal.

Every mark of a HAD or TASEP run has a dual point: the place the moving
particle came from (or a neighbouring bond for a blocked TASEP mark).
Reflected in space and run backwards in time, the trajectory is driven by
the reflected duals.  Spin words recording the invisible marks let the
original marks be read back from the trajectory alone.
"""

import numpy as np

from mcips import (
    DynamicsKind,
    Topology,
    dual_points,
    evolve,
    evolve_augmented,
    generate_poisson,
    recover_points,
    reverse_check,
    sample_fixed_count,
)

rng = np.random.default_rng(4)
topo = Topology.ring(64)

for name in ("had", "tasep"):
    kind = DynamicsKind(name)
    eta = sample_fixed_count(32, topo, rng)
    omega = generate_poisson(1.0, topo, (0.0, 10.0), kind.location_kind, rng)
    traj = evolve(kind, eta, omega)
    duals = dual_points(traj)
    rep = reverse_check(traj, duals)
    print(f"{name}: {len(omega)} marks, {len(duals)} duals, reversal ok: {rep.passed}")

    aug = evolve_augmented(kind, eta, omega, seed=rng)
    print(f"{name}: marks recovered exactly: {recover_points(aug) == omega}")

    # duals per location over a long run look like rate-1 Poisson counts
    long = generate_poisson(1.0, topo, (0.0, 200.0), kind.location_kind, rng)
    counts = np.bincount(dual_points(evolve(kind, eta, long)).locations % topo.n_sites, minlength=topo.n_sites)
    print(f"{name}: dual counts mean {counts.mean():.1f}, variance {counts.var():.1f} (Poisson: both 200)")
