"""Multi-line processes.

The top line follows the marks; each lower line follows the dual points of
the line above.  Mapped through the tandem queues, the multi-line process
is exactly the coupled process.  Its stationary law is a product of
Bernoulli lines, whatever the order of the densities.
"""

import numpy as np

from mcips import (
    DynamicsKind,
    MultiLineState,
    Topology,
    generate_poisson,
    multiline_evolve,
    sample_fixed_count,
    t_image_check,
)
from mcips.duality import multiline_by_recursion
from mcips.verification import exact_multiline_stationarity, multiline_product_test

rng = np.random.default_rng(5)
topo = Topology.ring(32)

for name in ("had", "tasep"):
    kind = DynamicsKind(name)
    lines = np.stack([sample_fixed_count(c, topo, rng).occupancy for c in (6, 14, 24)])
    state = MultiLineState(topo, lines)
    omega = generate_poisson(1.0, topo, (0.0, 30.0), kind.location_kind, rng)
    ml = multiline_evolve(state, kind, omega)
    rep = t_image_check(ml)
    finals, _ = multiline_by_recursion(state, kind, omega)
    print(f"{name}: {rep.n_events} events, tandem image mismatches {rep.mismatches}, "
          f"recursion agrees: {np.array_equal(finals, ml.final.lines)}")
    print(" ", exact_multiline_stationarity(kind, 5, (3, 1, 2)).summary())
    print(" ", multiline_product_test(kind, (0.7, 0.3), 8.0, 300, seed=6, L=128).summary())
