"""Queues in tandem build the multiclass measure.

Independent Bernoulli lines are fed through a chain of discrete-time
queues; the departures of each queue become the arrivals of the next and
the class of a customer is the first queue line it entered.  This script
builds one sample, checks its class densities and runs the exact Burke
check for a single queue.
"""

import numpy as np

from mcips import (
    Boundary,
    Topology,
    departures,
    geometric_stationary,
    m_map,
    sample_bernoulli,
)
from mcips.verification import burke_exact, queue_length_law_check

rng = np.random.default_rng(1)
densities = (0.2, 0.5, 0.8)
topo = Topology.segment(200_000, 0)

# one line per density; the tandem of all of them is class 1
alpha = [sample_bernoulli(r, topo, rng) for r in densities]
xi = m_map(alpha, Boundary.empty())

burn = 5_000
counts = np.bincount(xi.classes[burn:], minlength=5)[1:] / (topo.n_sites - burn)
print("class frequencies:", np.round(counts, 4))
print("expected         :", np.round(np.diff((0,) + densities + (1,)), 4))

# a single queue: departures are dominated by the services
d = departures(alpha[0], alpha[1])
print("departures <= services:", bool(np.all(d.occupancy <= alpha[1].occupancy)))
print("departure density:", round(d.occupancy[burn:].mean(), 4))

# the stationary queue length is geometric; its ratio is not rho1/rho2
law = geometric_stationary(1 / 3, 2 / 3)
print("stationary ratio at (1/3, 2/3):", law.ratio)
print(queue_length_law_check(1 / 3, 2 / 3).summary())
print(burke_exact(1 / 3, 2 / 3, 6).summary())
