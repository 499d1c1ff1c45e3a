import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mcips.lattice import OrderedStack, Topology

settings.register_profile(
    "mcips", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("mcips")


def ordered_stacks(topo: Topology, n: int):
    """Every ordered n-stack on a small topology."""
    L = topo.n_sites
    # a stack is a class word over 1..n+1
    for word in itertools.product(range(1, n + 2), repeat=L):
        w = np.array(word)
        yield OrderedStack(topo, (w[None, :] <= np.arange(1, n + 1)[:, None]).astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
