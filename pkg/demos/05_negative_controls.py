"""Where the invariance fails.

Partially asymmetric marks move the tandem measure away from itself, and
the parallel-update TASEP does not even keep coupled lines ordered.
"""

from mcips import DynamicsKind
from mcips.dynamics import find_ordering_violation
from mcips.verification import exact_measure_invariance, noninvariance_test

print(exact_measure_invariance(DynamicsKind("tasep"), 6, (2, 3, 5)).summary())
asep = exact_measure_invariance(DynamicsKind("asep", 0.7), 6, (2, 3, 5))
print(asep.summary(), "residual", f"{asep.statistics['residual']:.3g}")

rep = noninvariance_test(DynamicsKind("asep", 0.7), (0.2, 0.5), 4.0, 300, seed=7)
print(rep.summary(), "drift in sigma per seed set:", [round(z, 1) for z in rep.statistics["max_abs_z"]])

hit = find_ordering_violation(DynamicsKind.parse("par"), max_sites=4)
print("parallel TASEP counterexample:", hit)
