"""Acceptance criteria 1-11 at their stated tolerances and sizes.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected and repeated in the terminal summary.
"""

import time

from mcips import verification as V
from mcips.dynamics import DynamicsKind

RESULTS = []

HAD, TASEP, LREP = DynamicsKind("had"), DynamicsKind("tasep"), DynamicsKind("lrep")
SEED = 20240611


def record(number, title, ok, runtime, limit, detail=""):
    ok = bool(ok) and runtime < limit
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({runtime:.1f}s / limit {limit:g}s) {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_01_exact_burke():
    rep, dt = timed(lambda: V.burke_exact(1 / 3, 2 / 3, 6))
    tv = rep.statistics["tv"]
    assert record(1, "exact Burke, w=6", tv < 1e-10, dt, 10, f"tv={tv:.2e}")


def test_criterion_02_geometric_queue_length():
    # the stated ratio 1/2; the birth-death solve gives ratio 1/4 for these densities
    rep, dt = timed(lambda: V.queue_length_law_check(1 / 3, 2 / 3, ratio=0.5))
    err = rep.statistics["max_abs_error"]
    observed = rep.statistics["empirical_ratios"][0]
    assert record(2, "geometric queue length, ratio 1/2", err <= 1e-12, dt, 1,
                  f"max_err={err:.3g} solved_ratio={observed:.6f}")


def test_criterion_03_t_image():
    reps, dt = timed(lambda: [V.t_image_test(k, 32, (6, 14, 24), 1000, 100, seed=SEED) for k in (HAD, TASEP)])
    bad = sum(r.statistics["mismatches"] for r in reps)
    assert record(3, "pathwise T-image identity", bad == 0 and all(reps), dt, 60, f"mismatches={bad}")


def test_criterion_04_dual_reversal():
    reps, dt = timed(lambda: [V.reversal_test(k, 1000, seed=SEED) for k in (HAD, TASEP)])
    bad = sum(r.statistics["failures"] for r in reps)
    assert record(4, "dual reversal", bad == 0, dt, 60, f"failures={bad}")


def test_criterion_05_point_recovery():
    reps, dt = timed(lambda: [V.recovery_test(k, 1000, seed=SEED) for k in (HAD, TASEP)])
    bad = sum(r.statistics["failures"] for r in reps)
    assert record(5, "point recovery", bad == 0, dt, 60, f"failures={bad}")


def test_criterion_06_dual_poisson():
    reps, dt = timed(lambda: [V.dual_poisson_test(k, 512, 64.0, 10_000, seed=SEED) for k in (HAD, TASEP)])
    detail = " ".join(f"{r.name}:{'ok' if r.passed else 'reject'}" for r in reps)
    assert record(6, "dual points Poisson and independent", all(reps), dt, 600, detail)


def test_criterion_07_multiline_product():
    cases = [(k, d) for k in (HAD, TASEP) for d in ((0.7, 0.3), (0.2, 0.5, 0.8))]
    reps, dt = timed(lambda: [V.multiline_product_test(k, d, 16.0, 10_000, seed=SEED) for k, d in cases])
    worst = max(max(r.statistics["max_abs_z"]) for r in reps)
    assert record(7, "multi-line product invariance", all(reps), dt, 600, f"max|z|={worst:.2f}")


def test_criterion_08_invariance():
    kinds = [HAD, TASEP, DynamicsKind.parse("seq-lr:0.5"), DynamicsKind.parse("seq-rl:0.5")]
    reps, dt = timed(lambda: [V.invariance_test(k, (0.2, 0.5, 0.8), 2.0, 10_000, seed=SEED, window=1000)
                              for k in kinds])
    worst = max(max(r.statistics["max_abs_z"]) for r in reps)
    assert record(8, "invariance of the tandem measure", all(reps), dt, 1800, f"max|z|={worst:.2f}")


def test_criterion_09_multiclass_burke():
    reps, dt = timed(lambda: [V.multiclass_burke_test((0.2, 0.5, 0.8), m, 10_000, seed=SEED) for m in (1, 2)])
    chi = reps[0].statistics["block_chi2_p"]
    assert record(9, "truncation / multiclass Burke", all(reps), dt, 600,
                  f"m=1 block chi2 p={[round(p, 3) for p in chi]}")


def test_criterion_10_negative_controls():
    def run():
        asep = V.noninvariance_test(DynamicsKind("asep", 0.7), (0.2, 0.5), 4.0, 10_000, seed=SEED)
        par = V.noninvariance_test(DynamicsKind.parse("par"))
        return asep, par

    (asep, par), dt = timed(run)
    z = min(asep.statistics["max_abs_z"])
    fixture = par.details["fixture"]
    assert record(10, "negative controls", asep.passed and par.passed, dt, 300,
                  f"asep min|z|={z:.1f} par_fixture={fixture['lower']}/{fixture['upper']}@{fixture['marks']}")


def test_criterion_11_simulator():
    reps, dt = timed(lambda: [V.simulator_correctness(k, 5, 2, 1e5, seed=SEED) for k in (TASEP, HAD, LREP)])
    tv = max(r.statistics["tv"] for r in reps)
    uni = max(r.statistics["uniform_error"] for r in reps)
    assert record(11, "simulator vs exact CTMC", all(reps), dt, 120, f"max_tv={tv:.4f} uniform_err={uni:.1e}")
