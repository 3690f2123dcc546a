"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import time

import numpy as np
import pytest

from relaycap import RateMode, optimize_relay, rate_2h, rate_cs, rate_df, snr_vector, sweep_grid
from relaycap.optimize import superlevel_convexity_probe
from relaycap.qcverify import (
    CLAIMS,
    LEMMA6_IDS,
    cs_equivalence_check,
    lemma1_eigen_check,
    lemma6_certify,
    logdet_ratio_concavity,
    suite_ok,
    theorem_suite,
)
from relaycap.scenario import preset

LOW = RateMode.LOW_SNR


def _line_df_oracle(step=1e-4):
    # DF at rho = 0, low SNR, source 0, destination 1, unit powers and alpha = 2:
    # 0.5 * min(SNR_sr, SNR_s + SNR_r) = 0.5 * min(1/r^2, 1 + 1/(1-r)^2)
    r = np.arange(step, 1.0, step)
    v = 0.5 * np.minimum(1.0 / r**2, 1.0 + 1.0 / (1.0 - r) ** 2)
    k = int(np.argmax(v))
    return float(r[k]), float(v[k])


def _optimize(bound):
    cfg = preset("one_d_relay")
    t0 = time.perf_counter()
    res = optimize_relay(bound, cfg.layout, cfg.params, cfg.box, cfg.mode, tol=cfg.tol,
                         resolution=cfg.resolution)
    return res, time.perf_counter() - t0


def test_criterion_01_df_optimum(report_criterion):
    res, elapsed = _optimize("df_noncoherent")
    r_grid, v_grid = _line_df_oracle()
    ok = (2.20 <= res.value <= 2.30 and 0.45 <= res.argmax[0] <= 0.49
          and abs(res.value - v_grid) < 1e-3 and elapsed < 1.0)
    report_criterion(1, ok, f"value={res.value:.6f} r*={res.argmax[0]:.6f} "
                            f"grid value={v_grid:.6f} at r={r_grid:.4f} time={elapsed:.3f}s")
    assert ok


def test_criterion_02_rdf_optimum(report_criterion):
    res, elapsed = _optimize("rdf")
    ok = (abs(res.value - 2.0) <= 1e-6 and abs(res.argmax[0] - 0.5) <= 1e-3
          and res.extras["beta"] == 1.0 and elapsed < 1.0)
    report_criterion(2, ok, f"value={res.value:.9f} r*={res.argmax[0]:.6f} "
                            f"beta={res.extras['beta']} time={elapsed:.3f}s")
    assert ok


def test_criterion_03_df_gain_over_rdf(report_criterion):
    df, _ = _optimize("df_noncoherent")
    rdf, _ = _optimize("rdf")
    gain = df.value / rdf.value - 1.0
    ok = 0.10 <= gain <= 0.15
    report_criterion(3, ok, f"gain={gain:.4f}")
    assert ok


def test_criterion_04_relay_position_ordering(report_criterion):
    df, _ = _optimize("df_noncoherent")
    th, _ = _optimize("two_hop")
    ok = abs(th.argmax[0] - 0.5) <= 1e-3 and df.argmax[0] <= th.argmax[0] - 0.01
    report_criterion(4, ok, f"r*(df)={df.argmax[0]:.6f} r*(2h)={th.argmax[0]:.6f}")
    assert ok


def test_criterion_05_cut_set_coincides_with_df(report_criterion):
    cfg = preset("one_d_relay")
    worst = 0.0
    # the 101-point preset grid and the fine oracle grid over (0, 0.46]
    points = np.concatenate([np.linspace(0.0, 1.0, 101), np.arange(1, 4601) * 1e-4])
    for r in points:
        if not 0.0 < r <= 0.46:
            continue
        S = snr_vector(cfg.layout.with_relay((float(r),)), cfg.params)
        worst = max(worst, abs(rate_cs(0.0, S, LOW).value - rate_df(0.0, S, LOW).value))
    ok = worst < 1e-12
    report_criterion(5, ok, f"max |cs - df| on (0, 0.46] = {worst:.3g}")
    assert ok


def test_criterion_06_cut_set_dual_form(report_criterion):
    t0 = time.perf_counter()
    res = cs_equivalence_check(trials=1000, seed=1, tol=1e-9)
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < 5.0
    report_criterion(6, ok, f"{res.summary()} time={elapsed:.2f}s")
    assert ok


@pytest.mark.slow
def test_criterion_07_theorem_suites(report_criterion):
    failures = []
    for seed in (1, 2, 3):
        results = theorem_suite(trials=1000, seed=seed, tol=1e-9)
        if not suite_ok(results):
            failures += [
                (seed, name) for name, r in results.items()
                if (r.verdict == "fail") != (CLAIMS[name].expect == "fail")
            ]
    gtilde = CLAIMS["gtilde"].run(trials=1000, seed=1)
    ok = not failures and gtilde.verdict == "fail"
    report_criterion(7, ok, f"{len(CLAIMS) - 1} claims x 3 seeds, mismatches={failures}; "
                            f"counterexample: {len(gtilde.violations)} violating triples")
    assert ok


def test_criterion_08_certificates(report_criterion):
    t0 = time.perf_counter()
    block = {(fid, seed): lemma6_certify(fid, trials=1000, seed=seed)
             for fid in LEMMA6_IDS for seed in (1, 2, 3)}
    block_time = time.perf_counter() - t0
    eigen = lemma1_eigen_check(trials=100, seed=1)
    logdet = {dim: logdet_ratio_concavity(dim, trials=1000, seed=1) for dim in range(1, 5)}
    bad = [k for k, r in block.items() if not r.passed]
    ok = not bad and block_time < 10.0 and eigen.passed and all(r.passed for r in logdet.values())
    report_criterion(8, ok, f"sign patterns failing={bad} ({block_time:.2f}s); "
                            f"eigen {eigen.verdict}; logdet dims 1-4 "
                            f"{[r.verdict for r in logdet.values()]}")
    assert ok


def test_criterion_09_df_dominates_two_hop(report_criterion):
    cfg = preset("square_2d")
    grid = sweep_grid("df_noncoherent", cfg.layout, cfg.params, cfg.box, (51, 51), LOW)
    checked, violations = 0, 0
    for pos, value in grid.cells():
        if value is None:
            continue
        S = snr_vector(cfg.layout.with_relay(pos), cfg.params)
        checked += 1
        if not rate_df(0.0, S, LOW).value >= rate_2h(S, LOW).value:
            violations += 1
    ok = violations == 0 and checked > 0
    report_criterion(9, ok, f"{checked} valid cells, {violations} violations")
    assert ok


def test_criterion_10_unimodality_probes(report_criterion):
    details, ok = [], True
    for name, res in (("one_d_relay", (101,)), ("square_2d", (51, 51))):
        cfg = preset(name)
        grid = sweep_grid("df_noncoherent", cfg.layout, cfg.params, cfg.box, res, LOW)
        top = float(np.nanmax(grid.values))
        levels = np.linspace(0.1, 0.9, 10) * top
        results = [superlevel_convexity_probe(grid, float(level)) for level in levels]
        passed = sum(r.passed for r in results)
        ok &= passed == len(levels)
        details.append(f"{name} {passed}/{len(levels)} levels")
    report_criterion(10, ok, ", ".join(details))
    assert ok
