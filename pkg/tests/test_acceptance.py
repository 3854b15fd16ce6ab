"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion."""
import json
import time

import numpy as np
import pytest

from interactive_rd.binary_erasure import (
    BinaryJoint,
    ErasureAlphaPair,
    c_value,
    eta_value,
    psi,
    rho1_exact,
    rsum1_dsbs,
)
from interactive_rd.cli import main
from interactive_rd.info_core import (
    DistortionMatrix,
    JointPmf,
    binary_entropy,
    conditional_mutual_information,
)
from interactive_rd.interaction_gain import midpoint_violation
from interactive_rd.two_message import (
    Table1Params,
    entropy_ratio_check,
    find_ratio_witness,
    table1_cross_check,
    table1_point,
)
from interactive_rd.wyner_ziv import GridSpec, rho1_oracle, wz_rate_oracle


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed, limit):
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail} [{elapsed:.3f}s, limit {limit:g}s]")
        assert ok, detail

    return emit


def test_criterion_1_reference_ratio(report, capsys):
    t0 = time.perf_counter()
    code = main(["reproduce-paper", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - t0
    ratio = float(doc["results"]["remark2_ratio"])
    report(1, code == 0 and abs(ratio - 8.16) <= 0.02, f"reproduce-paper ratio {ratio:.6f} vs 8.16 +- 0.02", elapsed, 10)


def test_criterion_2_dsbs_closed_form(report):
    t0 = time.perf_counter()
    worst = max(
        abs(rho1_exact(BinaryJoint.dsbs(p), D) - (1 + D) * binary_entropy(p))
        for p in (0.05, 0.15, 0.25, 0.35, 0.45)
        for D in (0.0, 0.25, 0.5, 0.75, 1.0)
    )
    report(2, worst <= 1e-9, f"max |rho1_exact - (1+D)h(p)| = {worst:.3g} <= 1e-9", time.perf_counter() - t0, 1)


def test_criterion_3_oracle_agreement(report):
    rng = np.random.default_rng(2024)
    erasure = DistortionMatrix.binary_erasure()
    grid = GridSpec(resolution=128, refine_rounds=3)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        p, q, D = rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)
        pxy = BinaryJoint.from_bsc(p, q)
        worst = max(worst, abs(rho1_oracle(pxy.to_joint(), erasure, D, grid) - rho1_exact(pxy, D)))
    report(3, worst <= 5e-3, f"max |oracle - exact| over 10 instances = {worst:.3g} <= 5e-3",
           time.perf_counter() - t0, 300)


def test_criterion_4_gain_certificate(report):
    t0 = time.perf_counter()
    cert = midpoint_violation(1e-6, 0.1, 0.5)
    pt = table1_point(Table1Params(1e-6, 0.1, 0.5))
    err = abs(cert.gap_lower - (rsum1_dsbs(1e-6, cert.D) - pt.sum_rate))
    report(4, cert.gap_lower > 0 and err <= 1e-12,
           f"gap_lower = {cert.gap_lower:.6g} > 0, identity error {err:.3g} <= 1e-12", time.perf_counter() - t0, 1)


def test_criterion_5_limits(report):
    t0 = time.perf_counter()
    p = 1e-100
    c_over_h = c_value(p, 0.1, 0.5, 1.0) / binary_entropy(p)
    one_plus_d = 1 + eta_value(p, 0.1, 0.5, 1.0)
    ok = abs(c_over_h - 1.95) < 0.05 and abs(one_plus_d - 1.55) < 1e-3
    report(5, ok, f"C/h = {c_over_h:.6f} (1.95 +- 0.05), 1+eta = {one_plus_d:.6f} (1.55 +- 1e-3)",
           time.perf_counter() - t0, 1)


def test_criterion_6_ratio_witness(report):
    t0 = time.perf_counter()
    params, pt = find_ratio_witness(5)
    ok = pt.sum_ratio > 5 and pt.split_ratio < 0.2
    report(6, ok, f"L=5 witness p={params.p:g}, q={params.q:.4g}: sum_ratio {pt.sum_ratio:.4f}, "
           f"split_ratio {pt.split_ratio:.4f}", time.perf_counter() - t0, 30)


def test_criterion_7_closed_form_consistency(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        p = rng.uniform(1e-3, 0.4)
        diff, _, _ = table1_cross_check(Table1Params(p, rng.uniform(0.01, 0.99), rng.uniform(0, 1)))
        worst = max(worst, diff)
    report(7, worst <= 1e-9, f"max closed-form vs direct difference {worst:.3g} <= 1e-9", time.perf_counter() - t0, 5)


def _random_binary(rng):
    w = rng.random(4) + 0.02
    return BinaryJoint(*(w / w.sum()))


def test_criterion_8_property_suites(report):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    failures = []

    worst = 0.0
    for _ in range(1000):
        pxy = _random_binary(rng)
        A, B = rng.random(2), rng.random(2)
        mid = psi(pxy, ErasureAlphaPair(*(A + B) / 2))
        avg = (psi(pxy, ErasureAlphaPair(*A)) + psi(pxy, ErasureAlphaPair(*B))) / 2
        worst = max(worst, avg - mid)
    if worst > 1e-10:
        failures.append(f"psi concavity violation {worst:.3g}")

    worst = 0.0
    for _ in range(1000):
        p, q = rng.uniform(0.001, 0.999), rng.uniform(0.001, 0.999)
        a, b, D = rng.random(3)
        worst = max(
            worst,
            abs(c_value(p, q, a, b) - c_value(p, 1 - q, b, a)),
            abs(eta_value(p, q, a, b) - eta_value(p, 1 - q, b, a)),
            abs(rho1_exact(BinaryJoint.from_bsc(p, q), D) - rho1_exact(BinaryJoint.from_bsc(p, 1 - q), D)),
        )
    if worst > 1e-10:
        failures.append(f"mirror symmetry error {worst:.3g}")

    grid = GridSpec(resolution=24, refine_rounds=0)
    erasure = DistortionMatrix.binary_erasure()
    for _ in range(10):
        joint = _random_binary(rng).to_joint()
        rates = [wz_rate_oracle(joint, erasure, D, grid).rate for D in np.linspace(0.05, 1.0, 8)]
        if any(b > a + 1e-12 for a, b in zip(rates, rates[1:])):
            failures.append("wz_rate_oracle increased with D")

    worst = 0.0
    for _ in range(1000):
        j = rng.random((2, 3, 2))
        j /= j.sum()
        lhs = conditional_mutual_information(j, (0,), (1, 2), ())
        rhs = conditional_mutual_information(j, (0,), (2,), ()) + conditional_mutual_information(j, (0,), (1,), (2,))
        worst = max(worst, abs(lhs - rhs))
    if worst > 1e-10:
        failures.append(f"chain identity error {worst:.3g}")

    detail = "; ".join(failures) or "concavity, mirror symmetry, oracle monotonicity and chain identity all hold"
    report(8, not failures, detail, time.perf_counter() - t0, float("inf"))


def test_criterion_9_entropy_ratio(report):
    t0 = time.perf_counter()
    vals = [entropy_ratio_check(2, p) for p in (1e-6, 1e-9, 1e-12)]
    ok = vals[0] < vals[1] < vals[2] and abs(vals[2] - 2) < 0.05 * 2
    report(9, ok, "h(2p)/h(p) at 1e-6, 1e-9, 1e-12 = " + ", ".join(f"{v:.5f}" for v in vals),
           time.perf_counter() - t0, 1)
