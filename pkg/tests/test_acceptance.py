"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
failure output) and asserts the criterion at its stated tolerance. Run:

    pytest tests/test_acceptance.py -v -s
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import PATH_3, PATH_GAMMA, PROJ_3, random_laplacian, random_params
from oracles import effective_resistance

from hrpareto import (
    GhrParams,
    IDENTITY,
    PairwiseFamilySpec,
    PrecisionMatrix,
    classify,
    cli,
    det_theta_k,
    estimate_marginal_mass,
    estimate_total_mass,
    extremal_graph,
    factorization_residual,
    gamma_to_theta,
    homogeneity_residual,
    homogeneity_residual_scan,
    is_mp_density,
    log_density_unnormalized,
    marginal_integral_k,
    mu_hr,
    pseudo_determinant,
    residual_grid,
    theta_to_gamma,
)
from hrpareto.classification import (
    REASON_BOUNDARY,
    REASON_LINEAR_MASS,
    REASON_MU_MISMATCH,
    REASON_NEGATIVE_EIGENVALUE,
    TAG_HR_DENSITY,
    TAG_INTEGRABLE_NON_PARETO,
    TAG_NON_INTEGRABLE,
)


def report(number: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_01_round_trip():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for d in (3, 4, 5, 6):
        for _ in range(100):
            lap = random_laplacian(rng, d)
            theta = PrecisionMatrix.from_matrix(lap)
            back = gamma_to_theta(theta_to_gamma(theta))
            worst = max(worst, float(np.max(np.abs(back.theta - lap))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 5.0
    report(1, ok, f"round-trip max error {worst:.2e} over 400 matrices in {elapsed:.2f}s")


def test_criterion_02_golden_values():
    theta_path = PrecisionMatrix.from_matrix(PATH_3)
    theta_proj = PrecisionMatrix.from_matrix(PROJ_3)

    gamma = theta_to_gamma(theta_path).gamma
    gamma_err = float(np.max(np.abs(gamma - PATH_GAMMA)))
    oracle = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i != j:
                oracle[i, j] = effective_resistance(PATH_3, i, j)
    oracle_err = float(np.max(np.abs(gamma - oracle)))

    mu_path_err = float(np.max(np.abs(mu_hr(theta_path) - np.array([1.5, 1.0, 1.5]))))
    mu_proj_err = float(np.max(np.abs(mu_hr(theta_proj) - np.full(3, 4.0 / 3.0))))
    # Independent route for mu: LAPACK solve of the variogram system.
    x = np.linalg.solve(PATH_GAMMA, np.ones(3))
    mu_oracle = 1.0 + x / x.sum()
    mu_oracle_err = float(np.max(np.abs(mu_hr(theta_path) - mu_oracle)))

    ok = (
        gamma_err < 1e-10
        and oracle_err < 1e-10
        and mu_path_err < 1e-10
        and mu_proj_err < 1e-10
        and mu_oracle_err < 1e-10
    )
    report(
        2,
        ok,
        f"gamma error {gamma_err:.2e} (oracle {oracle_err:.2e}), "
        f"mu errors {mu_path_err:.2e}/{mu_proj_err:.2e} (oracle {mu_oracle_err:.2e})",
    )


def test_criterion_03_mu_invariants():
    rng = np.random.default_rng(103)
    worst_const = worst_norm = worst_spread = 0.0
    for trial in range(200):
        d = 3 + trial % 4
        theta = PrecisionMatrix.from_matrix(random_laplacian(rng, d))
        mu = mu_hr(theta)
        gamma = theta_to_gamma(theta).gamma
        vec = gamma @ (mu - 1.0)
        worst_const = max(worst_const, float(np.max(np.abs(vec - vec.mean()))))
        worst_norm = max(worst_norm, abs(float((mu - 1.0).sum()) - 1.0))
        p = GhrParams(mu, theta)
        masses = [marginal_integral_k(p, k) for k in range(d)]
        worst_spread = max(worst_spread, (max(masses) - min(masses)) / max(masses))
    ok = worst_const < 1e-8 and worst_norm < 1e-12 and worst_spread < 1e-9
    report(
        3,
        ok,
        f"constant-vector dev {worst_const:.2e}, normalization err {worst_norm:.2e}, "
        f"mass spread {worst_spread:.2e} over 200 instances",
    )


def test_criterion_04_oracle_agreement():
    rng = np.random.default_rng(104)
    start = time.perf_counter()
    hits = 0
    worst_rel_se = 0.0
    n = 100_000
    for trial in range(30):
        d = 3 + trial % 2
        kind = "hr" if trial % 2 == 0 else "integrable"
        p = random_params(rng, d, kind)
        k = int(rng.integers(d))
        est = estimate_marginal_mass(p, k, n, seed=trial)
        closed = marginal_integral_k(p, k)
        if abs(est.value - closed) <= 4.0 * est.std_error:
            hits += 1
        worst_rel_se = max(worst_rel_se, est.std_error / est.value)
    elapsed = time.perf_counter() - start
    ok = hits >= 28 and worst_rel_se < 0.02 and elapsed < 60.0
    report(
        4,
        ok,
        f"{hits}/30 within 4 std errors, worst relative se {worst_rel_se:.3%}, {elapsed:.1f}s",
    )


def test_criterion_05_classifier_correctness():
    theta_proj = PrecisionMatrix.from_matrix(PROJ_3)
    theta_neg = PrecisionMatrix.from_matrix(-PROJ_3)

    cases_ok = []

    c1 = classify(GhrParams(mu_hr(theta_proj), theta_proj))
    cases_ok.append(c1.tag == TAG_HR_DENSITY and c1.reasons == ())

    c2 = classify(GhrParams(np.array([2.0, 1.0, 2.0]), theta_proj))
    cases_ok.append(c2.tag == TAG_INTEGRABLE_NON_PARETO and c2.reasons == (REASON_MU_MISMATCH,))

    c3 = classify(GhrParams(np.ones(3), theta_proj))  # degree exactly d
    cases_ok.append(
        c3.tag == TAG_NON_INTEGRABLE
        and REASON_LINEAR_MASS in c3.reasons
        and REASON_BOUNDARY in c3.reasons
    )

    c4 = classify(GhrParams(np.full(3, 4.0 / 3.0), theta_neg))
    cases_ok.append(c4.tag == TAG_NON_INTEGRABLE and REASON_NEGATIVE_EIGENVALUE in c4.reasons)

    rng = np.random.default_rng(105)
    kinds = ["hr", "integrable", "linear_fail", "spectral_fail", "rank_fail"]
    agree = 0
    for trial in range(200):
        d = int(rng.integers(3, 6))
        p = random_params(rng, d, kinds[trial % len(kinds)])
        if (classify(p).tag == TAG_HR_DENSITY) == is_mp_density(p):
            agree += 1
    ok = all(cases_ok) and agree == 200
    report(
        5,
        ok,
        f"constructed classes {['ok' if c else 'BAD' for c in cases_ok]}, "
        f"route agreement {agree}/200",
    )


def test_criterion_06_homogeneity():
    rng = np.random.default_rng(106)
    worst = 0.0
    thetas = [PROJ_3, PATH_3] + [random_laplacian(rng, 4) for _ in range(3)]
    for mat in thetas:
        theta = PrecisionMatrix.from_matrix(mat)
        p = GhrParams(mu_hr(theta), theta)
        d = theta.d
        grid = residual_grid(d, 100, seed=6)
        for y in grid:
            base = log_density_unnormalized(p, y)
            for t in (1.5, 2.0, 10.0):
                shifted = log_density_unnormalized(p, t * y)
                worst = max(worst, abs(shifted - base + (d + 1) * math.log(t)))
    ok = worst < 1e-12
    report(6, ok, f"max |log f(ty) - log f(y) + (d+1) log t| = {worst:.2e} on 100-point grids")


def test_criterion_07_theorem_probe():
    rng = np.random.default_rng(107)
    min_violation = float("inf")
    for _ in range(20):
        mu = rng.normal(size=3)
        family = PairwiseFamilySpec.uniform(IDENTITY, mu, PROJ_3)
        assert family.support_connected
        scan = homogeneity_residual_scan(family)
        min_violation = min(min_violation, scan.max_residual)

    hand_family = PairwiseFamilySpec.uniform(IDENTITY, np.ones(3), PROJ_3)
    hand = homogeneity_residual(hand_family, 2.0 * np.ones(3), 2.0)
    hand_ok = abs(hand - 3.227) < 1e-3

    theta = PrecisionMatrix.from_matrix(PATH_3)
    log_family = PairwiseFamilySpec.log_family(mu_hr(theta), PATH_3)
    log_scan = homogeneity_residual_scan(log_family)

    ok = min_violation > 0.1 and hand_ok and log_scan.max_residual <= 1e-12
    report(
        7,
        ok,
        f"identity stats: min over 20 mu of max residual {min_violation:.3g} (> 0.1), "
        f"hand point {hand:.4f}, log stats max residual {log_scan.max_residual:.2e}",
    )


def test_criterion_08_conditional_independence(tmp_path):
    theta = PrecisionMatrix.from_matrix(PATH_3)
    p = GhrParams(mu_hr(theta), theta)
    absent = factorization_residual(p, 0, 2)
    present = factorization_residual(p, 0, 1)
    edges = set(extremal_graph(theta).edges)

    doc = tmp_path / "path.json"
    doc.write_text(json.dumps({"d": 3, "theta": PATH_3.tolist()}))
    code = cli.main(["graph", str(doc)])
    assert code == 0

    ok = absent <= 1e-12 and present >= 2.0 and edges == {(0, 1), (1, 2)}
    report(
        8,
        ok,
        f"residual(1,3) = {absent:.2e}, residual(1,2) = {present:.3f}, "
        f"edges {sorted((i + 1, j + 1) for i, j in edges)} (1-based)",
    )


def test_criterion_08_cli_edges_one_based(tmp_path, capsys):
    doc = tmp_path / "path.json"
    doc.write_text(json.dumps({"d": 3, "theta": PATH_3.tolist()}))
    code = cli.main(["graph", str(doc)])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["edges"] == [[1, 2], [2, 3]]


def test_criterion_09_pseudo_determinant_invariance():
    rng = np.random.default_rng(109)
    worst_spread = 0.0
    constants = []
    for trial in range(100):
        d = 3 + trial % 4
        theta = PrecisionMatrix.from_matrix(random_laplacian(rng, d))
        dets = [det_theta_k(theta, k) for k in range(d)]
        worst_spread = max(worst_spread, (max(dets) - min(dets)) / max(dets))
        constants.append(d * dets[0] / pseudo_determinant(theta.theta))
    constants = np.array(constants)
    const_dev = float(np.max(np.abs(constants - 1.0)))
    ok = worst_spread < 1e-9 and const_dev < 1e-6
    report(
        9,
        ok,
        f"det spread {worst_spread:.2e}; measured det(Theta_k) = pdet/d with "
        f"d*det/pdet in [{constants.min():.12f}, {constants.max():.12f}]",
    )


def test_criterion_10_mp3_via_oracle():
    n = 100_000
    theta = PrecisionMatrix.from_matrix(PATH_3)
    p = GhrParams(mu_hr(theta), theta)
    z = estimate_total_mass(p, n, seed=10)
    marginals = [estimate_marginal_mass(p, k, n, seed=10) for k in range(3)]
    ratios = [e.value / z.value for e in marginals]
    ratio_ses = [
        r * math.hypot(e.std_error / e.value, z.std_error / z.value)
        for r, e in zip(ratios, marginals)
    ]
    pairwise_ok = all(
        abs(ratios[a] - ratios[b]) <= 3.0 * (ratio_ses[a] + ratio_ses[b])
        for a in range(3)
        for b in range(a + 1, 3)
    )

    theta_proj = PrecisionMatrix.from_matrix(PROJ_3)
    p2 = GhrParams(np.array([2.0, 1.0, 2.0]), theta_proj)
    e1 = estimate_marginal_mass(p2, 0, n, seed=10)
    e2 = estimate_marginal_mass(p2, 1, n, seed=10)
    ratio = e1.value / e2.value
    ratio_se = ratio * math.hypot(e1.std_error / e1.value, e2.std_error / e2.value)
    exp_ok = abs(ratio - math.exp(-1.0)) <= 3.0 * ratio_se

    ok = pairwise_ok and exp_ok
    report(
        10,
        ok,
        f"P(Y_k > 1) estimates {[f'{r:.4f}' for r in ratios]} pairwise consistent; "
        f"I1/I2 = {ratio:.5f} vs e^-1 = {math.exp(-1.0):.5f} (se {ratio_se:.2g})",
    )
