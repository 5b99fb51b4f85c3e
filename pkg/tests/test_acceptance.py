"""Acceptance criteria, one test per criterion.

Each check prints a single ``PASS``/``FAIL`` line with its measurements. Run with
``pytest tests/test_acceptance.py -s`` or directly as ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import statistics
import sys
import tempfile
import time
from pathlib import Path
from statistics import NormalDist

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from credset.classifiers import (  # noqa: E402
    GaussianClassModel,
    QDAModel,
    SimulationSpec,
    classify_with_uncertainty,
    discriminant_scores,
    fit_qda,
    posterior_at,
    simulate,
)
from credset.cli import main as cli_main  # noqa: E402
from credset.core import (  # noqa: E402
    compute_kappa_alpha,
    credible_mass,
    fair_gamma,
    fair_ghpd,
    make_posterior,
    phi_size,
    phi_variance,
    realize_many,
)
from credset.grid import grid_ghpd, grid_intervals, grid_posterior, region_mass  # noqa: E402
from credset.oracle import minimal_size_oracle  # noqa: E402
from helpers import (  # noqa: E402
    binomial_posterior,
    boundary_alternative,
    normal_grid,
    perturbed_competitor,
    random_posterior,
    tied_boundary_instance,
)

Z975 = NormalDist().inv_cdf(0.975)
REPORT_LINES: list[str] = []


def _report(number: int, name: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}"
    REPORT_LINES.append(line)
    print(line, flush=True)
    return ok


def check_binomial_exactness() -> bool:
    post = binomial_posterior()
    kappa = compute_kappa_alpha(post, 0.05)
    gamma = fair_gamma(post, 0.05, kappa)
    mass = credible_mass(fair_ghpd(post, 0.05), post)
    times = []
    for _ in range(50):
        t0 = time.perf_counter()
        fair_ghpd(post, 0.05)
        times.append(time.perf_counter() - t0)
    elapsed = statistics.median(times)
    ok = kappa == 0.03125 and abs(gamma - 0.2) <= 1e-12 and abs(mass - 0.95) <= 1e-12 and elapsed < 1e-3
    return _report(1, "binomial exactness", ok,
                   f"kappa={kappa!r} gamma={gamma!r} mass={mass!r} median_time={elapsed * 1e3:.3f}ms")


def _normal_boundary(step: float):
    gp = normal_grid(step)
    phi = grid_ghpd(gp, 0.05)
    return grid_intervals(gp, phi), region_mass(grid_posterior(gp), phi, "boundary")


def check_continuous_reduction() -> bool:
    step = 1e-3
    t0 = time.perf_counter()
    intervals, mass = _normal_boundary(step)
    elapsed = time.perf_counter() - t0
    _, half_mass = _normal_boundary(step / 2)
    ratio = half_mass / mass
    ok = (
        len(intervals) == 1
        and abs(intervals[0][0] + Z975) <= 2 * step
        and abs(intervals[0][1] - Z975) <= 2 * step
        and mass < 1e-2
        and abs(ratio - 0.5) <= 5e-3
        and elapsed < 1.0
    )
    return _report(2, "continuous reduction", ok,
                   f"intervals={intervals} boundary_mass={mass:.3e} halved_ratio={ratio:.5f} time={elapsed:.3f}s")


def check_minimality() -> bool:
    rng = np.random.default_rng(1001)
    worst_gap, violations = 0.0, 0
    t0 = time.perf_counter()
    for _ in range(1000):
        post = random_posterior(rng)
        alpha = float(rng.uniform(0.01, 0.99))
        phi = fair_ghpd(post, alpha)
        size = phi_size(phi)
        worst_gap = max(worst_gap, abs(size - minimal_size_oracle(post, alpha)))
        for _ in range(100):
            v = perturbed_competitor(rng, phi.values, post.probs)
            if abs(credible_mass(v, post) - (1 - alpha)) > 1e-9:
                raise AssertionError("competitor generator produced an invalid set")
            violations += size > phi_size(v) + 1e-9
    elapsed = time.perf_counter() - t0
    ok = worst_gap <= 1e-9 and violations == 0 and elapsed < 10.0
    return _report(3, "minimality", ok,
                   f"max|size-oracle|={worst_gap:.2e} beaten_by_competitor={violations} time={elapsed:.2f}s")


def check_fairness() -> bool:
    post = binomial_posterior()
    phi = fair_ghpd(post, 0.05)
    fair_pair = phi_variance(phi, post)
    alt = phi.values.copy()
    alt[0], alt[5] = 0.4, 0.0
    alt_pair = phi_variance(alt, post)
    pair_ok = abs(fair_pair - 0.0375) <= 1e-12 and abs(alt_pair - 0.04) <= 1e-12

    rng = np.random.default_rng(2002)
    worse, not_strict, min_gap = 0, 0, np.inf
    t0 = time.perf_counter()
    for _ in range(200):
        post, alpha, boundary = tied_boundary_instance(rng)
        phi = fair_ghpd(post, alpha)
        fair_var = phi_variance(phi, post)
        for _ in range(100):
            v = boundary_alternative(rng, phi.values, post.probs, boundary)
            var = phi_variance(v, post)
            worse += var < fair_var
            if np.ptp(v[boundary]) > 1e-9:
                not_strict += var <= fair_var
                min_gap = min(min_gap, var - fair_var)
    elapsed = time.perf_counter() - t0
    ok = pair_ok and worse == 0 and not_strict == 0 and elapsed < 5.0
    return _report(4, "fairness", ok,
                   f"pair=({fair_pair!r}, {alt_pair!r}) lower_alternatives={worse} non_strict={not_strict} "
                   f"min_gap={min_gap:.2e} time={elapsed:.2f}s")


def check_coin_toss() -> bool:
    post = binomial_posterior()
    phi = fair_ghpd(post, 0.05)
    n = 100_000
    bound = 3 * np.sqrt(0.2 * 0.8 / n)
    t0 = time.perf_counter()
    freq = realize_many(phi, np.arange(n)).mean(axis=0)
    elapsed = time.perf_counter() - t0
    idx = [post.index(lab) for lab in phi.boundary]
    dev = np.abs(freq[idx] - 0.2)
    ok = len(idx) == 2 and bool(np.all(dev <= bound)) and elapsed < 2.0
    return _report(5, "coin-toss semantics", ok,
                   f"boundary_freq={np.round(freq[idx], 5).tolist()} bound={bound:.5f} time={elapsed:.3f}s")


def check_simulation_pipeline() -> bool:
    import json

    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a"), Path(tmp, "b")
        codes = (cli_main(["simulate", "--output", str(a)]), cli_main(["simulate", "--output", str(b)]))
        records = [json.loads(line) for line in (a / "phi.jsonl").read_text().splitlines()]
        stable = (a / "panel.svg").read_bytes() == (b / "panel.svg").read_bytes()
    mass_ok = all(abs(r["credible_mass"] - 0.95) <= 1e-9 for r in records)
    values_ok = all(v in (0.0, r["gamma"], 1.0) for r in records for v in r["phi"].values())

    multi_spoke_seeds = 0
    for seed in range(20):
        data = simulate(SimulationSpec(seed=seed))
        model = fit_qda(data)
        if any(
            np.count_nonzero(classify_with_uncertainty(model, x, 0.05)[1].values) >= 2
            for x in data.features
        ):
            multi_spoke_seeds += 1
    ok = codes == (0, 0) and len(records) == 30 and mass_ok and values_ok and stable and multi_spoke_seeds > 0
    return _report(6, "simulation pipeline", ok,
                   f"records={len(records)} mass_ok={mass_ok} values_ok={values_ok} panel_byte_stable={stable} "
                   f"seeds_with_multi_spoke={multi_spoke_seeds}/20")


def check_qda() -> bool:
    model = QDAModel((GaussianClassModel("a", [0.0], [[1.0]], 0.5), GaussianClassModel("b", [2.0], [[1.0]], 0.5)))
    p = posterior_at(model, [0.0]).probs
    closed = 1.0 / (1.0 + np.exp(-2.0))
    post_ok = abs(p[0] - closed) <= 1e-9 and abs(p[1] - (1 - closed)) <= 1e-9
    rounded_ok = abs(p[0] - 0.880797) <= 5e-7 and abs(p[1] - 0.119203) <= 5e-7

    fitted = fit_qda(simulate(SimulationSpec(seed=7)))
    points = np.random.default_rng(3003).uniform(1.0, 9.0, size=(1000, 2))
    disagree = sum(
        int(np.argmax(discriminant_scores(fitted, x))) != int(np.argmax(posterior_at(fitted, x).probs))
        for x in points
    )
    ok = post_ok and rounded_ok and disagree == 0
    return _report(7, "QDA correctness", ok, f"posterior={p.tolist()} argmax_disagreements={disagree}/1000")


def check_flat_posterior() -> bool:
    worst = 0.0
    for k in (2, 5, 100):
        post = make_posterior([f"c{i}" for i in range(k)], np.ones(k))
        for alpha in (0.01, 0.05, 0.3, 0.5, 0.9):
            phi = fair_ghpd(post, alpha)
            worst = max(worst, float(np.max(np.abs(phi.values - (1 - alpha)))), abs(phi_variance(phi, post)))
    ok = worst <= 1e-12
    return _report(8, "flat-posterior identity", ok, f"max_deviation={worst:.2e}")


CHECKS = (
    check_binomial_exactness,
    check_continuous_reduction,
    check_minimality,
    check_fairness,
    check_coin_toss,
    check_simulation_pipeline,
    check_qda,
    check_flat_posterior,
)


def test_binomial_exactness():
    assert check_binomial_exactness()


def test_continuous_reduction():
    assert check_continuous_reduction()


def test_minimality():
    assert check_minimality()


def test_fairness():
    assert check_fairness()


def test_coin_toss():
    assert check_coin_toss()


def test_simulation_pipeline():
    assert check_simulation_pipeline()


def test_qda():
    assert check_qda()


def test_flat_posterior():
    assert check_flat_posterior()


if __name__ == "__main__":
    results = [check() for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
