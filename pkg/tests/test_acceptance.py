"""Acceptance gate: one test per release criterion, each with its runtime cap.

Every test computes its verdict, prints one ``criterion NN PASS|FAIL`` line
(also echoed in the terminal summary), and then asserts.  Criteria 7 and 8
are statistical regressions over fixed seeds; everything else is exact or
tolerance-based.
"""

import time
from pathlib import Path

import numpy as np
from scipy import stats

import conftest
import oracles
from priorbo import (
    AcquisitionSpec,
    BeliefSpec,
    ExperimentConfig,
    GaussianBelief,
    GpSurrogate,
    Kernel,
    OptimizerConfig,
    Prior,
    PriorWeighting,
    augment_observations,
    bin_count,
    binned_decayed_density,
    bound_constant,
    bound_constant_from_ratio,
    centered_gaussian_grid,
    expected_improvement,
    fit_gp,
    get_benchmark,
    maximize,
    probability_of_improvement,
    run,
    run_experiment,
    tie_break_argmax,
    uniform_prior,
    unit_space,
    verify_sandwich,
)
from priorbo.cli import EXIT_OK, main
from priorbo.experiments import LOG_REGRET_FLOOR, trace_header


def _report(num: int, name: str, ok: bool, detail: str, elapsed: float) -> None:
    line = (
        f"criterion {num:02d} {'PASS' if ok else 'FAIL'} "
        f"({elapsed:5.1f}s) {name}: {detail}"
    )
    print(line, flush=True)
    conftest.CRITERION_LINES.append(line)
    assert ok, line


def test_criterion_01_gp_matches_dense_oracle():
    """Posterior mean/variance equal a naive dense solve on random instances."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024_01)
    worst = 0.0
    for trial in range(50):
        n = int(rng.integers(1, 21))
        d = int(rng.integers(1, 5))
        family = ("matern52", "gaussian")[trial % 2]
        X = rng.uniform(0.0, 1.0, size=(n, d))
        y = rng.normal(size=n)
        ls = rng.uniform(0.1, 2.0, size=d)
        signal = float(rng.uniform(0.5, 2.0))
        noise = float(10.0 ** rng.uniform(-6.0, -2.0))
        Xq = rng.uniform(0.0, 1.0, size=(16, d))
        post = fit_gp(X, y, Kernel(family, ls, signal), noise)
        mean, var = post.predict(Xq)
        want_mean, want_var = oracles.dense_gp_posterior(
            family, X, y, Xq, ls, signal, noise
        )
        scale = np.maximum(1.0, np.abs(want_mean))
        worst = max(worst, float(np.max(np.abs(mean - want_mean) / scale)))
        worst = max(
            worst,
            float(np.max(np.abs(var - want_var) / np.maximum(1.0, want_var))),
        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5.0
    _report(
        1,
        "gp posterior vs dense oracle (50 instances)",
        ok,
        f"max rel err {worst:.2e} (tol 1e-8)",
        elapsed,
    )


def test_criterion_02_ei_matches_monte_carlo():
    """Closed-form improvement matches a million-sample estimate within 3 SE."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024_02)
    worst_z = 0.0
    degenerate_ok = True
    for trial in range(20):
        mean = float(rng.uniform(-3.0, 3.0))
        sd = float(rng.uniform(0.05, 2.5))
        incumbent = float(rng.uniform(-3.0, 3.0))
        got = float(expected_improvement(np.array([mean]), np.array([sd]), incumbent)[0])
        est, se = oracles.mc_expected_improvement(
            mean, sd, incumbent, n_samples=1_000_000, seed=3000 + trial
        )
        if se == 0.0:
            # No sample improved, so P(improve) < ~1e-6 and the true value
            # is below the estimator's resolution, about sd * 1e-5.
            degenerate_ok = degenerate_ok and abs(got - est) <= sd * 1e-5
        else:
            worst_z = max(worst_z, abs(got - est) / se)
    elapsed = time.perf_counter() - t0
    ok = worst_z <= 3.0 and degenerate_ok and elapsed < 10.0
    _report(
        2,
        "closed-form improvement vs 1e6-sample MC (20 triples)",
        ok,
        f"max |z| {worst_z:.2f} (tol 3 SE)",
        elapsed,
    )


def test_criterion_03_sandwich_holds_on_fuzzed_states():
    """Weighted scores stay inside the density-extrema brackets everywhere."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024_03)
    worst = 0.0
    for trial in range(100):
        d = int(rng.integers(1, 3))
        space = unit_space(d)
        n_obs = int(rng.integers(3, 13))
        X = space.sample_uniform(rng, n_obs)
        y = rng.normal(size=n_obs)
        surr = GpSurrogate(space).fit(X, y, rng)
        prior = Prior(
            space,
            [
                GaussianBelief(rng.uniform(0.1, 0.9), rng.uniform(0.02, 0.5))
                for _ in range(d)
            ],
        )
        report = verify_sandwich(
            surr,
            prior,
            beta=float(rng.uniform(0.5, 20.0)),
            n=int(rng.integers(1, 60)),
            Z=space.sample_uniform(rng, 256),
            incumbent_value=float(np.min(y)),
        )
        worst = max(worst, report.max_lower_violation, report.max_upper_violation)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 30.0
    _report(
        3,
        "weighting sandwich on 100 fuzzed states x 256 points",
        ok,
        f"max rel violation {worst:.2e} (tol 1e-12)",
        elapsed,
    )


def test_criterion_04_bound_constant_identities():
    """Flat belief gives 1; exponent algebra and monotonicity hold; limit is 1."""
    t0 = time.perf_counter()
    checks = []
    # Flat belief: exactly one, no tolerance.
    checks.append(bound_constant(uniform_prior(unit_space(2)), 25.0, 3) == 1.0)
    # Direct exponentiation to 1e-12.
    rng = np.random.default_rng(2024_04)
    for _ in range(50):
        ratio = float(np.exp(rng.uniform(0.0, 10.0)))
        beta = float(rng.uniform(0.1, 50.0))
        n = int(rng.integers(1, 500))
        direct = float(np.exp((beta / n) * np.log(ratio)))
        checks.append(
            abs(bound_constant_from_ratio(ratio, beta, n) - direct)
            <= 1e-12 * direct
        )
    # Step-scaling identity to 1e-9.
    for _ in range(50):
        ratio = float(np.exp(rng.uniform(0.0, 5.0)))
        beta = float(rng.uniform(0.1, 50.0))
        n = int(rng.integers(1, 500))
        lhs = bound_constant_from_ratio(ratio, beta, n)
        rhs = bound_constant_from_ratio(ratio, beta, 1) ** (1.0 / n)
        checks.append(abs(lhs - rhs) <= 1e-9 * rhs)
    # Monotonicity across a 20 x 20 grid in each argument.
    ratios = np.exp(np.linspace(0.1, 8.0, 20))
    betas = np.linspace(0.5, 40.0, 20)
    ns = np.arange(1, 21)
    for b in betas:
        col_n = [bound_constant_from_ratio(10.0, b, int(n)) for n in ns]
        checks.append(all(a > c for a, c in zip(col_n, col_n[1:])))
        col_r = [bound_constant_from_ratio(r, b, 10) for r in ratios]
        checks.append(all(a < c for a, c in zip(col_r, col_r[1:])))
    for r in ratios:
        col_b = [bound_constant_from_ratio(r, float(b), 10) for b in betas]
        checks.append(all(a < c for a, c in zip(col_b, col_b[1:])))
    # Vanishing-influence limit.
    limit_gap = abs(bound_constant_from_ratio(100.0, 10.0, 10**9) - 1.0)
    checks.append(limit_gap < 1e-6)
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed < 5.0
    _report(
        4,
        "loss-ratio constant identities and monotonicity",
        ok,
        f"{sum(checks)}/{len(checks)} identities, limit gap {limit_gap:.1e}",
        elapsed,
    )


def test_criterion_05_sensitivity_grid_fraction():
    """At step 50, at least 40% of the default width/confidence grid has C <= 1.25."""
    t0 = time.perf_counter()
    grid = centered_gaussian_grid()
    frac = grid.fraction_below(1.25)
    elapsed = time.perf_counter() - t0
    ok = frac >= 0.40 and elapsed < 5.0
    _report(
        5,
        "centered-Gaussian grid fraction with C <= 1.25 at n=50",
        ok,
        f"fraction {frac:.3f} (needs >= 0.40)",
        elapsed,
    )


def test_criterion_06_invariance_suite():
    """Flat-weighting equivalence, shift invariance, augmentation invariance."""
    t0 = time.perf_counter()
    details = []

    # (a) Flat-belief weighting reproduces the plain loop proposal-for-proposal.
    bench = get_benchmark("branin")
    flat = uniform_prior(bench.space)
    plain_cfg = OptimizerConfig(m_init=3, n_iter=10, seed=606)
    weighted_cfg = OptimizerConfig(
        m_init=3,
        n_iter=10,
        seed=606,
        acquisition=AcquisitionSpec(
            "ei", prior_weighting=PriorWeighting(flat, beta=10.0)
        ),
    )
    ra = run(plain_cfg, bench.space, bench, known_minimum=bench.known_minimum)
    rb = run(weighted_cfg, bench.space, bench, known_minimum=bench.known_minimum)
    xa = np.array([r.x for r in ra.records])
    xb = np.array([r.x for r in rb.records])
    ok_a = bool(np.array_equal(xa, xb))
    details.append(f"flat==plain {'yes' if ok_a else 'NO'}")

    # (b) Shifting every observation by +-100 leaves UCB and seeded
    # joint-draw selections identical.
    space = unit_space(2)
    rng = np.random.default_rng(2024_06)
    X = space.sample_uniform(rng, 8)
    y = np.sin(5.0 * X[:, 0]) + X[:, 1] ** 2
    prior = Prior(space, [GaussianBelief(0.4, 0.2), GaussianBelief(0.6, 0.2)])
    ok_b = True
    for kind in ("ucb", "ts"):
        spec = AcquisitionSpec(kind)
        picks = []
        for shift in (0.0, 100.0, -100.0):
            surr = GpSurrogate(space).fit(
                X, augment_observations(y + shift), np.random.default_rng(1)
            )
            inc_x = X[int(np.argmin(y))]
            picks.append(
                maximize(
                    spec, surr, space, prior,
                    incumbent_x=inc_x, n=3,
                    rng=np.random.default_rng(99),
                )
            )
        ok_b = ok_b and all(np.array_equal(picks[0], p) for p in picks[1:])
    details.append(f"shift-invariant argmax {'yes' if ok_b else 'NO'}")

    # (c) Improvement values are unchanged by shifting data and incumbent
    # together (augmentation) to 1e-9.
    mean = rng.uniform(-2.0, 2.0, size=200)
    sd = rng.uniform(0.0, 2.0, size=200)
    inc = 0.3
    shift = float(np.min(y))
    ok_c = True
    for fn in (expected_improvement, probability_of_improvement):
        base = fn(mean, sd, inc)
        shifted = fn(mean - shift, sd, inc - shift)
        ok_c = ok_c and bool(
            np.allclose(base, shifted, rtol=1e-9, atol=1e-9)
        )
    details.append(f"augmentation-invariant values {'yes' if ok_c else 'NO'}")

    elapsed = time.perf_counter() - t0
    ok = ok_a and ok_b and ok_c and elapsed < 30.0
    _report(6, "invariance suite", ok, "; ".join(details), elapsed)


def test_criterion_07_regret_study_branin():
    """Strong beliefs accelerate; wrong beliefs recover (20 paired seeds)."""
    t0 = time.perf_counter()
    common = dict(
        benchmark="branin",
        repetitions=20,
        master_seed=1234,
        m_init=3,
        workers=4,
        surrogate="gp-mle",
    )
    pibo_strong = run_experiment(
        ExperimentConfig(
            strategy="pibo", prior_quality="strong", n_iter=50, beta=10.0, **common
        ),
        write=False,
    )
    prior_samp = run_experiment(
        ExperimentConfig(
            strategy="prior_sampling", prior_quality="strong", n_iter=50, **common
        ),
        write=False,
    )
    vanilla = run_experiment(
        ExperimentConfig(
            strategy="vanilla_bo", prior_quality="strong", n_iter=100, **common
        ),
        write=False,
    )
    pibo_wrong = run_experiment(
        ExperimentConfig(
            strategy="pibo", prior_quality="wrong", n_iter=100, beta=10.0, **common
        ),
        write=False,
    )

    def at(result, it, m=3):
        return np.array([o.records[m + it - 1].regret for o in result.outcomes])

    win_vanilla = float(np.mean(at(pibo_strong, 25) < at(vanilla, 25)))
    win_sampling = float(np.mean(at(pibo_strong, 50) < at(prior_samp, 50)))
    final_wrong = float(np.log10(at(pibo_wrong, 100) + LOG_REGRET_FLOOR).mean())
    final_vanilla = float(np.log10(at(vanilla, 100) + LOG_REGRET_FLOOR).mean())
    gap = final_wrong - final_vanilla
    elapsed = time.perf_counter() - t0
    ok = (
        win_vanilla >= 0.7
        and win_sampling >= 0.7
        and abs(gap) <= 1.0
        and elapsed < 900.0
    )
    _report(
        7,
        "behavioral regret study (M=3, N=50/100, R=20)",
        ok,
        f"win vs mode-init bo @25 {win_vanilla:.2f} (>=0.7); "
        f"win vs belief sampling @50 {win_sampling:.2f} (>=0.7); "
        f"wrong-belief final gap {gap:+.2f} (|.|<=1.0)",
        elapsed,
    )


def test_criterion_08_proposals_leave_the_belief_over_time():
    """With decaying weight, proposals drift away from an off-center mode."""
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        benchmark="branin1d-log",
        strategy="pibo",
        beliefs=(BeliefSpec("gaussian", mu=-2.0, sigma_pct=0.01),),
        repetitions=20,
        master_seed=1234,
        m_init=2,
        n_iter=9,
        beta=2.0,
        surrogate="gp",
        workers=4,
    )
    res = run_experiment(cfg, write=False)
    X = np.array([[rec.x[0] for rec in o.records] for o in res.outcomes])
    dist = np.abs(X[:, 2:] - (-2.0))  # model-guided proposals only
    early = float(dist[:, 0:3].mean())
    late = float(dist[:, 6:9].mean())
    elapsed = time.perf_counter() - t0
    ok = late > early and elapsed < 120.0
    _report(
        8,
        "mean distance from belief mode, iters 7-9 vs 1-3 (20 seeds)",
        ok,
        f"early {early:.3f} < late {late:.3f}" if ok else f"early {early:.3f} !< late {late:.3f}",
        elapsed,
    )


def test_criterion_09_binned_weight_levels_and_tie_breaking():
    """Binned decayed density stays on few levels; ties break uniformly."""
    t0 = time.perf_counter()
    space = unit_space(1)
    prior = Prior(space, [GaussianBelief(0.3, 0.1)])
    Z = np.linspace(0.0, 1.0, 10_000)[:, None]
    beta = 10.0
    ok_levels = True
    prev_k = None
    for n in (1, 2, 5, 10, 20, 64, 100, 640, 2000):
        k = bin_count(beta, n)
        distinct = np.unique(binned_decayed_density(prior, Z, beta, n)).size
        ok_levels = ok_levels and distinct <= k
        if prev_k is not None:
            ok_levels = ok_levels and k <= prev_k
        prev_k = k
    # Uniform tie-breaking over four exactly-equal optima.
    values = np.array([1.0, 0.2, 1.0, 1.0, 0.0, 1.0])
    tied = [0, 2, 3, 5]
    rng = np.random.default_rng(2024_09)
    counts = np.zeros(len(values))
    draws = 10_000
    for _ in range(draws):
        counts[tie_break_argmax(values, rng)] += 1
    observed = counts[tied]
    expected = np.full(len(tied), draws / len(tied))
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    p_value = float(stats.chi2.sf(chi2, df=len(tied) - 1))
    elapsed = time.perf_counter() - t0
    ok = (
        ok_levels
        and counts[[1, 4]].sum() == 0
        and p_value > 0.001
        and elapsed < 60.0
    )
    _report(
        9,
        "piecewise-constant weight levels and uniform tie-breaking",
        ok,
        f"levels within budget {'yes' if ok_levels else 'NO'}; "
        f"chi2 p {p_value:.3f} (> 0.001)",
        elapsed,
    )


def test_criterion_10_determinism_and_schema(tmp_path):
    """Rerunning a config is byte-identical; aggregates recompute from traces."""
    t0 = time.perf_counter()
    config_text = """\
[experiment]
benchmark = branin
strategy = pibo
repetitions = 4
master_seed = 4242
workers = 1

[optimizer]
m_init = 3
n_iterations = 8
beta = 5.0

[prior]
quality = strong
"""
    cfg_path = tmp_path / "exp.ini"
    cfg_path.write_text(config_text)
    outs = []
    for label in ("first", "second"):
        out_dir = tmp_path / label
        code = main(
            [
                "run",
                "--config", str(cfg_path),
                "--override", f"experiment.output_dir={out_dir}",
            ]
        )
        assert code == EXIT_OK
        outs.append(sorted(out_dir.glob("*.csv")))
    ok_bytes = [a.name for a in outs[0]] == [b.name for b in outs[1]] and all(
        a.read_bytes() == b.read_bytes() for a, b in zip(outs[0], outs[1])
    )

    # Schema: exact trace header, then recompute the aggregate from traces.
    traces = [p for p in outs[0] if "_run" in p.name]
    agg_path = [p for p in outs[0] if p.name.endswith("_aggregate.csv")][0]
    ok_schema = all(
        p.read_text().splitlines()[0] == trace_header(2) for p in traces
    )
    regret_col = trace_header(2).split(",").index("regret")
    per_run = []
    for p in traces:
        rows = p.read_text().strip().split("\n")[1:]
        per_run.append([float(r.split(",")[regret_col]) for r in rows])
    logs = np.log10(np.array(per_run) + LOG_REGRET_FLOOR)
    want_mean = logs.mean(axis=0)
    want_err = logs.std(axis=0, ddof=1) / np.sqrt(logs.shape[0])
    agg_rows = agg_path.read_text().strip().split("\n")[1:]
    got_mean = np.array([float(r.split(",")[2]) for r in agg_rows])
    got_err = np.array([float(r.split(",")[3]) for r in agg_rows])
    ok_recompute = bool(
        np.allclose(got_mean, want_mean, rtol=0.0, atol=1e-12)
        and np.allclose(got_err, want_err, rtol=0.0, atol=1e-12)
    )
    elapsed = time.perf_counter() - t0
    ok = ok_bytes and ok_schema and ok_recompute
    _report(
        10,
        "byte-identical reruns and recomputable aggregates",
        ok,
        f"bytes {'match' if ok_bytes else 'DIFFER'}; "
        f"header {'exact' if ok_schema else 'WRONG'}; "
        f"aggregate recompute {'<=1e-12' if ok_recompute else 'DIVERGES'}",
        elapsed,
    )
