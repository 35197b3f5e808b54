"""Acceptance gate: one test per headline criterion, each printing a
PASS line with its measured numbers.

The expensive ensembles are session fixtures with fixed seeds, so the whole
module is deterministic and reproducible.  Worker count only affects wall
time, never results.
"""

import math
import os
import random
import time
from dataclasses import replace

import mpmath as mp
import pytest

from divestsim import config as config_mod
from divestsim.analysis import (
    BehaviorType,
    classify,
    detect_crash,
    is_bimodal,
    summarize,
    sweep,
)
from divestsim.cli import main
from divestsim.engine import SimConfig, run, run_many
from divestsim.firm import FirmParams, FirmState, npv_constrained, npv_unconstrained
from divestsim.policy import PolicyParams, PolicyState, policy_probability, sample_policy
from divestsim.social import SocialParams, adoption_probability

THREADS = int(os.environ.get("DIVESTSIM_TEST_THREADS", "2"))
mp.mp.dps = 40

GRID_AXES = [
    ("social.sif", [0.05 + i * 0.05 for i in range(14)]),
    ("rho", [0.05 + i * 0.05 for i in range(14)]),
]
GRID_RUNS = 48
SRI_AXIS = [0.05, 0.2, 0.4, 0.55, 0.7]
SRI_RUNS = 100


def base(**kw):
    soc_kw = {k: v for k, v in kw.items() if k in ("sif", "alpha", "delta")}
    cfg_kw = {k: v for k, v in kw.items() if k not in soc_kw}
    soc = replace(SocialParams(), **soc_kw) if soc_kw else SocialParams()
    return SimConfig(social=soc, **cfg_kw)


def report(num, name, detail):
    print(f"\nACCEPTANCE {num} ({name}): PASS [{detail}]")


@pytest.fixture(scope="session")
def grid_sweep():
    """The 14x14 sif x rho sweep shared by criteria 7 and 8."""
    return sweep(GRID_AXES, base(seed=20260810), n_runs=GRID_RUNS, threads=THREADS)


@pytest.fixture(scope="session")
def sri_axis_records():
    """SRI-axis ensembles at high sif, shared by criteria 5 and 7."""
    out = {}
    for i, sri in enumerate(SRI_AXIS):
        cfg = base(sif=0.6, sri_share=sri, seed=52000 + 1000 * i)
        out[sri] = (cfg, run_many(cfg, SRI_RUNS, threads=THREADS))
    return out


def test_criterion_01_cce_ceiling():
    """Type-A runs at slow social interaction extract the whole horizon."""
    started = time.perf_counter()
    cfg = base(sif=0.05, rho=0.5, seed=101)
    records = run_many(cfg, 100, threads=THREADS)
    elapsed = time.perf_counter() - started
    type_a = [r for r in records if classify(r, cfg) is BehaviorType.A]
    assert type_a, "expected type-A runs at sif=0.05, rho=0.5"
    assert all(r.final_cce == 625.0 for r in type_a)
    assert elapsed < 30.0
    report(1, "CCE ceiling", f"{len(type_a)}/100 type A, all exactly 625.0, {elapsed:.1f}s")


def test_criterion_02_budget_conservation():
    """budget + cce == b0 at every month over randomized configurations."""
    rng = random.Random(4321)
    worst = 0.0
    for i in range(1000):
        firm = FirmParams(
            r0=rng.uniform(50, 800),
            b0=rng.uniform(50, 500),
            q=rng.uniform(0.5, 8.0),
            x=rng.uniform(0.0, 8.0),
            price=rng.uniform(2.0, 20.0),
        )
        soc = SocialParams(
            sif=rng.random(),
            alpha=rng.uniform(0.05, 1.0),
            delta=rng.uniform(0.0, 0.8),
            k_ring=rng.choice([4, 6, 8]),
        )
        cfg = SimConfig(
            firm=firm,
            social=soc,
            n_investors=rng.randrange(30, 80),
            rho=rng.random(),
            sri_share=rng.random(),
            liquidity=rng.uniform(0.7, 3.0),
            init_convinced=rng.random() * 0.5,
            horizon=rng.randrange(5, 60),
            mu=rng.uniform(0.0, 8.0),
            seed=rng.getrandbits(32),
        )
        rec = run(cfg)
        for cce, budget in zip(rec.cce, rec.budget):
            rel = abs(budget + cce - firm.b0) / firm.b0
            worst = max(worst, rel)
    assert worst <= 1e-9
    report(2, "budget conservation", f"1000 configs, worst relative error {worst:.2e}")


def test_criterion_03_sif_trend():
    """Mean emissions fall with the social interaction frequency."""
    started = time.perf_counter()
    means = {}
    for i, sif in enumerate((0.1, 0.6, 0.2, 0.5)):
        cfg = base(sif=sif, seed=3000 + 100 * i)
        means[sif] = summarize(run_many(cfg, 400, threads=THREADS), cfg).mean_cce
    elapsed = time.perf_counter() - started
    assert means[0.1] > means[0.6]
    decline = 1.0 - means[0.5] / means[0.2]
    assert decline >= 0.30
    assert elapsed < 300.0
    report(
        3,
        "SIF trend",
        f"mean(0.1)={means[0.1]:.0f} > mean(0.6)={means[0.6]:.0f}; "
        f"decline over [0.2, 0.5] = {decline:.0%}; {elapsed:.0f}s",
    )


def test_criterion_04_liquidity_crash():
    """Thin markets crash immediately."""
    cfg = base(liquidity=0.8, seed=404)
    records = run_many(cfg, 200, threads=THREADS)
    early = sum(
        1 for r in records if r.first_crash_month is not None and r.first_crash_month <= 5
    )
    assert early / len(records) >= 0.95
    report(4, "liquidity crash", f"{early}/200 runs crash by month 5")


def test_criterion_05_sri_threshold(sri_axis_records):
    """A large SRI share keeps emissions below the budget; a small one does not."""
    cfg_hi, recs_hi = sri_axis_records[0.7]
    cfg_lo, recs_lo = sri_axis_records[0.05]
    s_hi = summarize(recs_hi, cfg_hi)
    s_lo = summarize(recs_lo, cfg_lo)
    assert s_hi.type_counts["F"] > 0
    assert s_hi.mean_cce < 250.0
    assert s_lo.mean_cce > 250.0
    report(
        5,
        "SRI threshold",
        f"sri=0.7: mean={s_hi.mean_cce:.1f}, F in {s_hi.type_counts['F']}/{SRI_RUNS}; "
        f"sri=0.05: mean={s_lo.mean_cce:.0f}",
    )


def test_criterion_06_minority_tipping():
    """A 10-20% SRI minority with fast social interaction triggers early crashes."""
    best = (0.0, None)
    for i, sri in enumerate((0.10, 0.15, 0.20)):
        for j, sif in enumerate((0.5, 0.6)):
            cfg = base(sif=sif, sri_share=sri, seed=6000 + 100 * i + 10 * j)
            records = run_many(cfg, 40, threads=THREADS)
            frac = sum(
                1
                for r in records
                if r.first_crash_month is not None
                and r.budget_exceeded_month is not None
                and r.first_crash_month < r.budget_exceeded_month
            ) / len(records)
            if frac > best[0]:
                best = (frac, (sri, sif))
    assert best[0] >= 0.25
    report(6, "minority tipping", f"best cell sri,sif={best[1]}: {best[0]:.0%} crash early")


def test_criterion_07_type_coverage(grid_sweep, sri_axis_records):
    """All six behavior regimes occur across the sweep pool (<= 10k runs)."""
    total = 0
    seen = {t.value: 0 for t in BehaviorType}
    for cell in grid_sweep.cells:
        total += cell.summary.n_runs
        for name, count in cell.summary.type_counts.items():
            seen[name] += count
    for sri, (cfg, recs) in sri_axis_records.items():
        total += len(recs)
        for rec in recs:
            seen[classify(rec, cfg).value] += 1
    assert total <= 10_000
    missing = [name for name, count in seen.items() if count == 0]
    assert not missing, f"types never observed: {missing} (counts {seen})"
    report(7, "type coverage", f"{total} runs, counts {seen}")


def test_criterion_08_tipping_boundary(grid_sweep):
    """A contiguous band of bimodal cells separates the CCE regimes."""
    sif_values = GRID_AXES[0][1]
    rho_values = GRID_AXES[1][1]
    n_rho = len(rho_values)
    mean = {}
    flagged = set()
    for idx, cell in enumerate(grid_sweep.cells):
        si, ri = divmod(idx, n_rho)
        mean[(si, ri)] = cell.summary.mean_cce
        if cell.summary.bimodal:
            flagged.add((si, ri))
    high = {c for c, m in mean.items() if m > 500.0}
    low = {c for c, m in mean.items() if m < 300.0}
    band_cells = flagged - high - low
    assert high, "no high-CCE region"
    assert low, "no low-CCE region"
    assert band_cells, "no bimodal cells outside the regions"

    # largest 8-connected component of the flagged transition cells
    def component(start, pool):
        comp, stack = set(), [start]
        while stack:
            s, r = stack.pop()
            if (s, r) in comp or (s, r) not in pool:
                continue
            comp.add((s, r))
            stack.extend(
                (s + ds, r + dr)
                for ds in (-1, 0, 1)
                for dr in (-1, 0, 1)
                if not (ds == 0 and dr == 0)
            )
        return comp

    remaining = set(band_cells)
    band = set()
    while remaining:
        comp = component(next(iter(remaining)), band_cells)
        remaining -= comp
        if len(comp) > len(band):
            band = comp
    assert len(band) >= 2, f"largest flagged component has {len(band)} cell(s)"

    # the band sits between the regimes: within its column, every high-CCE
    # cell lies at lower sif and every low-CCE cell at higher sif
    for s, r in band:
        assert all(hs < s for hs, hr in high if hr == r), f"high cells above band at {(s, r)}"
        assert all(ls > s for ls, lr in low if lr == r), f"low cells below band at {(s, r)}"

    report(
        8,
        "tipping boundary",
        f"|high|={len(high)}, |low|={len(low)}, band={sorted(band)} "
        f"(sif,rho)={[(round(sif_values[s], 2), round(rho_values[r], 2)) for s, r in sorted(band)]}",
    )


def test_criterion_09_analytic_oracles():
    """Closed-form operations match high-precision independent evaluations."""
    rng = random.Random(99)
    worst = 0.0
    for _ in range(1000):
        params = FirmParams(
            r0=rng.uniform(1, 1000),
            b0=rng.uniform(1, 600),
            q=rng.uniform(0.1, 10),
            x=rng.uniform(0, 10),
            price=rng.uniform(0.5, 30),
            n_shares=rng.uniform(10, 5000),
            discount=rng.uniform(1e-4, 0.05),
        )
        state = FirmState(
            reserve=rng.uniform(0.01, 1000), budget=rng.uniform(0.01, 600)
        )
        dps = mp.mpf(params.q) * mp.mpf(params.price) / mp.mpf(params.n_shares)
        r = mp.mpf(params.discount)
        for got, stock in (
            (npv_unconstrained(state, params), state.reserve),
            (npv_constrained(state, params), state.budget),
        ):
            want = dps * (1 - mp.e ** (-r * mp.mpf(stock) / mp.mpf(params.q))) / r
            worst = max(worst, abs(got - float(want)) / float(want))

        si, sj = rng.uniform(-20, 20), rng.uniform(-20, 20)
        alpha, delta = rng.uniform(0.01, 2), rng.uniform(0, 1)
        got = adoption_probability(si, sj, True, True, alpha, delta)
        want = min(
            (1 + mp.tanh(mp.mpf(alpha) * (mp.mpf(sj) - mp.mpf(si)))) / 2 + mp.mpf(delta),
            mp.mpf(1),
        )
        if want > 0:
            worst = max(worst, abs(got - float(want)) / float(want))

        u, lam, p_max = rng.random(), rng.uniform(1, 40), rng.uniform(0.01, 1)
        got = policy_probability(u, PolicyParams(lam=lam, p_max=p_max))
        want = mp.mpf(p_max) * mp.e ** (-mp.mpf(lam) * mp.mpf(u))
        worst = max(worst, abs(got - float(want)) / float(want))
    assert worst <= 1e-12

    # Monte Carlo frequencies of the Bernoulli operations, 3 sigma at 1e5 draws
    n = 100_000
    rng = random.Random(7)
    p_adopt = adoption_probability(1.0, 1.8, False, False, 0.5, 0.0)
    hits = sum(1 for _ in range(n) if rng.random() < p_adopt)
    assert abs(hits / n - p_adopt) < 3 * math.sqrt(p_adopt * (1 - p_adopt) / n)
    pol = PolicyParams()
    hits = sum(
        1 for _ in range(n) if sample_policy(PolicyState(), 0.0, 0, pol, rng).in_force
    )
    assert abs(hits / n - 0.1) < 3 * math.sqrt(0.1 * 0.9 / n)
    report(9, "analytic oracles", f"1000 inputs, worst relative error {worst:.2e}; MC within 3 sigma")


def test_criterion_10_determinism(tmp_path):
    """Identical config and seed give byte-identical CSVs; worker count is moot."""
    fast = ["--set", "horizon=120", "--set", "n_investors=200"]
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["run", "--seed", "77", "--out", str(out), *fast]) == 0
    assert (a / "run.csv").read_bytes() == (b / "run.csv").read_bytes()

    t1, t8 = tmp_path / "t1", tmp_path / "t8"
    for out, threads in ((t1, "1"), (t8, "8")):
        code = main(
            ["ensemble", "--runs", "8", "--seed", "9", "--threads", threads,
             "--save-runs", "--out", str(out), *fast]
        )
        assert code == 0
    for r in range(8):
        name = f"run_{r:04d}.csv"
        assert (t1 / name).read_bytes() == (t8 / name).read_bytes()
    assert (t1 / "summary.json").read_bytes() == (t8 / "summary.json").read_bytes()
    report(10, "determinism", "run CSVs and 1-vs-8-worker ensemble outputs byte-identical")
