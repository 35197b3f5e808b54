"""Monthly scheduler composing firm, market, social network, and policy.

One run is a pure function of (config, seed): a single stdlib RNG drives
every draw in a fixed order, so identical inputs give bit-identical
trajectories regardless of how many runs execute in parallel around it.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import analysis
from .firm import (
    FirmParams,
    FirmState,
    dividend_per_share,
    npv_constrained,
    npv_unconstrained,
    step_extraction,
)
from .market import (
    AlternativeAsset,
    Investor,
    MarketState,
    pay_dividends,
    trading_round,
    update_price,
)
from .policy import PolicyParams, PolicyState, sample_policy
from .social import Network, SocialParams, init_small_world, social_round


@dataclass(frozen=True)
class SimConfig:
    """Full configuration of one simulation run.

    ``seed`` makes the run reproducible; ensembles derive per-run seeds as
    seed + run_index.  All fractions live in [0, 1].
    """

    firm: FirmParams = field(default_factory=FirmParams)
    social: SocialParams = field(default_factory=SocialParams)
    policy: PolicyParams = field(default_factory=PolicyParams)
    alt: AlternativeAsset = field(default_factory=AlternativeAsset)
    n_investors: int = 400
    rho: float = 0.05             # trading frequency per month
    sri_share: float = 0.15       # fraction of socially responsible investors
    liquidity: float = 1.5        # initial wealth relative to the fossil stock value
    init_convinced: float = 0.03  # fraction starting out convinced
    horizon: int = 250            # months simulated
    mu: float = 4.0               # market-maker price impact coefficient
    seed: int = 0
    delist_price_frac: float = 0.05  # delist when price falls below this fraction of s0
    crash_window: int = 12           # trailing window (months) for crash detection
    crash_drop: float = 0.5          # relative drop vs window max that counts as a crash
    recovery_frac: float = 0.5       # post-crash recovery threshold vs pre-crash max

    def validate(self) -> None:
        self.firm.validate()
        self.social.validate()
        self.policy.validate()
        self.alt.validate()
        if self.n_investors < 2:
            raise ValueError(f"n_investors must be >= 2, got {self.n_investors}")
        if self.n_investors <= self.social.k_ring:
            raise ValueError(
                f"n_investors must exceed social.k_ring, got {self.n_investors} <= {self.social.k_ring}"
            )
        for name in ("rho", "sri_share", "init_convinced"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        if self.liquidity <= 0:
            raise ValueError(f"liquidity must be > 0, got {self.liquidity}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not 0.0 < self.delist_price_frac < 1.0:
            raise ValueError(f"delist_price_frac must be in (0, 1), got {self.delist_price_frac}")
        if self.crash_window < 1:
            raise ValueError(f"crash_window must be >= 1, got {self.crash_window}")
        if not 0.0 < self.crash_drop < 1.0:
            raise ValueError(f"crash_drop must be in (0, 1), got {self.crash_drop}")
        if not 0.0 < self.recovery_frac <= 1.0:
            raise ValueError(f"recovery_frac must be in (0, 1], got {self.recovery_frac}")


@dataclass
class RunRecord:
    """Per-month trajectory of one run plus the event months derived from it.

    ``initial_quote`` is the maker's opening quote s0 (the unconstrained
    share value at t=0); crash detection runs over [s0] + price so a
    collapse during the very first months is visible.
    """

    initial_quote: float
    price: list[float] = field(default_factory=list)
    fci: list[float] = field(default_factory=list)
    cce: list[float] = field(default_factory=list)
    reserve: list[float] = field(default_factory=list)
    budget: list[float] = field(default_factory=list)
    policy_flag: list[int] = field(default_factory=list)
    held_shares: list[float] = field(default_factory=list)
    first_crash_month: int | None = None
    policy_month: int | None = None
    delisting_month: int | None = None
    budget_exceeded_month: int | None = None
    final_cce: float = 0.0
    graph_edges: list[tuple[int, int]] | None = None

    def __len__(self) -> int:
        return len(self.price)


class _World:
    """Mutable state of one running simulation (internal)."""

    __slots__ = (
        "config",
        "rng",
        "investors",
        "net",
        "firm",
        "market",
        "policy",
        "dps",
        "s0",
        "month",
        "record",
    )

    def __init__(self, config: SimConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        fp = config.firm
        self.firm = FirmState(reserve=fp.r0, budget=fp.b0)
        self.dps = dividend_per_share(fp)
        self.s0 = npv_unconstrained(self.firm, fp)
        self.net = init_small_world(
            config.n_investors, config.social.k_ring, config.social.p_rewire_init, rng
        )
        n = config.n_investors
        sri_set = set(rng.sample(range(n), int(round(config.sri_share * n))))
        convinced_set = set(rng.sample(range(n), int(round(config.init_convinced * n))))
        liquidity = config.liquidity
        if liquidity >= 1.0:
            shares_each = fp.n_shares / n
            cash_each = (liquidity - 1.0) * fp.n_shares * self.s0 / n
        else:
            # Investors can only afford part of the float; the maker keeps the
            # rest and marks its opening quote down against that imbalance.
            shares_each = liquidity * fp.n_shares / n
            cash_each = 0.0
        self.investors = [
            Investor(i, i in sri_set, i in convinced_set, shares_each, cash_each)
            for i in range(n)
        ]
        self.market = MarketState(price=self.s0, held=shares_each * n, n_shares=fp.n_shares)
        if liquidity < 1.0:
            update_price(self.market, (liquidity - 1.0) * fp.n_shares, config.mu)
        self.policy = PolicyState()
        self.month = 0
        self.record = RunRecord(initial_quote=self.s0)


def init_world(config: SimConfig) -> _World:
    """Build the initial world for a run; deterministic given config.seed."""
    config.validate()
    return _World(config, random.Random(config.seed))


def step_month(world: _World) -> None:
    """Advance the world by one month.

    Sub-step order: dividends, social learning, trading, delisting check,
    extraction, policy draw, trajectory record.  Beliefs formed this month
    therefore already drive this month's trades.
    """
    config = world.config
    fp = config.firm
    t = world.month
    investors = world.investors
    market = world.market

    pay_dividends(investors, world.firm.operating, world.dps, config.alt, world.rng)
    social_round(investors, world.net, market.price, config.social, world.rng)

    if not world.firm.delisted:
        npv_u = npv_unconstrained(world.firm, fp)
        npv_c = npv_constrained(world.firm, fp)
        trading_round(investors, market, npv_u, npv_c, config.rho, config.mu, world.rng)
        # resynchronize the incrementally tracked holdings; a full exit must
        # read exactly zero
        market.held = sum(inv.shares for inv in investors)
        if market.price <= config.delist_price_frac * world.s0 or market.held == 0.0:
            world.firm = replace(world.firm, operating=False, delisted=True)
            world.record.delisting_month = t

    if world.firm.operating:
        world.firm = step_extraction(world.firm, fp, world.policy.in_force)

    n_convinced = sum(1 for inv in investors if inv.convinced)
    if not world.policy.in_force:
        unconvinced = (len(investors) - n_convinced) / len(investors)
        world.policy = sample_policy(world.policy, unconvinced, t, config.policy, world.rng)

    rec = world.record
    rec.price.append(market.price)
    rec.fci.append(n_convinced / len(investors))
    rec.cce.append(world.firm.cce)
    rec.reserve.append(world.firm.reserve)
    rec.budget.append(world.firm.budget)
    rec.policy_flag.append(1 if world.policy.in_force else 0)
    rec.held_shares.append(market.held)
    if rec.budget_exceeded_month is None and world.firm.budget <= 0.0:
        rec.budget_exceeded_month = t
    world.month = t + 1


def run(config: SimConfig, *, record_graph: bool = False) -> RunRecord:
    """Simulate one full trajectory.  Identical (config, seed) inputs give
    identical records."""
    world = init_world(config)
    for _ in range(config.horizon):
        step_month(world)
    rec = world.record
    rec.policy_month = world.policy.month
    rec.final_cce = rec.cce[-1] if rec.cce else 0.0
    hit = analysis.detect_crash(
        [rec.initial_quote] + rec.price, window=config.crash_window, drop_frac=config.crash_drop
    )
    rec.first_crash_month = None if hit is None else hit - 1
    if record_graph:
        rec.graph_edges = sorted(world.net.edges())
    return rec


def _run_seeded(job: tuple[SimConfig, int]) -> RunRecord:
    config, seed = job
    return run(replace(config, seed=seed))


def run_jobs(jobs: list[tuple[SimConfig, int]], threads: int = 1) -> list[RunRecord]:
    """Execute (config, seed) jobs, optionally on a worker-process pool.

    Results come back in job order and are identical for any worker count:
    each job is a self-contained pure function of its config and seed.
    """
    if threads <= 1 or len(jobs) <= 1:
        return [_run_seeded(job) for job in jobs]
    chunk = max(1, len(jobs) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_seeded, jobs, chunksize=chunk))


def run_many(
    config: SimConfig,
    n_runs: int,
    threads: int = 1,
    base_seed: int | None = None,
) -> list[RunRecord]:
    """Run an ensemble of independent trajectories.

    Run r uses seed base_seed + r (base_seed defaults to config.seed), so
    the result list is independent of the worker count.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    base = config.seed if base_seed is None else base_seed
    return run_jobs([(config, base + r) for r in range(n_runs)], threads=threads)
