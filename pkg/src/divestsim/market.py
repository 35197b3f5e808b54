"""Stock market: investor positions, all-or-nothing portfolio shifts, and
the market maker's multiplicative price impact.

Each activated investor compares their valuation of the fossil share with
the quoted price and moves their whole liquid position to the better side;
the maker absorbs the counterparty flow and re-quotes after every
individual trade.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum


class Decision(Enum):
    FOSSIL = "fossil"
    ALTERNATIVE = "alternative"


@dataclass(frozen=True)
class AlternativeAsset:
    """Low-risk alternative investment paying a noisy monthly dividend."""

    mean_return: float = 0.004      # dividend yield per month
    noise_amplitude: float = 0.1    # relative width of the uniform yield noise

    def validate(self) -> None:
        if not self.mean_return > 0:
            raise ValueError(f"alt.mean_return must be > 0, got {self.mean_return}")
        if self.noise_amplitude < 0:
            raise ValueError(f"alt.noise_amplitude must be >= 0, got {self.noise_amplitude}")


@dataclass(slots=True)
class Investor:
    """One investor: type flags, belief, and current positions.

    ``sri`` is fixed over a run; ``convinced`` (belief that the carbon policy
    will come) evolves through social interaction.  A convinced SRI never
    reverts.  After a trade at most one of shares/cash is nonzero unless the
    maker ran out of inventory on a buy.
    """

    idx: int
    sri: bool
    convinced: bool
    shares: float = 0.0
    cash: float = 0.0          # position in the alternative asset
    last_income: float = 0.0   # dividend income received last month

    def wealth(self, price: float) -> float:
        return self.shares * price + self.cash


@dataclass
class MarketState:
    price: float
    held: float            # total shares currently held by investors
    n_shares: float        # shares outstanding

    @property
    def maker_inventory(self) -> float:
        return self.n_shares - self.held


def investment_decision(inv: Investor, npv_u: float, npv_c: float, price: float) -> Decision:
    """Pick the side the investor wants their whole wealth on.

    Convinced SRIs divest unconditionally.  Everyone else buys the fossil
    share iff their valuation strictly exceeds the price (convinced
    investors use the budget-constrained value, unconvinced the full one);
    at equality they stay out.
    """
    if inv.convinced:
        if inv.sri:
            return Decision.ALTERNATIVE
        value = npv_c
    else:
        value = npv_u
    return Decision.FOSSIL if value > price else Decision.ALTERNATIVE


def execute_trade(inv: Investor, decision: Decision, market: MarketState) -> float:
    """Shift the investor's position per the decision; returns the signed
    share flow (positive = bought from the maker).

    Buys convert the whole cash position at the current quote, capped by the
    maker's inventory (the excess stays in the alternative asset).  Sells
    liquidate the whole share position at the current quote.  Conversion is
    value-neutral at the execution price.
    """
    if decision is Decision.FOSSIL:
        if inv.cash <= 0.0 or market.price <= 0.0:
            return 0.0
        demand = inv.cash / market.price
        room = market.maker_inventory
        if room <= 0.0:
            return 0.0
        if demand <= room:
            bought = demand
            inv.cash = 0.0
        else:
            bought = room
            inv.cash -= bought * market.price
        inv.shares += bought
        market.held += bought
        return bought
    sold = inv.shares
    if sold <= 0.0:
        return 0.0
    inv.cash += sold * market.price
    inv.shares = 0.0
    market.held -= sold
    return -sold


def update_price(market: MarketState, delta_shares: float, mu: float) -> None:
    """Maker re-quote after a trade: multiplicative impact proportional to
    the share flow relative to shares outstanding, floored at zero."""
    if delta_shares != 0.0:
        market.price = max(0.0, market.price * (1.0 + mu * delta_shares / market.n_shares))


def pay_dividends(
    investors: list[Investor],
    firm_operating: bool,
    dps: float,
    alt: AlternativeAsset,
    rng: random.Random,
) -> None:
    """Pay one month of dividends on both assets.

    Shareholders receive shares * dps (nothing once the firm stopped
    operating); alternative-asset income is cash * mean_return * (1 + a*u)
    with u uniform on [-1, 1].  Both land in the investor's liquid position
    and flow back into the market through the next regular trade, so
    dividend income moves the price only via the maker's impact rule.
    """
    rate = alt.mean_return
    amp = alt.noise_amplitude
    for inv in investors:
        cash = inv.cash
        if cash > 0.0:
            alt_income = cash * rate * (1.0 + amp * rng.uniform(-1.0, 1.0))
        else:
            alt_income = 0.0
        if firm_operating and inv.shares > 0.0:
            div = inv.shares * dps
        else:
            div = 0.0
        inv.cash = cash + alt_income + div
        inv.last_income = div + alt_income


def trading_round(
    investors: list[Investor],
    market: MarketState,
    npv_u: float,
    npv_c: float,
    rho: float,
    mu: float,
    rng: random.Random,
) -> None:
    """One month of trading.

    Every investor is activated independently with probability rho; the
    activated set trades in a uniformly random order, each seeing the price
    as moved by the trades before them.
    """
    if rho <= 0.0:
        return
    rand = rng.random
    active = [i for i in range(len(investors)) if rand() < rho]
    rng.shuffle(active)
    for i in active:
        inv = investors[i]
        decision = investment_decision(inv, npv_u, npv_c, market.price)
        delta = execute_trade(inv, decision, market)
        update_price(market, delta, mu)
