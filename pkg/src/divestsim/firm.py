"""Representative fossil-fuel firm: extraction bookkeeping and share valuation.

The firm extracts fuel at a fixed monthly rate from a reserve that is
replenished by exploration, while every extracted unit eats into a fixed
carbon budget.  Investors value one share as the discounted stream of
dividends the firm can still pay -- either until the reserve runs out
(unconstrained) or until the carbon budget does (constrained).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class FirmParams:
    """Static firm parameters (stocks in GtCO2, money per unit fuel)."""

    r0: float = 500.0        # initial fuel reserve
    b0: float = 250.0        # initial carbon budget
    q: float = 2.5           # extraction rate per month
    x: float = 2.5           # exploration rate per month
    price: float = 10.0      # net fuel price (market price minus extraction/exploration cost)
    n_shares: float = 1000.0
    discount: float = 0.005  # monthly discount rate

    def validate(self) -> None:
        for name in ("r0", "b0", "q", "price", "n_shares", "discount"):
            if not getattr(self, name) > 0:
                raise ValueError(f"firm.{name} must be > 0, got {getattr(self, name)}")
        if self.x < 0:
            raise ValueError(f"firm.x must be >= 0, got {self.x}")


@dataclass(frozen=True)
class FirmState:
    """Firm stocks at one point in time.  budget == b0 - cce always holds."""

    reserve: float
    budget: float
    cce: float = 0.0         # cumulative carbon emissions
    operating: bool = True
    delisted: bool = False


def dividend_per_share(params: FirmParams) -> float:
    """Expected monthly dividend per share: extraction revenue spread over all shares."""
    return params.q * params.price / params.n_shares


def npv_unconstrained(state: FirmState, params: FirmParams) -> float:
    """Share value assuming the whole remaining reserve gets extracted.

    Discounted dividend stream over the reserve lifetime reserve/q, clamped
    at zero for an exhausted reserve or a firm that stopped operating.
    Bounded above by the perpetuity value dps/discount.
    """
    if not state.operating or state.reserve <= 0.0:
        return 0.0
    dps = dividend_per_share(params)
    r = params.discount
    return dps * (1.0 - math.exp(-r * state.reserve / params.q)) / r


def npv_constrained(state: FirmState, params: FirmParams) -> float:
    """Share value assuming only the remaining carbon budget may be extracted.

    Same dividend-stream formula with the budget in place of the reserve.
    A nonpositive budget (or a dead firm) makes the share worthless.
    """
    if not state.operating or state.budget <= 0.0:
        return 0.0
    dps = dividend_per_share(params)
    r = params.discount
    return dps * (1.0 - math.exp(-r * state.budget / params.q)) / r


def step_extraction(state: FirmState, params: FirmParams, policy_in_force: bool) -> FirmState:
    """Advance the firm by one month of extraction and exploration.

    The full monthly quantity q is extracted even in the terminal month
    (no sub-month proration), then the stopping conditions are checked:
    reserve exhaustion always kills the firm, a nonpositive budget does so
    only once the carbon policy is in force.
    """
    if not state.operating:
        raise ValueError("step_extraction called on a non-operating firm")
    cce = state.cce + params.q
    # grouped so q == x leaves the reserve bit-exact
    reserve = state.reserve + (params.x - params.q)
    budget = params.b0 - cce
    operating = True
    if reserve <= 0.0:
        operating = False
    if policy_in_force and budget <= 0.0:
        operating = False
    return replace(state, reserve=reserve, budget=budget, cce=cce, operating=operating)
