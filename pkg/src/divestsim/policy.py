"""Stochastic arrival of the binding carbon policy.

Each month the policy may come into force with a probability that grows
steeply as the share of unconvinced investors shrinks; once in force it
never reverts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class PolicyParams:
    lam: float = 20.0    # convergence steepness of the monthly probability
    p_max: float = 0.1   # ceiling of the monthly probability at full conviction
    scaled: bool = True  # False: drop the p_max factor (probability reaches 1 at u=0)

    def validate(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"policy.lam must be > 0, got {self.lam}")
        if not 0.0 < self.p_max <= 1.0:
            raise ValueError(f"policy.p_max must be in (0, 1], got {self.p_max}")


@dataclass(frozen=True)
class PolicyState:
    in_force: bool = False
    month: int | None = None  # month the policy first came into force


def policy_probability(unconvinced_fraction: float, params: PolicyParams) -> float:
    """Monthly probability that the policy comes into force.

    Strictly decreasing in the unconvinced fraction u; equals p_max at u=0.
    The unscaled variant keeps the bare exponential, which reaches 1 at u=0.
    """
    base = math.exp(-params.lam * unconvinced_fraction)
    return params.p_max * base if params.scaled else base


def sample_policy(
    state: PolicyState,
    unconvinced_fraction: float,
    month: int,
    params: PolicyParams,
    rng: random.Random,
) -> PolicyState:
    """Draw this month's implementation event.  In-force is absorbing."""
    if state.in_force:
        return state
    if rng.random() < policy_probability(unconvinced_fraction, params):
        return replace(state, in_force=True, month=month)
    return state
