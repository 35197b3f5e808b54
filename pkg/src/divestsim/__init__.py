"""Agent-based simulation of fossil-fuel divestment dynamics.

Couples a representative fossil firm, a market-maker stock market, belief
spreading on an adaptive investor network, and a stochastic carbon policy
into a monthly-stepped model, with ensemble and parameter-sweep tooling on
top.
"""

__version__ = "0.1.0"

from .analysis import (
    BehaviorType,
    EnsembleSummary,
    SweepResult,
    classify,
    detect_crash,
    summarize,
    sweep,
)
from .engine import RunRecord, SimConfig, init_world, run, run_many
from .firm import FirmParams, FirmState, dividend_per_share, npv_constrained, npv_unconstrained
from .market import AlternativeAsset, Decision, Investor, MarketState
from .policy import PolicyParams, PolicyState, policy_probability
from .social import Network, SocialParams, adoption_probability, init_small_world

__all__ = [
    "AlternativeAsset",
    "BehaviorType",
    "Decision",
    "EnsembleSummary",
    "FirmParams",
    "FirmState",
    "Investor",
    "MarketState",
    "Network",
    "PolicyParams",
    "PolicyState",
    "RunRecord",
    "SimConfig",
    "SocialParams",
    "SweepResult",
    "adoption_probability",
    "classify",
    "detect_crash",
    "dividend_per_share",
    "init_small_world",
    "init_world",
    "npv_constrained",
    "npv_unconstrained",
    "policy_probability",
    "run",
    "run_many",
    "summarize",
    "sweep",
]
