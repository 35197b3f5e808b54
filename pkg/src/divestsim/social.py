"""Adaptive social network of investors and belief spreading.

Beliefs about the coming carbon policy spread by pairwise imitation biased
toward more successful neighbors; alternatively a discordant link is
rewired to a like-minded investor (homophily).  The graph starts as a
small world and keeps its edge count forever.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .market import Investor


@dataclass(frozen=True)
class SocialParams:
    sif: float = 0.35            # social interaction frequency per month
    phi: float = 0.1             # probability of rewiring instead of imitation
    alpha: float = 0.26          # imitation sensitivity to success differences
    delta: float = 0.6           # persuasion bonus of divested SRIs
    k_ring: int = 10             # base degree of the initial ring lattice
    p_rewire_init: float = 0.3   # edge rewiring probability at construction

    def validate(self) -> None:
        for name in ("sif", "phi", "p_rewire_init"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"social.{name} must be in [0, 1], got {v}")
        if not self.alpha > 0:
            raise ValueError(f"social.alpha must be > 0, got {self.alpha}")
        if self.delta < 0:
            raise ValueError(f"social.delta must be >= 0, got {self.delta}")
        if self.k_ring < 2 or self.k_ring % 2 != 0:
            raise ValueError(f"social.k_ring must be a positive even integer, got {self.k_ring}")


class Network:
    """Undirected simple graph on investor indices, stored as neighbor sets."""

    __slots__ = ("neighbors",)

    def __init__(self, neighbors: list[set[int]]):
        self.neighbors = neighbors

    @property
    def n(self) -> int:
        return len(self.neighbors)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.neighbors) // 2

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]

    def add_edge(self, i: int, j: int) -> None:
        if i == j:
            raise ValueError("self-loops are not allowed")
        self.neighbors[i].add(j)
        self.neighbors[j].add(i)

    def remove_edge(self, i: int, j: int) -> None:
        self.neighbors[i].remove(j)
        self.neighbors[j].remove(i)

    def rewire(self, i: int, old: int, new: int) -> None:
        """Replace edge (i, old) by (i, new), preserving the edge count."""
        self.remove_edge(i, old)
        self.add_edge(i, new)

    def random_neighbor(self, i: int, rng: random.Random) -> int:
        nbrs = self.neighbors[i]
        return tuple(nbrs)[rng.randrange(len(nbrs))]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.neighbors) for j in nbrs if i < j]

    def is_connected(self) -> bool:
        n = self.n
        if n == 0:
            return True
        seen = [False] * n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            v = stack.pop()
            for w in self.neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == n


def init_small_world(
    n: int, k_ring: int, p_rewire_init: float, rng: random.Random, max_tries: int = 100
) -> Network:
    """Build a connected small-world graph: ring lattice of degree k_ring
    with every edge rewired with probability p_rewire_init.

    Rewiring moves the far endpoint of a ring edge to a uniformly random
    non-neighbor, so the edge count stays n*k_ring/2 exactly.  Construction
    is retried until the graph comes out connected.
    """
    if n <= k_ring:
        raise ValueError(f"need n > k_ring, got n={n}, k_ring={k_ring}")
    if k_ring < 2 or k_ring % 2 != 0:
        raise ValueError(f"k_ring must be a positive even integer, got {k_ring}")
    for _ in range(max_tries):
        neighbors: list[set[int]] = [set() for _ in range(n)]
        net = Network(neighbors)
        for offset in range(1, k_ring // 2 + 1):
            for i in range(n):
                net.add_edge(i, (i + offset) % n)
        if p_rewire_init > 0.0:
            for offset in range(1, k_ring // 2 + 1):
                for i in range(n):
                    j = (i + offset) % n
                    if j not in neighbors[i]:
                        continue  # already rewired away
                    if rng.random() >= p_rewire_init:
                        continue
                    if len(neighbors[i]) >= n - 1:
                        continue  # i is connected to everyone already
                    k = rng.randrange(n)
                    while k == i or k in neighbors[i]:
                        k = rng.randrange(n)
                    net.rewire(i, j, k)
        if net.is_connected():
            return net
    raise RuntimeError(
        f"could not build a connected small world after {max_tries} tries "
        f"(n={n}, k_ring={k_ring}, p_rewire_init={p_rewire_init})"
    )


def success(wealth: float, last_income: float, mean_wealth: float) -> float:
    """Success score: 100x the return on total investment plus wealth
    relative to the population mean.  Divisions are guarded at zero."""
    roi = last_income / wealth if wealth > 0.0 else 0.0
    relative = wealth / mean_wealth if mean_wealth > 0.0 else 0.0
    return 100.0 * roi + relative


def adoption_probability(
    sigma_i: float,
    sigma_j: float,
    sri_j: bool,
    convinced_j: bool,
    alpha: float,
    delta: float,
) -> float:
    """Probability that i adopts j's belief, rising with j's success edge.

    Divested SRIs get a flat persuasion bonus, clamped at 1.
    """
    p0 = 0.5 * (1.0 + math.tanh(alpha * (sigma_j - sigma_i)))
    if sri_j and convinced_j:
        return min(p0 + delta, 1.0)
    return p0


def _success_scores(investors: list[Investor], price: float) -> list[float]:
    wealths = [inv.shares * price + inv.cash for inv in investors]
    mean_wealth = sum(wealths) / len(wealths)
    if mean_wealth > 0.0:
        return [
            (100.0 * inv.last_income / w if w > 0.0 else 0.0) + w / mean_wealth
            for inv, w in zip(investors, wealths)
        ]
    return [100.0 * inv.last_income / w if w > 0.0 else 0.0 for inv, w in zip(investors, wealths)]


def social_round(
    investors: list[Investor],
    net: Network,
    price: float,
    params: SocialParams,
    rng: random.Random,
) -> None:
    """One month of social dynamics.

    Every investor is activated independently with probability sif and the
    activated set is processed in random order.  An activated investor
    talks to one random neighbor; nothing happens unless their beliefs
    differ.  With probability phi the link is rewired to a random
    like-minded non-neighbor (kept unchanged if none exists); otherwise the
    activated investor adopts the neighbor's belief with the
    success-weighted probability.  Convinced SRIs never revert.
    """
    if params.sif <= 0.0:
        return
    n = len(investors)
    n_convinced = sum(1 for inv in investors if inv.convinced)
    if n_convinced == 0 or n_convinced == n:
        return  # no discordant pair exists anywhere
    rand = rng.random
    active = [i for i in range(n) if rand() < params.sif]
    rng.shuffle(active)
    scores: list[float] | None = None
    for i in active:
        if not net.neighbors[i]:
            continue
        j = net.random_neighbor(i, rng)
        inv_i = investors[i]
        inv_j = investors[j]
        if inv_i.convinced == inv_j.convinced:
            continue
        if rand() < params.phi:
            belief = inv_i.convinced
            nbrs = net.neighbors[i]
            candidates = [
                k
                for k in range(n)
                if investors[k].convinced == belief and k != i and k not in nbrs
            ]
            if candidates:
                net.rewire(i, j, candidates[rng.randrange(len(candidates))])
        else:
            if inv_i.sri and inv_i.convinced:
                continue  # absorbing: a divested SRI never unconverts
            if scores is None:
                scores = _success_scores(investors, price)
            p = adoption_probability(
                scores[i], scores[j], inv_j.sri, inv_j.convinced, params.alpha, params.delta
            )
            if rand() < p:
                inv_i.convinced = inv_j.convinced
