"""Concatenated-protocol cost calculator: chains of 10-to-2, 15-to-1, and
(3k+8)-to-k stages evaluated for marginal error, T-count per output, and
space.

Stage error maps are leading order and valid for inputs up to 5e-2; the
T-count per output inflates each stage by its first-order acceptance
probability 1 - n_in * eps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

__all__ = [
    "Stage",
    "Chain",
    "ChainCost",
    "MEK",
    "BK15",
    "bh_stage",
    "stage_error",
    "chain_cost",
    "parse_chain",
    "best_chain",
    "default_menu",
    "NoChainReachesTarget",
]

EPS_MAX = 0.05
DEFAULT_EPS0 = 1e-3

#: multiplicative slack on the target error in best_chain; leading-order
#: marginals within 15% of the target count as meeting it
TARGET_SLACK = 1.15


class NoChainReachesTarget(ValueError):
    def __init__(self, target: float, best: Optional["Chain"], best_error: float):
        msg = f"no chain reaches {target:.3g}; best achieved {best_error:.3g}"
        super().__init__(msg)
        self.best = best
        self.best_error = best_error


@dataclass(frozen=True)
class Stage:
    kind: str
    n_in: int
    n_out: int

    @property
    def token(self) -> str:
        if self.kind == "MEK":
            return "5"
        if self.kind == "BK15":
            return "15"
        return str(self.n_out)


MEK = Stage("MEK", 10, 2)
BK15 = Stage("BK15", 15, 1)


def bh_stage(k: int) -> Stage:
    if k % 2 != 0 or k <= 0:
        raise ValueError("the (3k+8)-to-k stage needs an even positive k")
    return Stage(f"BH{k}", 3 * k + 8, k)


def stage_error(stage: Stage, eps: float) -> float:
    """Leading-order output error of one stage."""
    if not 0.0 < eps <= EPS_MAX:
        raise ValueError(f"stage input error {eps:.3g} outside (0, {EPS_MAX}]")
    if stage.kind == "MEK":
        return 9.0 * eps ** 2
    if stage.kind == "BK15":
        return 35.0 * eps ** 3
    k = stage.n_out
    return (3 * k + 1) * eps ** 2


@dataclass(frozen=True)
class Chain:
    stages: Tuple[Stage, ...]
    eps0: float = DEFAULT_EPS0

    def __post_init__(self) -> None:
        if not self.stages:
            raise ValueError("a chain needs at least one stage")

    @property
    def name(self) -> str:
        return "-".join(s.token for s in self.stages)


@dataclass(frozen=True)
class ChainCost:
    marginal_error: float
    t_per_output: float
    space: int
    n_out: int


def chain_cost(chain: Chain) -> ChainCost:
    eps = chain.eps0
    t = 1.0
    space = 1
    n_out = 1
    for stage in chain.stages:
        t *= stage.n_in / stage.n_out
        t /= 1.0 - stage.n_in * eps
        eps = stage_error(stage, eps)
        space *= stage.n_in
        n_out *= stage.n_out
    return ChainCost(eps, t, space, n_out)


def parse_chain(name: str, eps0: float = DEFAULT_EPS0) -> Chain:
    """Dash-separated stage tokens: '5' is 10-to-2, '15' is 15-to-1, even k is (3k+8)-to-k."""
    stages = []
    for token in name.split("-"):
        value = int(token)
        if value == 5:
            stages.append(MEK)
        elif value == 15:
            stages.append(BK15)
        else:
            stages.append(bh_stage(value))
    return Chain(tuple(stages), eps0)


def default_menu(kinds: Sequence[str] = ("bh", "mek", "bk"), k_max: int = 54) -> Tuple[Stage, ...]:
    menu: List[Stage] = []
    for kind in kinds:
        kind = kind.lower()
        if kind == "mek":
            menu.append(MEK)
        elif kind == "bk":
            menu.append(BK15)
        elif kind == "bh":
            menu.extend(bh_stage(k) for k in range(2, k_max + 1, 2))
        else:
            raise ValueError(f"unknown menu entry {kind!r}")
    return tuple(menu)


def best_chain(target_error: float, menu: Sequence[Stage], max_stages: int = 4,
               eps0: float = DEFAULT_EPS0) -> Chain:
    """Cheapest chain (by T per output) whose marginal error meets the target.

    Exhaustive over chains of up to max_stages menu stages; a marginal within
    TARGET_SLACK of the target qualifies, absorbing leading-order rounding.
    """
    if target_error <= 0.0:
        raise ValueError("target must be positive")
    best: Optional[Chain] = None
    best_cost: Optional[ChainCost] = None
    closest: Optional[Chain] = None
    closest_err = math.inf
    for length in range(1, max_stages + 1):
        for combo in itertools.product(menu, repeat=length):
            chain = Chain(combo, eps0)
            try:
                cost = chain_cost(chain)
            except ValueError:
                continue  # a stage saw an input outside its validity range
            if cost.marginal_error < closest_err:
                closest, closest_err = chain, cost.marginal_error
            if cost.marginal_error <= target_error * TARGET_SLACK:
                if best_cost is None or cost.t_per_output < best_cost.t_per_output:
                    best, best_cost = chain, cost
    if best is None:
        raise NoChainReachesTarget(target_error, closest, closest_err)
    return best
