"""Randomized search for degree-3 Tanner graphs of girth >= 6 and distance >= 7.

Starts from disjoint complete bipartite blocks (girth 4), removes 4-cycles by
edge swaps, anneals with girth-preserving random swaps, and certifies the
distance by an exhaustive weight <= 6 scan.  Optionally adds one or two
checks to lift a distance 5 or 6 code to distance 7.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

from .gf2 import BitVector
from .outer import OuterCode, iter_patterns, verify_distance_sensitivity

__all__ = [
    "SearchConfig",
    "SearchResult",
    "SearchStuck",
    "init_bipartite",
    "eliminate_4cycles",
    "anneal_girth_preserving",
    "certify_distance7",
    "augment_checks",
    "search",
]

QUBIT_DEGREE = 3


class SearchStuck(RuntimeError):
    def __init__(self, message: str, best_girth: int):
        super().__init__(message)
        self.best_girth = best_girth


@dataclass(frozen=True)
class SearchConfig:
    k_inner: int
    alpha: int
    seed: int
    swap_budget: int = 10 ** 6
    anneal_steps: int = 10 ** 5
    allow_added_checks: bool = False
    max_added_checks: int = 2
    certify_rounds: int = 25

    @property
    def n_out(self) -> int:
        return self.alpha * self.k_inner

    @property
    def n_check(self) -> int:
        return 3 * self.alpha


@dataclass(frozen=True)
class SearchResult:
    code: OuterCode
    girth: int
    distance_certified: int
    added_checks: int
    iterations_used: int
    seed: int
    wall_seconds: float = 0.0


class _Graph:
    """Mutable bipartite incidence with pairwise check-intersection counts."""

    def __init__(self, qubit_checks: List[List[int]], n_check: int):
        self.qubit_checks = qubit_checks
        self.n_check = n_check
        self.check_qubits: List[Set[int]] = [set() for _ in range(n_check)]
        for q, cs in enumerate(qubit_checks):
            for c in cs:
                self.check_qubits[c].add(q)
        self.inter = [[0] * n_check for _ in range(n_check)]
        self.pairs4: Set[Tuple[int, int]] = set()
        for q, cs in enumerate(qubit_checks):
            for i, a in enumerate(cs):
                for b in cs[i + 1:]:
                    self._bump(a, b, +1)

    def _bump(self, a: int, b: int, delta: int) -> None:
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.inter[a][b] += delta
        if self.inter[a][b] >= 2:
            self.pairs4.add((a, b))
        else:
            self.pairs4.discard((a, b))

    def detach(self, q: int, c: int) -> None:
        self.qubit_checks[q].remove(c)
        self.check_qubits[c].discard(q)
        for d in self.qubit_checks[q]:
            self._bump(c, d, -1)

    def attach(self, q: int, c: int) -> None:
        for d in self.qubit_checks[q]:
            self._bump(c, d, +1)
        self.qubit_checks[q].append(c)
        self.check_qubits[c].add(q)

    def swap(self, q1: int, c1: int, q2: int, c2: int) -> None:
        """Replace edges (q1,c1),(q2,c2) by (q1,c2),(q2,c1)."""
        self.detach(q1, c1)
        self.detach(q2, c2)
        self.attach(q1, c2)
        self.attach(q2, c1)

    def swap_valid(self, q1: int, c1: int, q2: int, c2: int) -> bool:
        return (q1 != q2 and c1 != c2
                and c2 not in self.qubit_checks[q1]
                and c1 not in self.qubit_checks[q2])

    def four_cycle_free(self) -> bool:
        return not self.pairs4

    def to_outer(self) -> OuterCode:
        checks = tuple(tuple(sorted(qs)) for qs in self.check_qubits)
        return OuterCode(len(self.qubit_checks), checks, (tuple(range(self.n_check)),))


def init_bipartite(config: SearchConfig) -> OuterCode:
    """alpha disjoint copies of the complete bipartite graph K_{k,3}; girth 4."""
    k = config.k_inner
    qubit_checks = []
    for block in range(config.alpha):
        for _ in range(k):
            qubit_checks.append([3 * block, 3 * block + 1, 3 * block + 2])
    return _Graph(qubit_checks, config.n_check).to_outer()


def _graph_from_code(code: OuterCode) -> _Graph:
    qubit_checks = [list(cs) for cs in code.qubit_checks]
    return _Graph(qubit_checks, code.n_check)


def _random_edge(graph: _Graph, rng: random.Random) -> Tuple[int, int]:
    q = rng.randrange(len(graph.qubit_checks))
    c = graph.qubit_checks[q][rng.randrange(len(graph.qubit_checks[q]))]
    return q, c


def eliminate_4cycles(code: OuterCode, rng: random.Random,
                      swap_budget: int = 10 ** 6) -> Tuple[OuterCode, int]:
    """Swap an edge of some 4-cycle with a random edge until girth >= 6."""
    graph = _graph_from_code(code)
    swaps = 0
    while graph.pairs4:
        if swaps >= swap_budget:
            raise SearchStuck(f"still {len(graph.pairs4)} crossing pairs after "
                              f"{swaps} swaps", best_girth=4)
        a, b = sorted(graph.pairs4)[rng.randrange(len(graph.pairs4))]
        shared = sorted(graph.check_qubits[a] & graph.check_qubits[b])
        q1 = shared[rng.randrange(len(shared))]
        c1 = a if rng.getrandbits(1) else b
        q2, c2 = _random_edge(graph, rng)
        if not graph.swap_valid(q1, c1, q2, c2):
            continue
        graph.swap(q1, c1, q2, c2)
        swaps += 1
    return graph.to_outer(), swaps


def anneal_girth_preserving(code: OuterCode, rng: random.Random, steps: int) -> OuterCode:
    """Random edge-pair swaps, rejecting any that create a 4-cycle."""
    graph = _graph_from_code(code)
    if graph.pairs4:
        raise ValueError("anneal requires a 4-cycle-free starting graph")
    for _ in range(steps):
        q1, c1 = _random_edge(graph, rng)
        q2, c2 = _random_edge(graph, rng)
        if not graph.swap_valid(q1, c1, q2, c2):
            continue
        graph.swap(q1, c1, q2, c2)
        if graph.pairs4:
            graph.swap(q1, c2, q2, c1)  # revert
            assert not graph.pairs4
    return graph.to_outer()


def certify_distance7(code: OuterCode) -> Tuple[bool, Optional[BitVector]]:
    """True iff no nonzero pattern of weight <= 6 violates zero checks."""
    for u in range(1, 7):
        hit = next(iter_patterns(code, u, 0), None)
        if hit is not None:
            return False, BitVector.from_support(code.n_out, hit[0])
    return True, None


def _witnesses(code: OuterCode) -> List[Tuple[int, ...]]:
    out = []
    for u in range(1, 7):
        out.extend(supp for supp, _ in iter_patterns(code, u, 0))
    return out


def _candidate_check(code: OuterCode, witnesses: Sequence[Tuple[int, ...]],
                     k: int, rng: random.Random) -> Optional[Tuple[Tuple[int, ...], int]]:
    """Randomized greedy degree-k check odd-hitting as many witnesses as it can.

    Returns (check, number of witnesses hit), or None when no 4-cycle-free
    candidate of the right degree comes together.
    """
    chosen: Set[int] = set()
    for _ in range(4 * k):
        uncovered = [w for w in witnesses if len(chosen.intersection(w)) % 2 == 0]
        if not uncovered or len(chosen) >= k:
            break
        counts: dict = {}
        for w in uncovered:
            for q in w:
                if q not in chosen:
                    counts[q] = counts.get(q, 0) + 1
        if not counts:
            break
        top_count = max(counts.values())
        top = sorted(q for q, c in counts.items() if c == top_count)
        chosen.add(top[rng.randrange(len(top))])
    touched = {q for w in witnesses for q in w}
    pool = sorted(set(range(code.n_out)) - chosen - touched)
    rng.shuffle(pool)
    while len(chosen) < k and pool:
        chosen.add(pool.pop())
    if len(chosen) != k:
        return None
    check = tuple(sorted(chosen))
    for other in code.checks:
        if len(set(other).intersection(check)) > 1:
            return None  # would create a 4-cycle
    hits = sum(1 for w in witnesses if len(chosen.intersection(w)) % 2 == 1)
    return check, hits


def augment_checks(code: OuterCode, rng: random.Random, max_added: int,
                   k: int, attempts: int = 200) -> Tuple[Optional[OuterCode], int]:
    """Add up to max_added degree-k checks so that no weight <= 6 pattern is silent."""
    current = code
    added = 0
    while added < max_added:
        witnesses = _witnesses(current)
        if not witnesses:
            break
        best: Optional[Tuple[int, ...]] = None
        best_hits = 0
        for _ in range(attempts):
            cand = _candidate_check(current, witnesses, k, rng)
            if cand is None:
                continue
            check, hits = cand
            if hits > best_hits:
                best, best_hits = check, hits
                if hits == len(witnesses):
                    break
        if best is None:
            return None, added
        checks = current.checks + (best,)
        current = OuterCode(current.n_out, checks, (tuple(range(len(checks))),))
        added += 1
    ok, _ = certify_distance7(current)
    return (current, added) if ok else (None, added)


def search(config: SearchConfig) -> SearchResult:
    """Full pipeline: init, remove 4-cycles, anneal + certify, optionally augment."""
    t0 = time.monotonic()
    rng = random.Random(config.seed)
    code = init_bipartite(config)
    code, swaps = eliminate_4cycles(code, rng, config.swap_budget)
    iterations = swaps
    for _ in range(config.certify_rounds):
        ok, _witness = certify_distance7(code)
        if ok:
            report = verify_distance_sensitivity(code, 7)
            if not report.sensitivity_ok:
                raise AssertionError("certified code failed independent verification")
            return SearchResult(code, report.girth, 7, 0, iterations,
                                config.seed, time.monotonic() - t0)
        code = anneal_girth_preserving(code, rng, config.anneal_steps)
        iterations += config.anneal_steps
    if config.allow_added_checks:
        augmented, added = augment_checks(code, rng, config.max_added_checks, config.k_inner)
        if augmented is not None:
            report = verify_distance_sensitivity(augmented, 7)
            if report.sensitivity_ok:
                return SearchResult(augmented, report.girth // 2, 7, added,
                                    iterations, config.seed, time.monotonic() - t0)
    raise SearchStuck("no distance-7 code within the certify budget", best_girth=6)
