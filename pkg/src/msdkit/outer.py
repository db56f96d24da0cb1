"""Outer codes: check families with a measurement schedule.

An outer code is a set of parity checks over the output qubits plus an ordered
schedule of rounds; loneliness and once-checked counts depend on that order,
so the schedule is part of the value.  Constructors cover the grid families
(axis and diagonal rounds) and graph codes (one qubit per edge, one check per
vertex).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .gf2 import BitVector

__all__ = [
    "OuterCode",
    "SensitivityReport",
    "grid_code",
    "graph_code",
    "petersen_graph",
    "hoffman_singleton_graph",
    "verify_distance_sensitivity",
    "c_out",
    "lonely_and_once",
    "first_check_not_lonely",
    "iter_patterns",
    "count_cycles_of_length",
    "graph_girth",
    "EnumerationBudgetExceeded",
]

_C_OUT_BUDGET = 6

DIRECTIONS = ("vertical", "horizontal", "diag_down", "diag_up")


class EnumerationBudgetExceeded(ValueError):
    """Pattern weight beyond what the enumerator is allowed to scan."""


@dataclass(frozen=True)
class OuterCode:
    """Checks (sorted qubit tuples) plus a schedule of parallel rounds."""

    n_out: int
    checks: Tuple[Tuple[int, ...], ...]
    schedule: Tuple[Tuple[int, ...], ...]
    # optional per-check annotations (inner code name, check error rate)
    check_inner: Optional[Tuple[Optional[str], ...]] = None
    check_eps: Optional[Tuple[Optional[float], ...]] = None
    # True when a qubit-transitive translation group preserves the check set
    # (all grid constructions); enables anchored pattern counting
    translation_transitive: bool = False
    # (dims, directions) for codes built by grid_code; enables closed-form counts
    grid_spec: Optional[Tuple[Tuple[int, ...], Tuple[str, ...]]] = None

    def __post_init__(self) -> None:
        for chk in self.checks:
            if len(set(chk)) != len(chk):
                raise ValueError(f"check contains a repeated qubit: {chk}")
            if any(q < 0 or q >= self.n_out for q in chk):
                raise ValueError(f"qubit index out of range in check {chk}")
            if tuple(sorted(chk)) != chk:
                raise ValueError("check qubits must be sorted")
        seen = [c for rnd in self.schedule for c in rnd]
        if sorted(seen) != list(range(len(self.checks))):
            raise ValueError("schedule must cover every check exactly once")

    @property
    def n_check(self) -> int:
        return len(self.checks)

    @cached_property
    def qubit_checks(self) -> Tuple[Tuple[int, ...], ...]:
        out: List[List[int]] = [[] for _ in range(self.n_out)]
        for ci, chk in enumerate(self.checks):
            for q in chk:
                out[q].append(ci)
        return tuple(tuple(v) for v in out)

    @cached_property
    def round_of_check(self) -> Tuple[int, ...]:
        out = [0] * len(self.checks)
        for r, rnd in enumerate(self.schedule):
            for c in rnd:
                out[c] = r
        return tuple(out)

    def serialize(self) -> str:
        lines = [f"{self.n_out} {self.n_check}"]
        lines += [" ".join(str(q) for q in chk) for chk in self.checks]
        lines += [" ".join(str(c) for c in rnd) for rnd in self.schedule]
        return "\n".join(lines) + "\n"

    @staticmethod
    def deserialize(text: str) -> "OuterCode":
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
        n_out, n_check = (int(x) for x in lines[0].split())
        checks = tuple(tuple(sorted(int(q) for q in ln.split())) for ln in lines[1:1 + n_check])
        schedule = tuple(tuple(int(c) for c in ln.split()) for ln in lines[1 + n_check:])
        return OuterCode(n_out, checks, schedule)


@dataclass(frozen=True)
class SensitivityReport:
    distance_ok: bool
    sensitivity_ok: bool
    witness: Optional[BitVector]
    n_lonely: int
    n_once: int
    four_cycle_free: bool
    girth: int


# ----------------------------------------------------------------------------
# constructors


def grid_code(dims: Sequence[int], directions: Sequence[str]) -> OuterCode:
    """Grid outer code: one round per listed direction, in order.

    ``dims = (k1, .., kD)``; axis round j checks lines along axis j.  For two
    dimensions, 'vertical' fixes the column (a check of k1 qubits) and
    'horizontal' fixes the row; the diagonal rounds require a square grid.
    """
    dims = tuple(dims)
    ndim = len(dims)
    rounds: List[List[Tuple[int, ...]]] = []
    for direction in directions:
        if direction.startswith("axis"):
            axis = int(direction[4:])
        elif direction in ("vertical", "horizontal"):
            if ndim != 2:
                raise ValueError(f"{direction} requires a 2-D grid")
            axis = 0 if direction == "vertical" else 1
        elif direction in ("diag_down", "diag_up"):
            if ndim != 2 or dims[0] != dims[1]:
                raise ValueError("diagonal checks require a square 2-D grid")
            axis = None
        else:
            raise ValueError(f"unknown direction {direction!r}")
        if axis is not None:
            rounds.append(_axis_checks(dims, axis))
        else:
            k = dims[0]
            sign = 1 if direction == "diag_down" else -1
            rounds.append([
                tuple(sorted(r * k + ((z - sign * r) % k) for r in range(k)))
                for z in range(k)
            ])
    checks: List[Tuple[int, ...]] = []
    schedule: List[Tuple[int, ...]] = []
    for rnd in rounds:
        schedule.append(tuple(range(len(checks), len(checks) + len(rnd))))
        checks.extend(rnd)
    return OuterCode(int(math.prod(dims)), tuple(checks), tuple(schedule),
                     translation_transitive=True,
                     grid_spec=(dims, tuple(directions)))


def _axis_checks(dims: Tuple[int, ...], axis: int) -> List[Tuple[int, ...]]:
    strides = [0] * len(dims)
    acc = 1
    for j in range(len(dims) - 1, -1, -1):
        strides[j] = acc
        acc *= dims[j]
    other = [j for j in range(len(dims)) if j != axis]
    checks = []
    for combo in itertools.product(*(range(dims[j]) for j in other)):
        base = sum(c * strides[j] for c, j in zip(combo, other))
        checks.append(tuple(sorted(base + i * strides[axis] for i in range(dims[axis]))))
    return checks


def graph_code(edges: Sequence[Tuple[int, int]], girth_expected: int) -> OuterCode:
    """One qubit per edge, one check per vertex; the code distance is the graph girth."""
    edges = [tuple(sorted(e)) for e in edges]
    if len(set(edges)) != len(edges):
        raise ValueError("repeated edge")
    vertices = sorted({v for e in edges for v in e})
    vmap = {v: i for i, v in enumerate(vertices)}
    adj: List[List[int]] = [[] for _ in vertices]
    for a, b in edges:
        adj[vmap[a]].append(vmap[b])
        adj[vmap[b]].append(vmap[a])
    degrees = {len(nbrs) for nbrs in adj}
    if len(degrees) != 1:
        raise ValueError(f"graph is not regular: degrees {sorted(degrees)}")
    g = graph_girth(adj)
    if g != girth_expected:
        raise ValueError(f"girth {g} != expected {girth_expected}")
    checks: List[List[int]] = [[] for _ in vertices]
    for qi, (a, b) in enumerate(edges):
        checks[vmap[a]].append(qi)
        checks[vmap[b]].append(qi)
    return OuterCode(
        len(edges),
        tuple(tuple(sorted(c)) for c in checks),
        (tuple(range(len(vertices))),),
    )


def petersen_graph() -> List[Tuple[int, int]]:
    from importlib import resources

    text = resources.files("msdkit.data").joinpath("petersen.edges").read_text()
    return load_edge_list(text)


def hoffman_singleton_graph() -> List[Tuple[int, int]]:
    """Pentagon/pentagram construction: P_h(i) ~ Q_j(h*j+i mod 5)."""
    edges = []
    for h in range(5):
        for i in range(5):
            edges.append((h * 5 + i, h * 5 + (i + 1) % 5))           # pentagon P_h
            edges.append((25 + h * 5 + i, 25 + h * 5 + (i + 2) % 5))  # pentagram Q_h
    for h in range(5):
        for j in range(5):
            for i in range(5):
                edges.append((h * 5 + i, 25 + j * 5 + (h * j + i) % 5))
    return sorted(set(tuple(sorted(e)) for e in edges))


def load_edge_list(text: str) -> List[Tuple[int, int]]:
    """Plain edge-list format: one 'u v' pair per line, '#' comments."""
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = (int(x) for x in line.split())
        edges.append((a, b))
    return edges


# ----------------------------------------------------------------------------
# graph utilities


def graph_girth(adj: Sequence[Sequence[int]]) -> int:
    """Shortest cycle length via BFS from every vertex; large if acyclic."""
    best = len(adj) + 1
    for root in range(len(adj)):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
                    elif w != parent[u]:
                        best = min(best, dist[u] + dist[w] + 1)
            if 2 * (dist[frontier[0]] + 1) >= best:
                break
            frontier = nxt
    return best


def count_cycles_of_length(adj: Sequence[Sequence[int]], length: int) -> int:
    """Exhaustive count of simple cycles of the given length (small lengths only)."""
    count = 0
    for root in range(len(adj)):
        stack = [(root, (root,))]
        while stack:
            u, path = stack.pop()
            if len(path) == length:
                if root in adj[u]:
                    count += 1
                continue
            for w in adj[u]:
                if w > root and w not in path:
                    stack.append((w, path + (w,)))
    return count // 2  # each cycle seen once per direction from its minimum vertex


def _tanner_adjacency(code: OuterCode) -> List[List[int]]:
    n = code.n_out
    adj: List[List[int]] = [[] for _ in range(n + code.n_check)]
    for ci, chk in enumerate(code.checks):
        for q in chk:
            adj[q].append(n + ci)
            adj[n + ci].append(q)
    return adj


def tanner_girth(code: OuterCode) -> int:
    return graph_girth(_tanner_adjacency(code))


def four_cycle_free(code: OuterCode) -> bool:
    """No two checks share more than one qubit."""
    for i, a in enumerate(code.checks):
        sa = set(a)
        for b in code.checks[i + 1:]:
            if len(sa.intersection(b)) > 1:
                return False
    return True


# ----------------------------------------------------------------------------
# schedule combinatorics


@lru_cache(maxsize=128)
def _subsequent_singleton_counts(code: OuterCode) -> Tuple[Tuple[Tuple[int, Tuple[int, ...]], ...], ...]:
    """For each check, per qubit: the later checks meeting it exactly in that qubit."""
    rounds = code.round_of_check
    out = []
    for ci, chk in enumerate(code.checks):
        mine = set(chk)
        per_qubit = []
        for q in chk:
            later = tuple(
                cj for cj in code.qubit_checks[q]
                if rounds[cj] > rounds[ci] and len(mine.intersection(code.checks[cj])) == 1
            )
            per_qubit.append((q, later))
        out.append(tuple(per_qubit))
    return tuple(out)


def lonely_checks(code: OuterCode) -> Tuple[int, ...]:
    """Checks with some qubit never again met in a singleton intersection."""
    data = _subsequent_singleton_counts(code)
    return tuple(ci for ci, per_q in enumerate(data) if any(not later for _, later in per_q))


def once_checks(code: OuterCode) -> Tuple[Tuple[int, int, int], ...]:
    """(check, qubit, follow-up check) triples where exactly one later check guards the qubit."""
    data = _subsequent_singleton_counts(code)
    out = []
    for ci, per_q in enumerate(data):
        for q, later in per_q:
            if len(later) == 1:
                out.append((ci, q, later[0]))
    return tuple(out)


def lonely_and_once(code: OuterCode) -> Tuple[int, int]:
    data = _subsequent_singleton_counts(code)
    n_lonely = sum(1 for per_q in data if any(not later for _, later in per_q))
    n_once = sum(1 for per_q in data if any(len(later) == 1 for _, later in per_q))
    return n_lonely, n_once


def first_check_not_lonely(code: OuterCode) -> bool:
    """True iff no qubit's earliest check is a lonely check."""
    lonely = set(lonely_checks(code))
    rounds = code.round_of_check
    for q in range(code.n_out):
        cs = code.qubit_checks[q]
        if not cs:
            return False
        first_round = min(rounds[c] for c in cs)
        if any(c in lonely for c in cs if rounds[c] == first_round):
            return False
    return True


# ----------------------------------------------------------------------------
# low-weight pattern enumeration


def iter_patterns(code: OuterCode, u: int, v_budget: int,
                  anchored: bool = False) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All weight-u supports violating at most v_budget checks.

    Depth-first over positions in increasing order.  A violated check whose
    largest qubit lies below the next candidate position can never be fixed;
    once more than v_budget checks are dead the branch (and, because the count
    is monotone in the position, the whole remaining range) is abandoned.

    With ``anchored`` the support is forced to contain qubit 0.  For a
    translation-transitive code each orbit of patterns covers every qubit
    equally often, so the full count is the anchored count times n_out/u
    (exactly, including orbits with nontrivial stabilizer).
    """
    if u > _C_OUT_BUDGET + 1:
        raise EnumerationBudgetExceeded(f"pattern weight {u} > {_C_OUT_BUDGET + 1}")
    qchecks = code.qubit_checks
    cmax = [chk[-1] for chk in code.checks]
    maxdeg = max((len(c) for c in qchecks), default=0)
    parity = [0] * code.n_check
    violated: set = set()
    support: List[int] = []

    def toggle(p: int) -> None:
        for c in qchecks[p]:
            parity[c] ^= 1
            if parity[c]:
                violated.add(c)
            else:
                violated.discard(c)

    def admissible(p: int, remaining: int) -> bool:
        dead_after = sum(1 for c in violated if cmax[c] <= p)
        if dead_after > v_budget:
            return False
        need = max(0, (len(violated) - dead_after) - (v_budget - dead_after))
        return (need + maxdeg - 1) // maxdeg <= remaining

    def dfs(start: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        if len(support) == u:
            if len(violated) <= v_budget:
                yield tuple(support), tuple(sorted(violated))
            return
        remaining = u - len(support) - 1
        for p in range(start, code.n_out):
            dead = sum(1 for c in violated if cmax[c] < p)
            if dead > v_budget:
                break  # dead count only grows with p
            support.append(p)
            toggle(p)
            if admissible(p, remaining):
                yield from dfs(p + 1)
            toggle(p)
            support.pop()

    if anchored:
        if u == 0:
            return
        support.append(0)
        toggle(0)
        if admissible(0, u - 1):
            yield from dfs(1)
        toggle(0)
        support.pop()
    else:
        yield from dfs(0)


@lru_cache(maxsize=512)
def _pattern_counts_by_violations(code: OuterCode, u: int, v_budget: int) -> Tuple[Tuple[int, int], ...]:
    counts: Dict[int, int] = {}
    anchored = code.translation_transitive and u > 0
    for _, violated in iter_patterns(code, u, v_budget, anchored=anchored):
        counts[len(violated)] = counts.get(len(violated), 0) + 1
    if anchored:
        scaled = {}
        for v, cnt in counts.items():
            total = cnt * code.n_out
            assert total % u == 0
            scaled[v] = total // u
        counts = scaled
    return tuple(sorted(counts.items()))


def c_out(code: OuterCode, u: int, v: int) -> int:
    """Exact number of weight-u input patterns violating exactly v checks."""
    if u > _C_OUT_BUDGET:
        raise EnumerationBudgetExceeded(f"c_out weight {u} exceeds budget {_C_OUT_BUDGET}")
    return dict(_pattern_counts_by_violations(code, u, v)).get(v, 0)


def _has_partition_round(code: OuterCode) -> bool:
    """Some round's checks partition all qubits (true for every grid round)."""
    for rnd in code.schedule:
        qubits = [q for c in rnd for q in code.checks[c]]
        if len(qubits) == code.n_out and len(set(qubits)) == code.n_out:
            return True
    return False


def zero_violation_count(code: OuterCode, u: int) -> int:
    """c_out(u, 0) with closed-form fast paths for the grid families.

    An odd-weight pattern leaves some line of any partitioning round odd, so
    odd u gives zero without enumeration.  The two-round grid's weight-4
    kernel elements are corner rectangles; the three-round square grid's
    weight-6 ones are the difference hexagons counted by grid_kernel6_count.
    Both forms are cross-checked against the enumerator in the test suite.
    """
    if u == 0:
        return 0
    if u % 2 == 1 and _has_partition_round(code):
        return 0
    if code.grid_spec is not None:
        dims, directions = code.grid_spec
        if len(dims) == 2 and set(directions) == {"vertical", "horizontal"}:
            if u == 2:
                return 0
            if u == 4:
                return grid_rectangle_count(dims[0], dims[1])
            if u == 6:
                return grid_six_point_count(dims[0], dims[1])
        if (len(dims) == 2 and dims[0] == dims[1] and len(directions) == 3
                and set(directions) >= {"vertical", "horizontal"}):
            if u in (2, 4):
                return 0
            if u == 6:
                return grid_kernel6_count(dims[0])
    return c_out(code, u, 0)


# closed forms for the grid families, used to cross-check the enumerator and
# as a fast path on large grids
def grid_rectangle_count(k1: int, k2: int) -> int:
    """Weight-4 unviolated patterns of the two-round grid: corner rectangles."""
    return math.comb(k1, 2) * math.comb(k2, 2)


def grid_double_square_count(k: int) -> int:
    """Corner-sharing square pairs: the published weight-6 family of the three-round grid."""
    return k * k * (k - 1) // 2


def grid_kernel6_count(k: int) -> int:
    """All weight-6 unviolated patterns of the three-round grid: k * C(k,3).

    Every such pattern is a difference hexagon {(a_i, a_j + c) : i != j} for an
    unordered row triple {a_1,a_2,a_3} and a shift c; square pairs are the
    arithmetic-progression triples.  Cross-checked against full enumeration for
    k = 5, 7, 9, 11, 13 (the square-pair count alone is exhaustive only at k=5).
    """
    return k * math.comb(k, 3)


def grid_six_point_count(k1: int, k2: int) -> int:
    """Weight-6 unviolated patterns of the two-round grid: 3x3 complements of permutations."""
    return 6 * math.comb(k1, 3) * math.comb(k2, 3)


# ----------------------------------------------------------------------------
# verification


def verify_distance_sensitivity(code: OuterCode, d: int) -> SensitivityReport:
    """Check that weight-w patterns (w < d) violate at least ceil((d-w)/2) checks."""
    if d > 8:
        raise EnumerationBudgetExceeded("distance verification budget is d <= 8")
    witness: Optional[BitVector] = None
    sensitivity_ok = True
    distance_ok = True
    # every pattern has a translate containing qubit 0, so anchored existence
    # search is exact on transitive codes
    anchored = code.translation_transitive
    for w in range(1, d):
        required = -(-(d - w) // 2)  # ceil
        hit = next(iter_patterns(code, w, required - 1, anchored=anchored), None)
        if hit is not None:
            sensitivity_ok = False
            if witness is None:
                witness = BitVector.from_support(code.n_out, hit[0])
        if next(iter_patterns(code, w, 0, anchored=anchored), None) is not None:
            distance_ok = False
    n_lonely, n_once = lonely_and_once(code)
    return SensitivityReport(
        distance_ok=distance_ok,
        sensitivity_ok=sensitivity_ok,
        witness=witness,
        n_lonely=n_lonely,
        n_once=n_once,
        four_cycle_free=four_cycle_free(code),
        girth=tanner_girth(code),
    )
