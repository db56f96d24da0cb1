"""Analytic output-count, T-cost, and output-error estimates for protocols.

A protocol is an outer code with one inner code, error rate, and restart
policy per schedule round, plus an input error rate and a correction order.
The estimates enumerate the leading- and next-to-leading-order error channels
(input patterns, incorrectly measured checks, logical errors in lonely checks,
and correction-induced logicals) and track repeat/failure probabilities per
check through the schedule.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import outer as outer_mod
from .gf2 import BitVector
from .inner import InnerCode, MagicBasis, catalog_basis, catalog_code, c_log, min_logical_support
from .outer import OuterCode, c_out, verify_distance_sensitivity, zero_violation_count

__all__ = [
    "MarkovRates",
    "RoundSpec",
    "ProtocolSpec",
    "Contribution",
    "AnalysisReport",
    "AnalysisRefused",
    "markov_rates",
    "analyze",
    "grid_order",
    "series_correction",
    "basic_counts",
    "single_check_counts",
    "load_protocol_spec",
]

POLICIES = ("terminate", "parallel", "partial_restart")

#: raw T-gates consumed per state provided by the 10-to-2 upstream protocol
MEK_T_WEIGHT = 5
#: leading-order error map of that protocol, calibrated so 1e-3 -> 9e-6
MEK_ERROR_FACTOR = 9.0


class AnalysisRefused(RuntimeError):
    """A counting hypothesis fails for this protocol; named in the message."""

    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"analysis refused: {hypothesis}" + (f" ({detail})" if detail else ""))
        self.hypothesis = hypothesis


@dataclass(frozen=True)
class MarkovRates:
    p_succ: float
    p_repeat: float
    p_fail: float


def markov_rates(inner: InnerCode, eps_check: float, m: int) -> MarkovRates:
    """Per-measurement success/repeat/failure rates at correction order m in {1, 2}."""
    if m not in (1, 2):
        raise ValueError("markov_rates applies to correction order 1 or 2")
    n = inner.n
    p_succ = (1.0 - eps_check) ** (2 * n)
    p_repeat = 2 * n * eps_check
    if m == 2:
        p_repeat += 4 * n * n * eps_check * eps_check
    p_fail = n * eps_check ** 2 + (2 * n) ** (m + 1) * eps_check ** (m + 1) / math.factorial(m + 1)
    return MarkovRates(p_succ, p_repeat, p_fail)


@dataclass(frozen=True)
class RoundSpec:
    """Inner code, T-gate error rate, and restart policy for one schedule round."""

    inner: InnerCode
    basis: MagicBasis
    eps_check: float
    t_weight: int = 1       # raw T-gates per in-round T (5 when fed by MEK)
    policy: str = "terminate"

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise ValueError(f"unknown restart policy {self.policy!r}")


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    outer: OuterCode
    rounds: Tuple[RoundSpec, ...]
    eps_input: float
    input_t_weight: int
    correction_order: int
    conservative: bool
    distance: int  # outer-code distance, verified before analysis

    def __post_init__(self) -> None:
        if self.correction_order not in (0, 1, 2):
            raise ValueError("correction order must be 0, 1, or 2")
        if self.conservative and self.correction_order != 2:
            raise ValueError("the conservative discard rule pairs with order m=2")
        if len(self.rounds) != len(self.outer.schedule):
            raise ValueError("one RoundSpec per schedule round is required")
        m = self.correction_order
        for r in self.rounds:
            if m >= 1 and 2 * (r.inner.d - m) <= r.inner.d:
                raise ValueError(
                    f"order {m} correction needs 2(d-m) > d, but {r.inner.name} has d={r.inner.d}")
        for ri, rnd in enumerate(self.outer.schedule):
            k = self.rounds[ri].inner.k
            for c in rnd:
                size = len(self.outer.checks[c])
                if size != k and (size > k or (k - size) % 2 != 0):
                    raise ValueError(
                        f"check of size {size} incompatible with k={k} inner code")


@dataclass(frozen=True)
class Contribution:
    label: str
    count: float
    probability: float
    detail: str = ""


@dataclass(frozen=True)
class AnalysisReport:
    name: str
    n_out: int
    n_out_bar: float
    n_t_bar: float
    eps_out: float
    eps_out_bar: float
    acceptance: float
    contributions: Tuple[Contribution, ...]
    space_cost: Tuple[int, int]  # [n_out, 4 n_out)


# ---------------------------------------------------------------------------
# per-round bookkeeping


@dataclass(frozen=True)
class _RoundStats:
    n_checks: int
    p_cont: float      # probability a check measurement proceeds
    p_repeat: float
    t_per_check: float  # expected raw T-gates per check, weight included


def _round_stats(spec: ProtocolSpec) -> List[_RoundStats]:
    out = []
    m = spec.correction_order
    for ri, rnd in enumerate(spec.outer.schedule):
        r = spec.rounds[ri]
        if m == 0:
            p_cont = (1.0 - r.eps_check) ** (2 * r.inner.n)
            p_rep = 0.0
        else:
            rates = markov_rates(r.inner, r.eps_check, m)
            p_cont = rates.p_succ / (rates.p_succ + rates.p_fail)
            p_rep = rates.p_repeat
        t = 2 * r.inner.n / (1.0 - p_rep) * r.t_weight
        out.append(_RoundStats(len(rnd), p_cont, p_rep, t))
    return out


def _expected_discard(spec: ProtocolSpec) -> float:
    """Average number of lower-quality qubits removed at the end of the protocol."""
    if spec.correction_order == 0:
        return 0.0
    threshold = 1 if spec.conservative else 0
    data = outer_mod._subsequent_singleton_counts(spec.outer)
    rounds = spec.outer.round_of_check
    stats = _round_stats(spec)
    total = 0.0
    for ci, per_q in enumerate(data):
        exposed = sum(1 for _, later in per_q if len(later) <= threshold)
        if exposed:
            total += stats[rounds[ci]].p_repeat * exposed
    return total


def _check_eps(spec: ProtocolSpec, ci: int) -> float:
    if spec.outer.check_eps is not None and spec.outer.check_eps[ci] is not None:
        return spec.outer.check_eps[ci]
    return spec.rounds[spec.outer.round_of_check[ci]].eps_check


def _mismeasure_prob(spec: ProtocolSpec, ci: int) -> float:
    """Leading-order probability that check ci is read incorrectly: n_inner * eps^2."""
    n = spec.rounds[spec.outer.round_of_check[ci]].inner.n
    eps = _check_eps(spec, ci)
    return n * eps * eps


# ---------------------------------------------------------------------------
# output count and T count


def _acceptance_and_cost(spec: ProtocolSpec) -> Tuple[float, float, float]:
    """Returns (acceptance probability, expected output count, expected raw T)."""
    stats = _round_stats(spec)
    accept = (1.0 - spec.eps_input) ** spec.outer.n_out
    t_total = spec.outer.n_out * spec.input_t_weight
    a_run = 1.0
    for ri, st in enumerate(stats):
        policy = spec.rounds[ri].policy
        if policy == "terminate":
            geo = sum(st.p_cont ** i for i in range(st.n_checks))
            t_total += a_run * geo * st.t_per_check
            a_run *= st.p_cont ** st.n_checks
        elif policy == "parallel":
            t_total += a_run * st.n_checks * st.t_per_check
            a_run *= st.p_cont ** st.n_checks
        else:  # partial_restart: repeat failed checks until they pass
            t_total += a_run * st.n_checks * st.t_per_check / st.p_cont
            retries = (1.0 / st.p_cont - 1.0) * st.n_checks
            t_total += a_run * retries * spec.rounds[ri].inner.k * spec.input_t_weight
    accept *= a_run
    n_out_bar = (spec.outer.n_out - _expected_discard(spec)) * accept
    return accept, n_out_bar, t_total


# ---------------------------------------------------------------------------
# output-error channels


def _correction_logical_suppressed(spec: ProtocolSpec, ri: int) -> bool:
    """True when the basis choice removes the single-follow-up logical channel."""
    r = spec.rounds[ri]
    if not outer_mod.four_cycle_free(spec.outer):
        return False
    return min_logical_support(r.inner, r.basis) >= 2


def _error_channels(spec: ProtocolSpec) -> List[Contribution]:
    out: List[Contribution] = []
    outer = spec.outer
    d_out = spec.distance
    rounds = outer.round_of_check
    eps_in = spec.eps_input

    if outer.n_check == 1:
        return _single_check_channels(spec)

    # input patterns violating no checks
    for u in range(d_out, min(6, d_out + 1) + 1):
        cnt = zero_violation_count(outer, u)
        if cnt:
            out.append(Contribution("input-pattern", cnt, cnt * eps_in ** u,
                                    f"{u} input errors, no violated check"))

    # single input error, every covering check read incorrectly
    budget = d_out + 1
    total_p = 0.0
    total_c = 0
    for q in range(outer.n_out):
        cs = outer.qubit_checks[q]
        if 1 + 2 * len(cs) > budget:
            continue
        p = eps_in
        c = 1
        for ci in cs:
            p *= _mismeasure_prob(spec, ci)
            c *= spec.rounds[rounds[ci]].inner.n
        total_p += p
        total_c += c
    if total_p:
        out.append(Contribution("incorrect-measurement", total_c, total_p,
                                "1 input error, all covering checks misread"))

    # input pairs with few violated checks (vanishes for 4-cycle-free grids)
    if 2 + 2 * 1 <= budget:
        pair_c, pair_p = _pair_channel(spec, budget)
        if pair_p:
            out.append(Contribution("incorrect-measurement", pair_c, pair_p,
                                    "2 input errors, violated checks misread"))

    # logical operators inside lonely checks
    lonely = outer_mod.lonely_checks(outer)
    by_round: Dict[int, List[int]] = {}
    for ci in lonely:
        by_round.setdefault(rounds[ci], []).append(ci)
    for ri, cis in sorted(by_round.items()):
        r = spec.rounds[ri]
        for b in (r.inner.d, r.inner.d + 1):
            clog = c_log(r.inner, b)
            if not clog:
                continue
            cnt = len(cis) * (1 << (b - 1)) * clog
            prob = sum((1 << (b - 1)) * clog * _check_eps(spec, ci) ** b for ci in cis)
            out.append(Contribution("logical-in-lonely", cnt, prob,
                                    f"weight-{b} logicals, round {ri}"))

    # correction-induced logicals caught by exactly one later check
    if spec.correction_order >= 1 and not spec.conservative:
        out.extend(_correction_logical_channel(spec))
    return out


def _pair_channel(spec: ProtocolSpec, budget: int) -> Tuple[int, float]:
    outer = spec.outer
    vmax = (budget - 2) // 2
    anchored = outer.translation_transitive and outer.check_eps is None
    count = 0
    prob = 0.0
    firsts = (0,) if anchored else tuple(range(outer.n_out))
    for q1 in firsts:
        set1 = set(outer.qubit_checks[q1])
        for q2 in range(q1 + 1, outer.n_out):
            violated = set1.symmetric_difference(outer.qubit_checks[q2])
            if len(violated) > vmax:
                continue
            p = spec.eps_input ** 2
            c = 1
            for ci in violated:
                p *= _mismeasure_prob(spec, ci)
                c *= spec.rounds[outer.round_of_check[ci]].inner.n
            count += c
            prob += p
    if anchored:
        # translation-transitive: scale the anchored sum by n_out / 2
        count = count * outer.n_out // 2
        prob = prob * outer.n_out / 2
    return count, prob


def _correction_logical_channel(spec: ProtocolSpec) -> List[Contribution]:
    outer = spec.outer
    m = spec.correction_order
    rounds = outer.round_of_check
    triples = outer_mod.once_checks(outer)
    best: Dict[int, Tuple[float, int]] = {}
    for ci, _q, cj in triples:
        mu = _mismeasure_prob(spec, cj)
        n_follow = spec.rounds[rounds[cj]].inner.n
        if mu > best.get(ci, (0.0, 0))[0]:
            best[ci] = (mu, n_follow)
    out: List[Contribution] = []
    agg: Dict[Tuple[int, int], Tuple[float, float]] = {}
    for ci, (mu, n_follow) in best.items():
        ri = rounds[ci]
        if _correction_logical_suppressed(spec, ri):
            continue
        r = spec.rounds[ri]
        d = r.inner.d
        clog = c_log(r.inner, d)
        eps = _check_eps(spec, ci)
        terms = [(d + 1, (1 << (d - 1)) * d * clog)]
        if m == 2:
            terms.append((d, (1 << (d - 2)) * math.comb(d, 2) * clog))
        for order, base in terms:
            cnt, prob = agg.get((ri, order), (0.0, 0.0))
            agg[(ri, order)] = (cnt + base * n_follow, prob + base * eps ** (order - 2) * mu)
    for (ri, order), (cnt, prob) in sorted(agg.items()):
        out.append(Contribution("logical-from-correction", cnt, prob,
                                f"order-{order} corrected logical, round {ri}"))
    return out


# ---------------------------------------------------------------------------
# single-check protocols (the only case where the first check is lonely)


@lru_cache(maxsize=32)
def _coset_weight_counts(code: InnerCode, basis: MagicBasis, w: int) -> Tuple[int, ...]:
    """Per basis vector: number of weight-w elements in its stabilizer coset."""
    import numpy as np

    from .inner import _stabilizer_words

    words = _stabilizer_words(code.stabilizer)
    out = []
    for ell in basis.vectors:
        out.append(int((np.bitwise_count(words ^ np.uint64(ell)) == w).sum()))
    return tuple(out)


def single_check_counts(inner: InnerCode, basis: MagicBasis, k: int, a: int, b: int) -> int:
    """Error patterns of weight (a, b) producing an output error on one lonely check.

    Covers the syndrome-free channels: matched T-gate pairs that flip the
    measured parity, and bare logical operators (with the placements whose
    second-gate parity hides them); logicals whose action exactly cancels the
    input pattern are excluded for a <= 1.
    """
    from .gf2 import count_weight

    n = inner.n
    count = 0
    # matched-pair channel: e1 == e2 on b/2 qubits, net parity must pass
    if b % 2 == 0 and a + b // 2 > 0:
        if (a + b // 2) % 2 == 0 and a > 0:
            count += math.comb(k, a) * math.comb(n, b // 2)
    # stabilizer channel: combined error in C, half the placements pass
    if 0 < b <= 8 and a > 0:
        stab = count_weight(inner.stabilizer, b)
        if stab:
            count += (1 << (b - 1)) * stab * math.comb(k, a)
    # logical channel: combined error is a weight-b nontrivial logical
    if b >= inner.d:
        clog = c_log(inner, b)
        if clog:
            placements = 1 << (b - 1)  # second-gate parity must match input parity
            if a == 0:
                count += placements * clog
            elif a == 1:
                cancel = sum(_coset_weight_counts(inner, basis, b))
                count += placements * (k * clog - cancel)
            else:
                # action would need to cancel >= 2 input errors: beyond the
                # tracked orders for every catalog code (a + b > d + 1)
                pass
    return count


def _single_check_channels(spec: ProtocolSpec) -> List[Contribution]:
    r = spec.rounds[0]
    k = len(spec.outer.checks[0])
    eps_c = _check_eps(spec, 0)
    d = r.inner.d
    out: List[Contribution] = []
    labels = {
        "input-pattern": lambda a, b: b == 0,
        "incorrect-measurement": lambda a, b: 0 < b < d,
        "logical-in-lonely": lambda a, b: b >= d,
    }
    for a in range(0, min(6, k) + 1):
        for b in range(0, d + 2 - a):
            cnt = single_check_counts(r.inner, r.basis, k, a, b)
            if not cnt:
                continue
            prob = cnt * spec.eps_input ** a * eps_c ** b
            label = next(lbl for lbl, pred in labels.items() if pred(a, b))
            out.append(Contribution(label, cnt, prob, f"(a,b)=({a},{b})"))
    return out


# ---------------------------------------------------------------------------
# public entry points


def analyze(spec: ProtocolSpec) -> AnalysisReport:
    """Compute the output count, T cost, and output error estimates."""
    report = verify_distance_sensitivity(spec.outer, spec.distance)
    if not report.sensitivity_ok:
        raise AnalysisRefused("distance-sensitivity",
                              f"a weight-{report.witness.weight} pattern violates too few checks")
    if not outer_mod.first_check_not_lonely(spec.outer) and spec.outer.n_check > 1:
        raise AnalysisRefused("first-check-not-lonely",
                              "pattern counting assumes non-lonely first checks")
    acceptance, n_out_bar, n_t_bar = _acceptance_and_cost(spec)
    contributions = tuple(_error_channels(spec))
    eps_out = sum(c.probability for c in contributions)
    return AnalysisReport(
        name=spec.name,
        n_out=spec.outer.n_out,
        n_out_bar=n_out_bar,
        n_t_bar=n_t_bar,
        eps_out=eps_out,
        eps_out_bar=eps_out / n_out_bar if n_out_bar > 0 else math.inf,
        acceptance=acceptance,
        contributions=contributions,
        space_cost=(spec.outer.n_out, 4 * spec.outer.n_out),
    )


def grid_order(inner_distances: Sequence[int]) -> int:
    """Order of error reduction of the D-dimensional simple grid.

    Tracks the odd- and even-parity-sector error orders through the
    measurement recursion; the input sits in the odd sector at order 1.
    """
    odd: float = 1
    even: float = math.inf
    for d in inner_distances:
        odd, even = (
            min(odd + 2, even + 4, d),
            min(2 * even, 2 * odd, even + 4, d),
        )
    return int(min(odd, even))


def series_correction(counts: Mapping[Tuple[int, int], int], order: int,
                      eps_input: float, eps_check: float,
                      n_input_sites: int, n_check_sites: int) -> float:
    """Two-order truncation of the output error including the no-error factors.

    ``counts`` holds pattern counts keyed by (input weight, check weight) at
    total weights ``order`` and ``order + 1``.  The result is an estimate, not
    a bound: the (1-eps) expansion subtracts the leading-order patterns'
    re-weighting, which is what cancels the inserted corrected-error channel.
    """
    total = 0.0
    for (a, b), cnt in counts.items():
        if a + b == order or a + b == order + 1:
            total += cnt * eps_input ** a * eps_check ** b
    for (a, b), cnt in counts.items():
        if a + b == order:
            total -= cnt * eps_input ** a * eps_check ** b * (
                (n_input_sites - a) * eps_input + (n_check_sites - b) * eps_check)
    return total


def basic_counts(spec: ProtocolSpec) -> Dict[Tuple[int, int], int]:
    """Leading and next-to-leading pattern counts for the basic (m=0) family.

    Requires the distance/sensitivity bounds and non-lonely first checks; the
    composition over odd pair-groups collapses to n_inner^(b/2) * c_out(a, b/2)
    at the tracked orders.
    """
    outer = spec.outer
    if not outer_mod.first_check_not_lonely(outer):
        raise AnalysisRefused("first-check-not-lonely")
    rep = verify_distance_sensitivity(outer, spec.distance)
    if not rep.sensitivity_ok:
        raise AnalysisRefused("distance-sensitivity")
    inners = {r.inner for r in spec.rounds}
    if len(inners) != 1:
        raise AnalysisRefused("uniform-inner-code", "Lemma counts use one inner code")
    inner = next(iter(inners))
    d = min(spec.distance, inner.d)
    n_lonely, _ = outer_mod.lonely_and_once(outer)
    counts: Dict[Tuple[int, int], int] = {}
    for total in (d, d + 1):
        for a in range(0, total + 1):
            b = total - a
            if a == 0:
                cnt = n_lonely * (1 << (b - 1)) * c_log(inner, b) if b >= inner.d else 0
            elif b % 2 == 1:
                cnt = 0
            else:
                cnt = int(round(_composition_count(inner.n, b) @ _c_out_row(outer, a, b // 2)))
            if cnt:
                counts[(a, b)] = cnt
    return counts


def _composition_count(n: int, b: int):
    """Vector over j of sums over odd compositions (f_1..f_j) of b/2 of prod C(n, f_i)."""
    import numpy as np

    half = b // 2
    # ways[j][s]: compositions of s into j positive odd parts, weighted by C(n, f)
    table = np.zeros((half + 1, half + 1))
    table[0][0] = 1.0
    for j in range(1, half + 1):
        for s in range(j, half + 1):
            table[j][s] = sum(table[j - 1][s - f] * math.comb(n, f)
                              for f in range(1, s - j + 2, 2))
    return np.array([table[j][half] for j in range(half + 1)])


def _c_out_row(outer: OuterCode, a: int, jmax: int):
    import numpy as np

    return np.array([float(c_out(outer, a, j)) for j in range(jmax + 1)])


# ---------------------------------------------------------------------------
# protocol spec files


def _build_outer_from_config(cfg: configparser.ConfigParser) -> OuterCode:
    sec = cfg["outer"]
    kind = sec.get("kind")
    if kind == "grid":
        dims = tuple(int(x) for x in sec.get("dims").split())
        directions = tuple(sec.get("directions").split())
        return outer_mod.grid_code(dims, directions)
    if kind == "single":
        k = sec.getint("size")
        return OuterCode(k, (tuple(range(k)),), ((0,),))
    if kind == "petersen":
        return outer_mod.graph_code(outer_mod.petersen_graph(), 5)
    if kind == "hoffman-singleton":
        return outer_mod.graph_code(outer_mod.hoffman_singleton_graph(), 5)
    if kind == "file":
        with open(sec.get("path")) as fh:
            return OuterCode.deserialize(fh.read())
    raise ValueError(f"unknown outer code kind {kind!r}")


def load_protocol_spec(path: str) -> ProtocolSpec:
    """Read a protocol description from an INI-style .cfg file."""
    cfg = configparser.ConfigParser()
    with open(path) as fh:
        cfg.read_file(fh)
    outer = _build_outer_from_config(cfg)
    proto = cfg["protocol"]
    inp = cfg["input"]
    input_source = inp.get("source", "raw")
    input_weight = MEK_T_WEIGHT if input_source == "mek" else 1
    round_secs = [s for s in cfg.sections() if s.startswith("round")]
    if len(round_secs) != len(outer.schedule):
        raise ValueError(f"expected {len(outer.schedule)} round sections, found {len(round_secs)}")
    rounds = []
    for sec_name in round_secs:
        sec = cfg[sec_name]
        name = sec.get("inner")
        source = sec.get("source", "raw")
        rounds.append(RoundSpec(
            inner=catalog_code(name),
            basis=catalog_basis(name),
            eps_check=sec.getfloat("eps"),
            t_weight=MEK_T_WEIGHT if source == "mek" else 1,
            policy=sec.get("policy", "terminate"),
        ))
    return ProtocolSpec(
        name=proto.get("name"),
        outer=outer,
        rounds=tuple(rounds),
        eps_input=inp.getfloat("eps"),
        input_t_weight=input_weight,
        correction_order=proto.getint("m"),
        conservative=proto.getboolean("conservative", fallback=False),
        distance=proto.getint("distance"),
    )
