"""Stochastic simulator of the distillation protocols under independent Y errors.

Each check measurement draws two T-gate error layers (before/after), reduces
their XOR against the inner code, optionally corrects low-weight syndromes,
and applies the surviving logical action to the data qubits.  The measured
check value is the data parity XORed with the parity of the second layer;
see the module's check-semantics note in simulate_check.

Trials run in fixed-size blocks with one counter-based Philox stream per
block, so results are reproducible and independent of how blocks are
distributed over workers.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import outer as outer_mod
from .analysis import ProtocolSpec, _check_eps, analyze
from .gf2 import BitVector
from .inner import InnerCode, MagicBasis, c_log
from .outer import zero_violation_count

__all__ = [
    "CheckOutcome",
    "TrialSummary",
    "simulate_check",
    "simulate_protocol",
    "exact_reference",
    "compare",
    "CompareRow",
    "CompareReport",
]

TRIAL_BLOCK = 1 << 16
_MAX_REPEATS = 10_000


@dataclass(frozen=True)
class CheckOutcome:
    inner_syndrome_nontrivial: bool
    corrected: bool
    measured_parity_flip: bool
    logical_action_applied: BitVector


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    accepted: int
    output_states: int
    output_errors: int
    rng_seed: int

    @property
    def acceptance(self) -> float:
        return self.accepted / self.trials

    @property
    def n_out_bar(self) -> float:
        return self.output_states / self.trials

    @property
    def eps_out(self) -> float:
        return self.output_errors / self.trials

    def merge(self, other: "TrialSummary") -> "TrialSummary":
        return TrialSummary(
            self.trials + other.trials,
            self.accepted + other.accepted,
            self.output_states + other.output_states,
            self.output_errors + other.output_errors,
            self.rng_seed,
        )


# ---------------------------------------------------------------------------
# inner-code tables


@lru_cache(maxsize=32)
def _syndrome_rows(code: InnerCode) -> Tuple[int, ...]:
    return code.stabilizer.rows


def _syndrome_of(code: InnerCode, v: int) -> int:
    s = 0
    for i, row in enumerate(_syndrome_rows(code)):
        s |= ((v & row).bit_count() & 1) << i
    return s


@lru_cache(maxsize=32)
def _correction_table(code: InnerCode, m: int) -> Dict[int, int]:
    """Syndrome -> minimum-weight correction mask, for weights 1..m."""
    table: Dict[int, int] = {}
    for w in range(1, m + 1):
        for supp in itertools.combinations(range(code.n), w):
            mask = 0
            for q in supp:
                mask |= 1 << q
            s = _syndrome_of(code, mask)
            if s and s not in table:
                table[s] = mask
    return table


def simulate_check(inner: InnerCode, basis: MagicBasis, e1: BitVector, e2: BitVector,
                   input_parity: int, m: int) -> CheckOutcome:
    """Deterministic outcome of one check measurement attempt.

    The combined Y pattern is e1 XOR e2.  A trivial syndrome leaves a logical
    action (zero exactly on stabilizers) and a measured value equal to
    input_parity XOR |e2| mod 2.  A nontrivial syndrome producible by at most
    m errors is corrected, leaving the residual's action; the measurement is
    then repeated by the caller.  The parity-flip rule is the minimal reading
    consistent with the pattern-counting arguments: a matched pair on one
    qubit flips the outcome, and moving one error of a logical pattern from
    the first to the second layer toggles it.
    """
    if e1.length != inner.n or e2.length != inner.n:
        raise ValueError("error layers must have length n_inner")
    v = e1.bits ^ e2.bits
    syndrome = _syndrome_of(inner, v)
    flip = bool(e2.weight & 1)
    if syndrome == 0:
        action = _action_of(inner, basis, v)
        return CheckOutcome(False, False, flip, action)
    correction = _correction_table(inner, m).get(syndrome) if m >= 1 else None
    if correction is None:
        return CheckOutcome(True, False, flip, BitVector(inner.k, 0))
    residual = v ^ correction
    action = _action_of(inner, basis, residual)
    return CheckOutcome(True, True, flip, action)


def _action_of(inner: InnerCode, basis: MagicBasis, v: int) -> BitVector:
    bits = 0
    for j, ell in enumerate(basis.vectors):
        bits |= ((v & ell).bit_count() & 1) << j
    return BitVector(inner.k, bits)


# ---------------------------------------------------------------------------
# vectorized protocol simulation


class _CheckKernel:
    """Numpy tables for one inner code / basis / correction order."""

    def __init__(self, inner: InnerCode, basis: MagicBasis, m: int):
        self.inner = inner
        n = inner.n
        self.n = n
        self.k = inner.k
        rows = _syndrome_rows(inner)
        self.c_mat = np.array([[(row >> j) & 1 for j in range(n)] for row in rows],
                              dtype=np.uint8)
        self.b_mat = np.array([[(ell >> j) & 1 for j in range(n)] for ell in basis.vectors],
                              dtype=np.uint8)
        self.syn_weights = (1 << np.arange(len(rows), dtype=np.int64))
        table = _correction_table(inner, m) if m >= 1 else {}
        syn_sorted = np.array(sorted(table), dtype=np.int64)
        self.syn_sorted = syn_sorted
        self.corr = np.zeros((len(syn_sorted), n), dtype=np.uint8)
        for i, s in enumerate(syn_sorted):
            mask = table[int(s)]
            self.corr[i] = [(mask >> j) & 1 for j in range(n)]

    def syndromes(self, v: np.ndarray) -> np.ndarray:
        return ((v @ self.c_mat.T) & 1).astype(np.int64) @ self.syn_weights

    def corrections(self, syn: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(correctable mask, residual corrections) for an array of syndromes."""
        if self.syn_sorted.size == 0:
            return np.zeros(syn.shape, dtype=bool), np.zeros((len(syn), self.n), dtype=np.uint8)
        pos = np.searchsorted(self.syn_sorted, syn)
        pos_c = np.clip(pos, 0, len(self.syn_sorted) - 1)
        ok = self.syn_sorted[pos_c] == syn
        return ok, self.corr[pos_c]

    def actions(self, v: np.ndarray) -> np.ndarray:
        return (v @ self.b_mat.T) & 1


def _exposed_qubits(spec: ProtocolSpec) -> List[np.ndarray]:
    """Per check: the qubit positions that become lower quality on a correction."""
    threshold = 1 if spec.conservative else 0
    data = outer_mod._subsequent_singleton_counts(spec.outer)
    out = []
    for per_q in data:
        out.append(np.array([q for q, later in per_q if len(later) <= threshold],
                            dtype=np.int64))
    return out


def _simulate_block(spec: ProtocolSpec, n_trials: int, seed: int, block_index: int) -> TrialSummary:
    rng = np.random.Generator(np.random.Philox(key=[seed, block_index]))
    outer = spec.outer
    m = spec.correction_order
    for ri, rnd in enumerate(outer.schedule):
        if any(len(outer.checks[c]) != spec.rounds[ri].inner.k for c in rnd):
            raise ValueError("simulation requires check sizes equal to k_inner")
    kernels = [_CheckKernel(r.inner, r.basis, m) for r in spec.rounds]
    exposed = _exposed_qubits(spec)
    rounds_of = outer.round_of_check

    data = (rng.random((n_trials, outer.n_out)) < spec.eps_input).astype(np.uint8)
    marks = np.zeros_like(data, dtype=bool)
    alive = np.ones(n_trials, dtype=bool)

    for ri, rnd in enumerate(outer.schedule):
        policy = spec.rounds[ri].policy
        eps = spec.rounds[ri].eps_check
        kern = kernels[ri]
        for ci in rnd:
            qubits = np.array(outer.checks[ci], dtype=np.int64)
            if outer.check_eps is not None and outer.check_eps[ci] is not None:
                eps_ci = outer.check_eps[ci]
            else:
                eps_ci = eps
            active = np.flatnonzero(alive)
            for _ in range(_MAX_REPEATS):
                if active.size == 0:
                    break
                e1 = rng.random((active.size, kern.n)) < eps_ci
                e2 = rng.random((active.size, kern.n)) < eps_ci
                v = (e1 ^ e2).astype(np.uint8)
                syn = kern.syndromes(v)
                trivial = syn == 0
                flip = (e2.sum(axis=1) & 1).astype(np.int64)
                parity = (data[np.ix_(active, qubits)].sum(axis=1).astype(np.int64)) & 1
                measured = (parity + flip) & 1

                passed = trivial & (measured == 0)
                outer_syn = trivial & (measured == 1)
                correctable, residual_corr = kern.corrections(syn)
                correctable &= ~trivial
                failed_inner = ~trivial & ~correctable

                if passed.any():
                    idx = active[passed]
                    act = kern.actions(v[passed])
                    data[np.ix_(idx, qubits)] ^= act[:, : len(qubits)]
                if correctable.any():
                    idx = active[correctable]
                    resid = v[correctable] ^ residual_corr[correctable]
                    act = kern.actions(resid)
                    data[np.ix_(idx, qubits)] ^= act[:, : len(qubits)]
                    if exposed[ci].size:
                        marks[np.ix_(idx, exposed[ci])] = True

                if policy == "partial_restart":
                    retry = outer_syn | failed_inner
                    if retry.any():
                        idx = active[retry]
                        fresh = rng.random((idx.size, len(qubits))) < spec.eps_input
                        data[np.ix_(idx, qubits)] = fresh.astype(np.uint8)
                        marks[np.ix_(idx, qubits)] = False
                    active = active[retry | correctable]
                else:
                    dead = outer_syn | failed_inner
                    if dead.any():
                        alive[active[dead]] = False
                    active = active[correctable]
            else:
                raise RuntimeError("check repeat budget exhausted")

    kept = ~marks & alive[:, None]
    surviving_errors = (data.astype(bool) & kept).any(axis=1)
    accepted = int(alive.sum())
    output_states = int(kept[alive].sum()) if accepted else 0
    output_errors = int((surviving_errors & alive).sum())
    return TrialSummary(n_trials, accepted, output_states, output_errors, seed)


def simulate_protocol(spec: ProtocolSpec, trials: int, seed: int,
                      threads: int = 1) -> TrialSummary:
    """Run the protocol ``trials`` times; reproducible for a given seed."""
    if trials < 1:
        raise ValueError("trials must be positive")
    blocks = []
    start = 0
    index = 0
    while start < trials:
        size = min(TRIAL_BLOCK, trials - start)
        blocks.append((size, index))
        start += size
        index += 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda b: _simulate_block(spec, b[0], seed, b[1]), blocks))
    else:
        parts = [_simulate_block(spec, size, seed, i) for size, i in blocks]
    summary = parts[0]
    for part in parts[1:]:
        summary = summary.merge(part)
    return summary


# ---------------------------------------------------------------------------
# exact reference model (the analytic side of the cross-validation)


@dataclass(frozen=True)
class _AttemptClasses:
    """Per-attempt probabilities of one check measurement, exact in eps_check."""

    pass_clean: float    # trivial syndrome, second layer even
    pass_flip: float     # trivial syndrome, second layer odd
    repeat: float        # correctable nontrivial syndrome
    fail_syndrome: float  # uncorrectable syndrome
    silent_logical: float  # within pass_clean: nontrivial logical applied

    @property
    def landing(self) -> float:
        return 1.0 - self.repeat

    @property
    def pc(self) -> float:
        """Absorbing probability of eventually passing cleanly."""
        return self.pass_clean / self.landing

    @property
    def pf(self) -> float:
        return self.pass_flip / self.landing


def _attempt_classes(inner: InnerCode, eps: float, m: int) -> _AttemptClasses:
    rows = _syndrome_rows(inner)
    dim = len(rows)
    n = inner.n
    cols = np.zeros(n, dtype=np.int64)
    for i, row in enumerate(rows):
        for j in range(n):
            if (row >> j) & 1:
                cols[j] |= 1 << i
    size = 1 << dim
    idx = np.arange(size)
    prob = np.zeros((2, size))
    prob[0, 0] = 1.0
    q00 = (1 - eps) ** 2
    q11 = eps * eps
    q_flip = eps * (1 - eps)  # each of (1,0) and (0,1)
    for j in range(n):
        perm = idx ^ cols[j]
        new0 = q00 * prob[0] + q_flip * prob[0][perm] + q_flip * prob[1][perm] + q11 * prob[1]
        new1 = q00 * prob[1] + q_flip * prob[1][perm] + q_flip * prob[0][perm] + q11 * prob[0]
        prob = np.stack([new0, new1])
    correctable = sorted(_correction_table(inner, m)) if m >= 1 else []
    repeat = float(sum(prob[0, s] + prob[1, s] for s in correctable))
    pass_clean = float(prob[0, 0])
    pass_flip = float(prob[1, 0])
    fail_syndrome = max(0.0, 1.0 - pass_clean - pass_flip - repeat)
    r = 2 * eps * (1 - eps)
    base = ((1 - eps) ** 2 + eps * eps)
    silent = 0.0
    for w in (inner.d, inner.d + 1):
        silent += c_log(inner, w) * r ** w * base ** (n - w) / 2.0
    return _AttemptClasses(pass_clean, pass_flip, repeat, fail_syndrome, silent)


@dataclass(frozen=True)
class ExactReference:
    acceptance: float
    n_out_bar: float
    eps_out: float


class UnsupportedProtocol(ValueError):
    """exact_reference only covers the cross-validation protocol shapes."""


def exact_reference(spec: ProtocolSpec) -> ExactReference:
    """Markov-exact acceptance and output error for the validation protocols.

    Supports the two shapes exercised at inflated error rates: a single
    detection-only check, and a two-round grid with order-1 correction.
    Input-pattern sums are truncated at the weight-6 kernel terms.
    """
    outer = spec.outer
    if outer.n_check == 1 and spec.correction_order == 0:
        return _exact_single_check(spec)
    if (len(outer.schedule) == 2 and spec.correction_order == 1
            and outer.grid_spec is not None
            and all(r.policy == "terminate" for r in spec.rounds)):
        return _exact_grid_m1(spec)
    raise UnsupportedProtocol("exact reference covers single-check and two-round grid shapes")


def _exact_single_check(spec: ProtocolSpec) -> ExactReference:
    r = spec.rounds[0]
    k = len(spec.outer.checks[0])
    eps_i = spec.eps_input
    att = _attempt_classes(r.inner, _check_eps(spec, 0), 0)
    w_even = (1.0 + (1.0 - 2 * eps_i) ** k) / 2.0
    w_odd = 1.0 - w_even
    clean_inputs = (1.0 - eps_i) ** k
    acceptance = w_even * att.pass_clean + w_odd * att.pass_flip
    eps_out = (
        (w_even - clean_inputs) * att.pass_clean   # surviving even input pattern
        + w_odd * att.pass_flip                    # odd pattern hidden by a flip
        + clean_inputs * att.silent_logical        # logical corrupts clean inputs
    )
    n_out_bar = acceptance * k
    return ExactReference(acceptance, n_out_bar, eps_out)


def _exact_grid_m1(spec: ProtocolSpec) -> ExactReference:
    outer = spec.outer
    eps_i = spec.eps_input
    n = outer.n_out
    n_check = outer.n_check
    stats = [_attempt_classes(r.inner, r.eps_check, 1) for r in spec.rounds]
    lonely = outer_mod.lonely_checks(outer)
    lonely_rounds = {outer.round_of_check[ci] for ci in lonely}
    # per-check absorbing pass probability, in schedule order
    pc_all = 1.0
    for ri, rnd in enumerate(outer.schedule):
        pc_all *= stats[ri].pc ** len(rnd)

    ratio = eps_i / (1.0 - eps_i)
    kernel_terms = [(u, zero_violation_count(outer, u)) for u in (4, 6)]
    k_even = (1.0 - eps_i) ** n * (1.0 + sum(cnt * ratio ** u for u, cnt in kernel_terms))
    acceptance = k_even * pc_all

    # lonely-round repeat probability governs the lower-quality discards
    (lonely_ri,) = lonely_rounds
    r_lonely = stats[lonely_ri].repeat
    k_lonely = spec.rounds[lonely_ri].inner.k
    n_out_bar = acceptance * (n - len(lonely) * r_lonely * k_lonely)

    # C1: surviving input patterns; all checks pass, not every touched lonely
    # line may have been corrected (corrected lonely lines discard their qubits)
    c1 = 0.0
    for u, cnt in kernel_terms:
        touched = u // 2  # kernel patterns touch u/2 distinct lonely lines
        c1 += cnt * eps_i ** u * (1 - eps_i) ** (n - u) * pc_all * (1.0 - r_lonely ** touched)
    # C2: one input error hidden by flipped measurements in both of its checks;
    # the lonely-round check must pass on its first attempt or the qubit is
    # discarded along with its error
    other_ri = 1 - lonely_ri
    flip_other = stats[other_ri].pf
    flip_lonely = stats[lonely_ri].pass_flip
    rest = pc_all / (stats[other_ri].pc * stats[lonely_ri].pc)
    c2 = n * eps_i * (1 - eps_i) ** (n - 1) * flip_other * flip_lonely * rest
    # C3: silent logical inside a lonely check on otherwise clean inputs
    c3 = (len(lonely) * (1 - eps_i) ** n * stats[lonely_ri].silent_logical
          * pc_all / stats[lonely_ri].pc)
    return ExactReference(acceptance, n_out_bar, c1 + c2 + c3)


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class CompareRow:
    quantity: str
    empirical: float
    sigma: float
    analytic: float
    deviation_sigmas: float
    agrees: bool


@dataclass(frozen=True)
class CompareReport:
    spec_name: str
    trials: int
    seed: int
    rows: Tuple[CompareRow, ...]
    analytic_mode: str

    @property
    def all_agree(self) -> bool:
        return all(row.agrees for row in self.rows)


def _binomial_row(name: str, hits: int, trials: int, analytic: float) -> CompareRow:
    p_hat = hits / trials
    sigma = math.sqrt(max(p_hat * (1 - p_hat), analytic * (1 - analytic)) / trials)
    if sigma == 0:
        sigma = math.sqrt(max(analytic, 1.0 / trials) / trials)
    dev = abs(p_hat - analytic) / sigma
    return CompareRow(name, p_hat, sigma, analytic, dev, dev <= 3.0)


def compare(spec: ProtocolSpec, trials: int, seed: int, threads: int = 1) -> CompareReport:
    """Simulate and compare against the analytic model, flagging >3 sigma gaps."""
    summary = simulate_protocol(spec, trials, seed, threads=threads)
    try:
        ref = exact_reference(spec)
        mode = "exact"
        acceptance, n_out_bar, eps_out = ref.acceptance, ref.n_out_bar, ref.eps_out
    except UnsupportedProtocol:
        rep = analyze(spec)
        mode = "leading-order"
        acceptance, n_out_bar, eps_out = rep.acceptance, rep.n_out_bar, rep.eps_out
    rows = [
        _binomial_row("acceptance", summary.accepted, trials, acceptance),
        _binomial_row("eps_out", summary.output_errors, trials, eps_out),
    ]
    mean_states = summary.output_states / trials
    sigma_states = spec.outer.n_out * math.sqrt(max(acceptance * (1 - acceptance), 1e-12) / trials)
    dev = abs(mean_states - n_out_bar) / sigma_states
    rows.append(CompareRow("n_out_bar", mean_states, sigma_states, n_out_bar, dev, dev <= 3.0))
    return CompareReport(spec.name, trials, seed, tuple(rows), mode)
