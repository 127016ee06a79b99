"""Iterative GCD/shift reduction of a rational phase set down to {0}.

Each iteration divides the common factor out of the working numerators,
shifts the odd quotients onto even ones with the most effective odd
offset, and folds the result back into the current modular range.  One
circuit line is emitted per iteration; an iteration whose quotients are
all odd is flagged as a phantom line (it would always measure 1).

A reduction that does not finish within floor(log2 h) + 1 iterations, or
whose finished trace fails the exact replay check, falls back to the
binary default ladder, which distinguishes every integer numerator up to
h unconditionally.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .exactmath import PhaseSet, gcd_set

__all__ = [
    "ReductionStage",
    "ReductionTrace",
    "default_ladder",
    "mode_difference",
    "qubit_bounds",
    "reduce",
    "reduce_phase_set",
    "replay_numerator",
    "stage_modulus",
    "trace_from_json_dict",
    "trace_to_json_dict",
]


@dataclass(frozen=True)
class ReductionStage:
    """One reduction iteration, mapping the set S_i to S_{i+1}.

    Attributes:
        values: working numerators S_i entering the iteration.
        gcd: common factor G_i divided out of every element.
        quotients: Q_i = S_i / G_i.
        add: odd shift A_i applied to the odd quotients.
        modulus: range [0, M) the shifted set is folded into; M is the
            smallest positive integer whose accumulated phase is a full
            turn, so folding never changes any measurement.
        phantom: True when Q_i contains no even member.  The matching
            circuit line measures 1 for every hypothesis and can be
            removed from the circuit afterwards.
    """

    values: tuple
    gcd: int
    quotients: tuple
    add: int
    modulus: int
    phantom: bool


@dataclass(frozen=True)
class ReductionTrace:
    """Complete record of a reduction run."""

    phase_set: PhaseSet
    stages: tuple
    final_values: tuple
    fallback_used: bool

    @property
    def n_lines(self) -> int:
        return len(self.stages)

    @property
    def gcds(self) -> tuple:
        return tuple(s.gcd for s in self.stages)

    @property
    def adds(self) -> tuple:
        return tuple(s.add for s in self.stages)

    @property
    def moduli(self) -> tuple:
        return tuple(s.modulus for s in self.stages)

    @property
    def phantom_flags(self) -> tuple:
        return tuple(s.phantom for s in self.stages)

    @property
    def gcd_products(self) -> tuple:
        """Cumulative products P_i = G_0 * ... * G_i."""
        return tuple(itertools.accumulate(self.gcds, lambda a, b: a * b))


def stage_modulus(denominator: int, gcd_product: int) -> int:
    """Smallest M > 0 with M * gcd_product * pi / denominator = 0 mod 2*pi."""
    d = int(denominator)
    p = int(gcd_product)
    if d < 1:
        raise ValueError("stage_modulus: denominator must be >= 1")
    if p < 1:
        raise ValueError("stage_modulus: gcd product must be >= 1")
    two_d = 2 * d
    return two_d // math.gcd(two_d, p)


def mode_difference(values: Iterable[int], modulus: Optional[int] = None) -> int:
    """Most effective odd shift for merging odd quotients onto even ones.

    Counts even-minus-odd differences over all pairs; when ``modulus`` is
    given, differences that agree modulo it are counted together, because
    shifts equal mod the stage modulus merge the same elements.  Returns
    the raw difference from the winning class; ties break to the smallest
    absolute value, then to the negative sign.  A set without even members
    has nothing to merge onto, so the negated minimum is returned instead.
    """
    vals = sorted({int(v) for v in values})
    if not vals:
        raise ValueError("mode_difference: empty set")
    evens = [v for v in vals if v % 2 == 0]
    odds = [v for v in vals if v % 2 == 1]
    if not odds:
        raise ValueError("mode_difference: all values even; divide by the GCD first")
    if not evens:
        return -min(vals)

    def key(diff: int):
        return diff % modulus if modulus else diff

    counts = Counter(key(e - o) for e in evens for o in odds)
    best = max(counts.values())
    candidates = [e - o for e in evens for o in odds if counts[key(e - o)] == best]
    return min(candidates, key=lambda v: (abs(v), v > 0))


def replay_numerator(trace: ReductionTrace, numerator: int) -> Tuple[tuple, int]:
    """Push one numerator through the trace, collecting the measured bits.

    Returns (bits, final_value).  For a valid trace and an in-set
    numerator the final value is 0 and the bits are the deterministic
    measurement results of the synthesized circuit.
    """
    s = int(numerator)
    bits: List[int] = []
    for st in trace.stages:
        if s % st.gcd:
            raise ValueError(
                f"replay_numerator: {numerator} does not follow the trace "
                f"(value {s} not divisible by {st.gcd})"
            )
        w = s // st.gcd
        b = w % 2
        bits.append(b)
        s = (w + b * st.add) % st.modulus
    return tuple(bits), s


def _trace_is_exact(trace: ReductionTrace) -> bool:
    """Exact check that the trace realizes a perfectly distinguishing circuit.

    Verifies three facts for every hypothesis x: the line phases x/P_i plus
    the accumulated shifts are integers whose parities are the replayed
    bits (so every measurement is deterministic), the weighted bit values
    reproduce x/d mod 2 (so estimation is exact), and the measured strings
    are pairwise distinct.
    """
    ps = trace.phase_set
    d = ps.denominator
    products = trace.gcd_products
    adds = trace.adds
    flags = trace.phantom_flags
    n = trace.n_lines
    seen = set()
    for x in ps.numerators:
        try:
            bits, final = replay_numerator(trace, x)
        except ValueError:
            return False
        if final != 0:
            return False
        shift = 0
        for i in range(n):
            num = x + shift
            if num % products[i] != 0:
                return False
            if (num // products[i]) % 2 != bits[i]:
                return False
            shift += bits[i] * adds[i] * products[i]
        if any(b != 1 for b, f in zip(bits, flags) if f):
            return False
        est = sum(
            bits[i] * Fraction(-adds[i] * products[i], d) for i in range(n)
        ) % 2
        if est != Fraction(x, d) % 2:
            return False
        measured = tuple(b for b, f in zip(bits, flags) if not f)
        if measured in seen:
            return False
        seen.add(measured)
    return True


def reduce_phase_set(phases: PhaseSet) -> ReductionTrace:
    """Reduce a phase set to {0}, emitting one stage per circuit line.

    A single-hypothesis set needs no measurement and yields an empty
    trace.  Otherwise the iteration runs for at most floor(log2 h) + 1
    stages; if it has not terminated by then, or the finished trace fails
    the exact replay check, the binary default ladder is returned with
    ``fallback_used`` set.
    """
    if phases.m == 1:
        return ReductionTrace(phases, (), phases.numerators, False)

    d = phases.denominator
    budget = phases.h.bit_length()  # == floor(log2 h) + 1, h >= 1 here
    stages: List[ReductionStage] = []
    current = list(phases.numerators)
    product = 1
    terminated = False
    try:
        while len(stages) < budget:
            g = gcd_set(current)
            quotients = sorted(v // g for v in current)
            product *= g
            modulus = stage_modulus(d, product)
            phantom = all(q % 2 == 1 for q in quotients)
            if phantom:
                add = -min(quotients)
            else:
                add = mode_difference(quotients, modulus=modulus)
            stages.append(
                ReductionStage(
                    tuple(current), g, tuple(quotients), add, modulus, phantom
                )
            )
            current = sorted(
                {(q + add) % modulus if q % 2 else q % modulus for q in quotients}
            )
            if current == [0]:
                terminated = True
                break
    except ValueError:
        terminated = False

    if terminated:
        trace = ReductionTrace(phases, tuple(stages), (0,), False)
        if _trace_is_exact(trace):
            return trace
    return default_ladder(phases)


# spec-facing alias: the operation is simply called "reduce"
reduce = reduce_phase_set


def default_ladder(phases: PhaseSet) -> ReductionTrace:
    """Binary fallback trace: G = [1, 2, 2, ...], A = [-1, ...].

    Uses n = floor(log2 h) + 1 lines and distinguishes every integer
    numerator in [0, 2**n), so it works for any input set at the price of
    ignoring its structure.  The stage sets record the replay of the
    actual input numerators through the forced parameters.
    """
    d = phases.denominator
    h = phases.h
    if h == 0:
        # the singleton {0}: nothing to distinguish
        return ReductionTrace(phases, (), phases.numerators, True)
    n = h.bit_length()
    stages: List[ReductionStage] = []
    current = list(phases.numerators)
    product = 1
    for i in range(n):
        g = 1 if i == 0 else 2
        if any(v % g for v in current):
            raise RuntimeError("default_ladder: inexact division; invariant broken")
        quotients = sorted(v // g for v in current)
        product *= g
        modulus = stage_modulus(d, product)
        phantom = all(q % 2 == 1 for q in quotients)
        stages.append(
            ReductionStage(tuple(current), g, tuple(quotients), -1, modulus, phantom)
        )
        current = sorted({(q - 1) % modulus if q % 2 else q % modulus for q in quotients})
    if current != [0]:
        raise RuntimeError("default_ladder: did not terminate at {0}; invariant broken")
    return ReductionTrace(phases, tuple(stages), (0,), True)


def qubit_bounds(m: int, h: int) -> Tuple[int, int]:
    """Lower and upper bounds on the line count: (ceil(log2 m), min(m-1, floor(log2 h)+1)).

    The lower bound is information-theoretic.  The upper bound is reported
    for diagnostics only; phantom iterations can push a trace past m - 1,
    so callers must not enforce it.
    """
    m = int(m)
    h = int(h)
    if m < 1:
        raise ValueError("qubit_bounds: m must be >= 1")
    if h < 1:
        raise ValueError("qubit_bounds: h must be >= 1")
    lower = (m - 1).bit_length()
    upper = min(m - 1, h.bit_length())
    return lower, upper


def trace_to_json_dict(trace: ReductionTrace) -> Dict:
    """JSON form of a trace; integers rendered as decimal strings."""
    sets = [[str(v) for v in st.values] for st in trace.stages]
    sets.append([str(v) for v in trace.final_values])
    return {
        "denominator": str(trace.phase_set.denominator),
        "sets": sets,
        "gcds": [str(s.gcd) for s in trace.stages],
        "adds": [str(s.add) for s in trace.stages],
        "moduli": [str(s.modulus) for s in trace.stages],
        "phantoms": [s.phantom for s in trace.stages],
        "fallback_used": trace.fallback_used,
    }


def trace_from_json_dict(doc: Dict) -> ReductionTrace:
    d = int(doc["denominator"])
    sets = [[int(v) for v in row] for row in doc["sets"]]
    gcds = [int(v) for v in doc["gcds"]]
    adds = [int(v) for v in doc["adds"]]
    moduli = [int(v) for v in doc["moduli"]]
    phantoms = list(doc["phantoms"])
    if len(sets) != len(gcds) + 1:
        raise ValueError("trace JSON: sets must have one more entry than gcds")
    phase_set = PhaseSet(d, tuple(sets[0]))
    stages = tuple(
        ReductionStage(
            tuple(sets[i]),
            gcds[i],
            tuple(sorted(v // gcds[i] for v in sets[i])),
            adds[i],
            moduli[i],
            bool(phantoms[i]),
        )
        for i in range(len(gcds))
    )
    return ReductionTrace(phase_set, stages, tuple(sets[-1]), bool(doc["fallback_used"]))
