"""Circuit synthesis from a reduction trace, and circuit-level transforms.

A circuit is a list of interferometer lines, one per reduction iteration.
Line j applies, in order: a Hadamard, the phase unitary U^u with
u = d / (G_0 ... G_j), one controlled-Z rotation per earlier line with
exponent A_k / (G_{k+1} ... G_j), optionally plain Z rotations inherited
from removed phantom lines, and a closing Hadamard before measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exactmath import format_rational, gcd_set, parse_rational
from .reduction import ReductionTrace

__all__ = [
    "Circuit",
    "CircuitLine",
    "CzTerm",
    "build_circuit",
    "circuit_from_bit_values",
    "circuit_from_json_dict",
    "circuit_from_parameters",
    "circuit_to_json_dict",
    "estimate_theta",
    "remove_phantoms",
    "rqpe_gate_matrix",
    "to_qasm3",
    "unitary_count",
]

MAX_MATRIX_LINES = 12


@dataclass(frozen=True)
class CzTerm:
    """A controlled-Z rotation: Z^exponent on the line, controlled by `control`.

    `control` is the original index of the controlling line, stable across
    phantom removal.  The exponent is in units of pi.
    """

    control: int
    exponent: Fraction


@dataclass(frozen=True)
class CircuitLine:
    index: int
    u: Fraction
    cz: tuple
    z: tuple
    phantom: bool


@dataclass(frozen=True)
class Circuit:
    """An interferometer circuit plus the synthesis parameters behind it.

    `gcds`, `adds` and `bit_values_pi` always cover every reduction
    iteration, even after phantom lines have been dropped from `lines`;
    missing line indices identify the removed phantoms.
    """

    denominator: int
    gcds: tuple
    adds: tuple
    phase_numerators: tuple
    lines: tuple
    bit_values_pi: tuple

    def __post_init__(self):
        d = int(self.denominator)
        if d < 1:
            raise ValueError("Circuit: denominator must be >= 1")
        gcds = tuple(int(g) for g in self.gcds)
        adds = tuple(int(a) for a in self.adds)
        bits = tuple(Fraction(b) for b in self.bit_values_pi)
        nums = tuple(int(x) for x in self.phase_numerators)
        if not (len(gcds) == len(adds) == len(bits)):
            raise ValueError("Circuit: gcds, adds and bit values must align")
        if any(g < 1 for g in gcds):
            raise ValueError("Circuit: gcds must be positive")
        lines = tuple(self.lines)
        indices = [line.index for line in lines]
        if indices != sorted(set(indices)):
            raise ValueError("Circuit: line indices must be strictly increasing")
        present = set(indices)
        for line in lines:
            if not 0 <= line.index < len(gcds):
                raise ValueError("Circuit: line index out of range")
            if line.u <= 0:
                raise ValueError("Circuit: unitary exponents must be positive")
            for term in line.cz:
                if term.control >= line.index:
                    raise ValueError("Circuit: controls must reference earlier lines")
                if term.control not in present:
                    raise ValueError("Circuit: control references a missing line")
        object.__setattr__(self, "denominator", d)
        object.__setattr__(self, "gcds", gcds)
        object.__setattr__(self, "adds", adds)
        object.__setattr__(self, "phase_numerators", nums)
        object.__setattr__(self, "lines", lines)
        object.__setattr__(self, "bit_values_pi", bits)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def iterations(self) -> int:
        return len(self.gcds)

    @property
    def phantoms_removed(self) -> bool:
        return len(self.lines) < len(self.gcds)

    @property
    def phantom_indices(self) -> tuple:
        """Original indices of phantom lines, present or removed."""
        present = {line.index for line in self.lines}
        missing = set(range(self.iterations)) - present
        flagged = {line.index for line in self.lines if line.phantom}
        return tuple(sorted(missing | flagged))

    def position_of(self, original_index: int) -> int:
        for pos, line in enumerate(self.lines):
            if line.index == original_index:
                return pos
        raise KeyError(f"no line with original index {original_index}")


def circuit_from_parameters(
    denominator: int,
    gcds: Sequence[int],
    adds: Sequence[int],
    phase_numerators: Sequence[int] = (),
    phantoms: Optional[Sequence[bool]] = None,
) -> Circuit:
    """Assemble a circuit directly from reduction parameters (G, A)."""
    gcds = [int(g) for g in gcds]
    adds = [int(a) for a in adds]
    if len(gcds) != len(adds):
        raise ValueError("circuit_from_parameters: G and A must have equal length")
    if phantoms is None:
        phantoms = [False] * len(gcds)
    products: List[int] = []
    p = 1
    for g in gcds:
        p *= g
        products.append(p)
    d = int(denominator)
    lines = []
    for j in range(len(gcds)):
        u = Fraction(d, products[j])
        cz = tuple(
            CzTerm(k, Fraction(adds[k] * products[k], products[j])) for k in range(j)
        )
        lines.append(CircuitLine(j, u, cz, (), bool(phantoms[j])))
    bit_values = tuple(Fraction(-adds[j] * products[j], d) for j in range(len(gcds)))
    return Circuit(d, tuple(gcds), tuple(adds), tuple(phase_numerators), tuple(lines), bit_values)


def build_circuit(trace: ReductionTrace) -> Circuit:
    """Synthesize the circuit for a reduction trace (phantom lines retained)."""
    return circuit_from_parameters(
        trace.phase_set.denominator,
        trace.gcds,
        trace.adds,
        phase_numerators=trace.phase_set.numerators,
        phantoms=trace.phantom_flags,
    )


def remove_phantoms(circuit: Circuit) -> Circuit:
    """Drop phantom lines, folding their controls into plain Z rotations.

    A phantom line measures 1 on every hypothesis, so a rotation it
    controls can be applied unconditionally on the target line.
    """
    phantom_idx = {line.index for line in circuit.lines if line.phantom}
    if not phantom_idx:
        return circuit
    new_lines = []
    for line in circuit.lines:
        if line.phantom:
            continue
        kept = tuple(t for t in line.cz if t.control not in phantom_idx)
        inherited = tuple(t.exponent for t in line.cz if t.control in phantom_idx)
        new_lines.append(
            CircuitLine(line.index, line.u, kept, line.z + inherited, False)
        )
    return Circuit(
        circuit.denominator,
        circuit.gcds,
        circuit.adds,
        circuit.phase_numerators,
        tuple(new_lines),
        circuit.bit_values_pi,
    )


def bit_values(circuit: Circuit) -> List[Fraction]:
    """Per-line phase contributions (units of pi): b_j = -A_j G_0...G_j / d."""
    return list(circuit.bit_values_pi)


def estimate_theta(circuit: Circuit, bits: str) -> Fraction:
    """Phase estimate (units of pi, in [0, 2)) for one measured bitstring.

    The string covers the circuit's lines in order.  Phantom lines always
    contribute their bit value: removed ones are added automatically and
    retained ones are forced to 1 regardless of the supplied bit.
    """
    if len(bits) != len(circuit.lines):
        raise ValueError(
            f"estimate_theta: expected {len(circuit.lines)} bits, got {len(bits)}"
        )
    if any(c not in "01" for c in bits):
        raise ValueError("estimate_theta: bitstring must contain only 0 and 1")
    est = Fraction(0)
    present = set()
    for line, c in zip(circuit.lines, bits):
        present.add(line.index)
        b = 1 if line.phantom else int(c)
        est += b * circuit.bit_values_pi[line.index]
    for idx in range(circuit.iterations):
        if idx not in present:
            est += circuit.bit_values_pi[idx]
    return est % 2


def circuit_from_bit_values(values: Sequence) -> Tuple[List[int], List[int]]:
    """Recover the synthesis parameters (G, A) from per-line bit values.

    Valid inputs satisfy: every shift A_i is odd and every gcd after the
    first is even; otherwise no reduction produces these bit values and a
    ValueError is raised.
    """
    fracs = [Fraction(v) for v in values]
    if not fracs:
        raise ValueError("circuit_from_bit_values: empty input")
    if any(f == 0 for f in fracs):
        raise ValueError("circuit_from_bit_values: bit values must be nonzero")
    d = 1
    for f in fracs:
        d = math.lcm(d, f.denominator)
    nums = [int(f * d) for f in fracs]
    gcds: List[int] = []
    adds: List[int] = []
    product = 1
    for i in range(len(nums)):
        tail = nums[i:]
        if any(x % product for x in tail):
            raise ValueError(
                "circuit_from_bit_values: values not realizable (inexact division)"
            )
        reduced = [abs(x) // product for x in tail]
        g = gcd_set(reduced)
        if i > 0 and g % 2:
            raise ValueError(
                f"circuit_from_bit_values: gcd G_{i} = {g} must be even"
            )
        a = -(nums[i] // (product * g))
        if a % 2 == 0:
            raise ValueError(
                f"circuit_from_bit_values: shift A_{i} = {a} is even; not realizable"
            )
        gcds.append(g)
        adds.append(a)
        product *= g
    return gcds, adds


def unitary_count(circuit: Circuit) -> Fraction:
    """Total applications of the phase unitary across the circuit's lines."""
    return sum((line.u for line in circuit.lines), Fraction(0))


_QUARTER_PHASES = {0: 1.0 + 0.0j, 1: 1.0j, 2: -1.0 + 0.0j, 3: -1.0j}


def rqpe_gate_matrix(circuit: Circuit, bit_reversed: bool = True) -> np.ndarray:
    """Dense gate matrix of the measurement transform.

    Entry (k, j) is 2^(-n/2) exp[i (b.j)(u~.k)] with b the bit values, and
    u~ the unitary exponents in bit-reversed order (the printed appendix
    convention).  With ``bit_reversed=False`` the exponents are taken in
    circuit order instead; that variant, applied as its conjugate
    transpose to the post-encoding product state, reproduces the
    simulator's joint outcome distribution.

    Phases are accumulated exactly as integers over a common denominator;
    entries that land on quarter turns are exact complex units.
    """
    lines = circuit.lines
    if any(line.z for line in lines):
        raise ValueError("rqpe_gate_matrix: phantoms must be retained (found plain Z terms)")
    n = len(lines)
    if n == 0:
        raise ValueError("rqpe_gate_matrix: empty circuit")
    if n > MAX_MATRIX_LINES:
        raise ValueError(f"rqpe_gate_matrix: {n} lines exceed the {MAX_MATRIX_LINES}-line cap")
    b = [circuit.bit_values_pi[line.index] for line in lines]
    u = [line.u for line in lines]
    uu = u[::-1] if bit_reversed else u
    bden = math.lcm(*[f.denominator for f in b])
    uden = math.lcm(*[f.denominator for f in uu])
    bnum = [int(f * bden) for f in b]
    unum = [int(f * uden) for f in uu]
    denom = bden * uden
    two_denom = 2 * denom

    dim = 1 << n
    mat = np.empty((dim, dim), dtype=complex)
    row = np.empty(dim, dtype=complex)
    for k in range(dim):
        ku = sum(unum[i] for i in range(n) if (k >> i) & 1)
        row[:1] = 1.0
        size = 1
        for i in range(n):
            num = (ku * bnum[i]) % two_denom
            if (2 * num) % denom == 0:
                w = _QUARTER_PHASES[(2 * num) // denom]
            else:
                w = complex(math.cos(math.pi * num / denom), math.sin(math.pi * num / denom))
            row[size : 2 * size] = row[:size] * w
            size *= 2
        mat[k] = row
    return mat / math.sqrt(2.0) ** n


def circuit_to_json_dict(circuit: Circuit) -> Dict:
    """Normative JSON form: integers as decimal strings, rationals as p/q."""
    return {
        "denominator": str(circuit.denominator),
        "gcds": [str(g) for g in circuit.gcds],
        "adds": [str(a) for a in circuit.adds],
        "phase_numerators": [str(x) for x in circuit.phase_numerators],
        "lines": [
            {
                "index": line.index,
                "u": format_rational(line.u),
                "phantom": line.phantom,
                "cz": [
                    {"control": t.control, "exponent": format_rational(t.exponent)}
                    for t in line.cz
                ],
                "z": [format_rational(z) for z in line.z],
            }
            for line in circuit.lines
        ],
        "bit_values_pi": [format_rational(b) for b in circuit.bit_values_pi],
    }


def circuit_from_json_dict(doc: Dict) -> Circuit:
    lines = tuple(
        CircuitLine(
            int(entry["index"]),
            parse_rational(entry["u"]),
            tuple(
                CzTerm(int(t["control"]), parse_rational(t["exponent"]))
                for t in entry["cz"]
            ),
            tuple(parse_rational(z) for z in entry["z"]),
            bool(entry["phantom"]),
        )
        for entry in doc["lines"]
    )
    return Circuit(
        int(doc["denominator"]),
        tuple(int(g) for g in doc["gcds"]),
        tuple(int(a) for a in doc["adds"]),
        tuple(int(x) for x in doc["phase_numerators"]),
        lines,
        tuple(parse_rational(b) for b in doc["bit_values_pi"]),
    )


def _qasm_const(f: Fraction) -> str:
    if f.denominator == 1 and f.numerator >= 0:
        return str(f.numerator)
    return f"({format_rational(f)})"


def to_qasm3(circuit: Circuit) -> str:
    """OpenQASM 3 text for the circuit, with theta as an input parameter.

    U^u maps to rz(u * theta); controlled and plain Z rotations map to the
    phase gate p() with explicit pi factors.
    """
    n = len(circuit.lines)
    positions = {line.index: pos for pos, line in enumerate(circuit.lines)}
    out = [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        "",
        f"// reductive phase estimation circuit: {n} lines, d = {circuit.denominator}",
        "input float[64] theta;",
        f"qubit[{n}] q;",
        f"bit[{n}] c;",
    ]
    for pos, line in enumerate(circuit.lines):
        out.append("")
        out.append(f"// line {line.index}: u = {format_rational(line.u)}")
        out.append(f"h q[{pos}];")
        out.append(f"rz({_qasm_const(line.u)} * theta) q[{pos}];")
        for term in line.cz:
            cpos = positions[term.control]
            out.append(f"ctrl @ p(pi * {_qasm_const(term.exponent)}) q[{cpos}], q[{pos}];")
        for z in line.z:
            out.append(f"p(pi * {_qasm_const(z)}) q[{pos}];")
        out.append(f"h q[{pos}];")
    out.append("")
    for pos in range(n):
        out.append(f"c[{pos}] = measure q[{pos}];")
    return "\n".join(out) + "\n"
