import math
import random
from fractions import Fraction

import pytest

from rqpe.exactmath import (
    PhaseSet,
    format_rational,
    gcd_set,
    normalize_phase_set,
    parse_rational,
    rational_from_float,
)


def test_gcd_set_examples():
    assert gcd_set({21, 22, 64, 65, 107, 108}) == 1
    assert gcd_set({0, 5}) == 5
    assert gcd_set({66, 93, 108, 123, 138}) == 3
    assert gcd_set([7]) == 7


def test_gcd_set_rejects_bad_input():
    with pytest.raises(ValueError):
        gcd_set([])
    with pytest.raises(ValueError):
        gcd_set([0, 0])
    with pytest.raises(ValueError):
        gcd_set([-3, 6])


def test_gcd_set_divides_every_element():
    rng = random.Random(7)
    for _ in range(50):
        vals = [rng.randrange(0, 1024) for _ in range(rng.randrange(1, 9))]
        if not any(vals):
            vals[0] = 1
        g = gcd_set(vals)
        assert all(v % g == 0 for v in vals)
        assert gcd_set(v // g for v in vals if v) == 1 or all(v == 0 for v in vals)


@pytest.mark.parametrize(
    "value,tol,expected",
    [
        (0.5, 1e-9, Fraction(1, 2)),
        (0.328125, 1e-9, Fraction(21, 64)),
        (0.042857142857, 1e-9, Fraction(3, 70)),
        (1.0, 1e-9, Fraction(1)),
        (0.333, 1e-3, Fraction(1, 3)),
        (-0.671875, 1e-9, Fraction(-43, 64)),
    ],
)
def test_rational_from_float_examples(value, tol, expected):
    assert rational_from_float(value, tol) == expected


def test_rational_from_float_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        rational_from_float(0.5, 0.0)
    with pytest.raises(ValueError):
        rational_from_float(0.5, -1e-9)
    with pytest.raises(ValueError):
        rational_from_float(float("nan"), 1e-9)


def test_rational_from_float_round_trip():
    """float(p/q) recovers p/q at tol 1e-12 for q up to 10**4."""
    rng = random.Random(2024)
    for _ in range(300):
        q = rng.randrange(1, 10**4 + 1)
        p = rng.randrange(-2 * q, 2 * q + 1)
        frac = Fraction(p, q)
        assert rational_from_float(float(frac), 1e-12) == frac


def test_rational_from_float_result_is_within_tolerance():
    rng = random.Random(99)
    for _ in range(200):
        x = rng.uniform(-2.0, 2.0)
        tol = 10.0 ** rng.uniform(-9, -2)
        r = rational_from_float(x, tol)
        assert abs(x - r.numerator / r.denominator) <= tol


def test_normalize_phase_set_worked_example():
    phases = [
        Fraction(21, 64),
        Fraction(22, 64),
        Fraction(1),
        Fraction(65, 64),
        Fraction(107, 64),
        Fraction(108, 64),
    ]
    ps = normalize_phase_set(phases)
    assert ps.denominator == 64
    assert ps.numerators == (21, 22, 64, 65, 107, 108)
    assert ps.h == 108
    assert ps.m == 6


def test_normalize_phase_set_small_examples():
    ps = normalize_phase_set([Fraction(0), Fraction(1, 7)])
    assert (ps.denominator, ps.numerators) == (7, (0, 1))
    # values are reduced mod 2 (the phase circle) before normalizing
    ps = normalize_phase_set([Fraction(5, 2)])
    assert (ps.denominator, ps.numerators) == (2, (1,))
    ps = normalize_phase_set([Fraction(-1, 4)])
    assert (ps.denominator, ps.numerators) == (4, (7,))


def test_normalize_phase_set_merges_duplicates():
    ps = normalize_phase_set([Fraction(1, 2), Fraction(5, 2), Fraction(1, 3)])
    assert ps.denominator == 6
    assert ps.numerators == (2, 3)


def test_normalize_phase_set_rejects_empty():
    with pytest.raises(ValueError):
        normalize_phase_set([])


def test_phase_set_validation():
    with pytest.raises(ValueError):
        PhaseSet(0, (0,))
    with pytest.raises(ValueError):
        PhaseSet(4, ())
    with pytest.raises(ValueError):
        PhaseSet(4, (0, 8))  # numerators live in [0, 2d)
    with pytest.raises(ValueError):
        PhaseSet(4, (3, 1))  # must be sorted ascending
    with pytest.raises(ValueError):
        PhaseSet(4, (1, 1, 2))  # duplicates


def test_phase_set_phases_pi():
    ps = PhaseSet(4, (0, 1, 6))
    assert ps.phases_pi() == [Fraction(0), Fraction(1, 4), Fraction(3, 2)]


@pytest.mark.parametrize(
    "value,text",
    [
        (Fraction(21, 64), "21/64"),
        (Fraction(-43, 64), "-43/64"),
        (Fraction(3), "3"),
        (Fraction(0), "0"),
        (Fraction(70, 72), "35/36"),
    ],
)
def test_format_rational(value, text):
    assert format_rational(value) == text


def test_parse_rational_round_trip():
    for f in [Fraction(21, 64), Fraction(-5, 12), Fraction(7), Fraction(0)]:
        assert parse_rational(format_rational(f)) == f
    assert parse_rational("0.25") == Fraction(1, 4)
    with pytest.raises(ValueError):
        parse_rational("one half")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_parse_rational_accepts_whitespace():
    assert parse_rational(" 3/70 ") == Fraction(3, 70)


def test_round_trip_matches_math_isclose():
    # serialization helpers never lose exactness
    rng = random.Random(5)
    for _ in range(100):
        f = Fraction(rng.randrange(-500, 500), rng.randrange(1, 500))
        g = parse_rational(format_rational(f))
        assert g == f
        assert math.isclose(float(g), float(f), rel_tol=0, abs_tol=0)
