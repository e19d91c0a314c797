import math
from fractions import Fraction

import pytest

from memsplate.intervals import (Interval, down, frac_bounds, pow_bounds,
                                 prove_nonneg, up)


def test_directed_rounding():
    x = 1.0
    assert down(x) < x < up(x)
    assert up(down(x)) == x


def test_frac_bounds_encloses():
    for c in (Fraction(1, 3), Fraction(-22, 7), Fraction(5, 8), 0.1):
        lo, hi = frac_bounds(c)
        assert lo <= float(Fraction(c)) <= hi
        assert Fraction(lo) <= Fraction(c) <= Fraction(hi)
    # exact dyadics are tight
    assert frac_bounds(Fraction(3, 4)) == (0.75, 0.75)


def test_pow_bounds_encloses():
    import random
    rnd = random.Random(1)
    for _ in range(200):
        x = rnd.uniform(1e-8, 1.0)
        p = Fraction(rnd.randint(-12, 12), rnd.randint(1, 9))
        lo, hi = pow_bounds(x, p)
        v = x ** float(p)
        assert lo <= v <= hi
        assert (hi - lo) <= 1e-9 * max(abs(v), 1e-300) + 1e-300 or hi - lo < abs(v) * 1e-6


def test_pow_bounds_zero_edge():
    assert pow_bounds(0.0, Fraction(2)) == (0.0, 0.0)
    assert pow_bounds(0.0, Fraction(0)) == (1.0, 1.0)
    assert pow_bounds(0.0, Fraction(-1)) == (math.inf, math.inf)


def test_interval_arithmetic_encloses():
    a = Interval(1.0, 2.0)
    b = Interval(-3.0, 0.5)
    s = a + b
    assert s.lo <= -2.0 and s.hi >= 2.5
    p = a * b
    assert p.lo <= -6.0 and p.hi >= 1.0
    d = a / Interval(2.0, 4.0)
    assert d.lo <= 0.25 and d.hi >= 1.0


def test_interval_division_through_zero():
    d = Interval(1.0, 1.0) / Interval(-1.0, 1.0)
    assert d.lo == -math.inf and d.hi == math.inf
    with pytest.raises(ZeroDivisionError):
        Interval(1.0, 1.0) / Interval(0.0, 0.0)


def test_interval_invalid():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


def test_prove_nonneg_simple():
    # x*(1-x) + 1/100 is strictly positive on [0, 1]
    g = lambda a, b: Interval(a, b) * (Interval(1.0, 1.0) - Interval(a, b)) + Interval(0.01, 0.01)
    rep = prove_nonneg(g, 0.0, 1.0)
    assert rep.proved


def test_prove_nonneg_counterexample():
    g = lambda a, b: Interval(a, b) - 0.5  # x - 0.5 < 0 on [0, 0.5)
    rep = prove_nonneg(g, 0.0, 1.0)
    assert not rep.proved
    assert rep.counterexample is not None and rep.counterexample < 0.5


def test_prove_nonneg_box_budget():
    # a claim that is true but needs many boxes near the root
    g = lambda a, b: Interval(a, b) * Interval(a, b)  # x^2 >= 0 but enclosure loose
    rep = prove_nonneg(g, -1.0, 1.0, max_boxes=10_000)
    assert rep.boxes <= 10_001
