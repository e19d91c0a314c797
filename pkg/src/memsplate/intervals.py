"""Outward-rounded interval arithmetic and adaptive positivity proving.

The "interval" rigor tier of the certificate checks runs on this engine.
Bounds are padded with `math.nextafter` after every operation; libm's pow/log
are assumed correct to a couple of ulps, and every use pads accordingly, so
enclosures are conservative up to that standard-library contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_INF = math.inf


def down(x: float) -> float:
    return math.nextafter(x, -_INF)


def up(x: float) -> float:
    return math.nextafter(x, _INF)


def frac_bounds(c) -> tuple[float, float]:
    """Tight float bounds of an exact rational (or float) coefficient."""
    f = float(c)
    if isinstance(c, float) or Fraction(f) == Fraction(c):
        return f, f
    return (down(f), f) if Fraction(f) > Fraction(c) else (f, up(f))


def pow_bounds(x: float, p: Fraction | float) -> tuple[float, float]:
    """Enclosure of x**p for x >= 0, including exponent-rounding error."""
    if x == 0.0:
        if p > 0:
            return 0.0, 0.0
        if p == 0:
            return 1.0, 1.0
        return _INF, _INF
    pf = float(p)
    v = x ** pf
    rel = 5e-16  # libm pow: <= ~1 ulp, padded
    if not isinstance(p, float) and Fraction(pf) != Fraction(p):
        # x**p vs x**float(p): ratio exp((p - pf) ln x)
        rel += 1.1 * float(abs(Fraction(p) - Fraction(pf))) * abs(math.log(x))
    return down(v * down(1.0 - rel)), up(v * up(1.0 + rel))


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; endpoints may be +-inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        lo, hi = frac_bounds(x)
        return cls(lo, hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        other = _coerce(other)
        return Interval(down(self.lo + other.lo), up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Interval":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Interval":
        other = _coerce(other)
        cands = [
            _dmul(self.lo, other.lo), _dmul(self.lo, other.hi),
            _dmul(self.hi, other.lo), _dmul(self.hi, other.hi),
        ]
        return Interval(down(min(c[0] for c in cands)), up(max(c[1] for c in cands)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _coerce(other)
        if other.lo < 0 < other.hi:
            return Interval(-_INF, _INF)
        if other.lo == 0 and other.hi == 0:
            raise ZeroDivisionError("division by the zero interval")
        inv_cands = []
        for e in (other.lo, other.hi):
            if e == 0:
                inv_cands.append(_INF if other.hi > 0 else -_INF)
            else:
                inv_cands.append(1.0 / e)
        inv = Interval(down(min(inv_cands)), up(max(inv_cands)))
        return self * inv

    def __rtruediv__(self, other) -> "Interval":
        return _coerce(other) / self


def _coerce(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def _dmul(a: float, b: float) -> tuple[float, float]:
    if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
        return 0.0, 0.0
    v = a * b
    return v, v


@dataclass
class ProofReport:
    """Outcome of an adaptive sign-verification run."""

    proved: bool
    counterexample: float | None = None
    inconclusive: list[tuple[float, float]] = None
    boxes: int = 0

    def __post_init__(self):
        if self.inconclusive is None:
            self.inconclusive = []


def prove_nonneg(enclosure, a: float, b: float, min_width: float = 1e-12,
                 max_boxes: int = 2_000_000) -> ProofReport:
    """Adaptive bisection proof that f >= 0 on [a, b].

    `enclosure(lo, hi)` must return an Interval containing f([lo, hi]).
    Subintervals are split until their enclosure is sign-definite or their
    width drops below min_width (then reported as inconclusive).
    """
    stack = [(a, b)]
    report = ProofReport(proved=True)
    while stack:
        lo, hi = stack.pop()
        report.boxes += 1
        if report.boxes > max_boxes:
            report.proved = False
            report.inconclusive.append((lo, hi))
            report.inconclusive.extend(stack)
            return report
        enc = enclosure(lo, hi)
        if enc.lo >= 0:
            continue
        mid = 0.5 * (lo + hi)
        if hi - lo < min_width or mid <= lo or mid >= hi:
            # try to disprove by a point evaluation
            pt = enclosure(mid, mid)
            if pt.hi < 0:
                report.proved = False
                report.counterexample = mid
                return report
            report.proved = False
            report.inconclusive.append((lo, hi))
            continue
        if enc.hi < 0:
            report.proved = False
            report.counterexample = mid
            return report
        stack.append((lo, mid))
        stack.append((mid, hi))
    return report
