"""Rigorous sign verification and extremum enclosures for signomials on (0,1).

This is the "interval" rigor tier.  Every analytic claim the package certifies
is reduced (by clearing denominators) to nonnegativity of a signomial
sum c_k r^(p_k) on the open interval (0,1), which is decided here by:

* exact leading-term analysis at r -> 0 (factor out the minimal power; the
  resulting constant term is the limit and must be positive);
* exact evaluation at r = 1 (rational sum of coefficients); when it vanishes,
  a monotonicity argument on a left neighborhood via the (exact) derivative,
  applied recursively;
* adaptive outward-rounded interval bisection on the remaining compact core.

Suprema/infima of ratios of signomials are enclosed by certified point
evaluations (upper/lower bound) plus a bisection over levels c of the claim
"num - c*den >= 0 on (0,1)" (lower/upper bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exprs import Signomial, _frac
from .intervals import Interval, ProofReport, prove_nonneg


@dataclass
class SignReport:
    """Outcome of a nonnegativity proof on (0,1)."""

    proved: bool
    reason: str = ""
    counterexample: float | None = None
    boxes: int = 0
    inconclusive: list = field(default_factory=list)


def _prove_upper(sig: Signomial, a: float, depth: int, min_width: float,
                 max_boxes: int) -> SignReport:
    """Certify sig >= 0 on [a, 1], handling a possible zero of sig at r = 1.

    When sig(1) = 0 exactly, sig >= 0 on [a2, 1] follows from sig being
    non-increasing there (-sig' >= 0 on [a2, 1], recursively the same kind of
    claim); the window [a2, 1] is shrunk geometrically until the derivative
    claim is provable, and the remaining [a, a2] is handled by plain
    bisection.  This is essential when the slope at the root is orders of
    magnitude below the coefficient scale: no fixed-width collar enclosure is
    then sign-definite near 1, but the derivative claim is.
    """
    v1 = sig.value_at_one()
    if v1 < 0:
        return SignReport(False, reason="negative value at r=1", counterexample=1.0)
    if v1 > 0:
        rep: ProofReport = prove_nonneg(sig.enclosure, a, 1.0,
                                        min_width=min_width, max_boxes=max_boxes)
        return SignReport(rep.proved,
                          reason="interval bisection" if rep.proved else "not sign-definite",
                          counterexample=rep.counterexample, boxes=rep.boxes,
                          inconclusive=rep.inconclusive)
    if depth == 0:
        return SignReport(False, reason="derivative depth exhausted at r=1")
    d = -sig.diff()
    a2 = a
    attempt_boxes = max(max_boxes // 8, 10_000)
    for _ in range(45):
        drep = _prove_upper(d, a2, depth - 1, min_width, attempt_boxes)
        if drep.proved:
            if a2 <= a:
                return SignReport(True, reason=f"non-increasing into zero ({drep.reason})",
                                  boxes=drep.boxes)
            rep = prove_nonneg(sig.enclosure, a, a2,
                               min_width=min_width, max_boxes=max_boxes)
            return SignReport(rep.proved,
                              reason=("non-increasing collar + bisection" if rep.proved
                                      else "not sign-definite left of the collar"),
                              counterexample=rep.counterexample,
                              boxes=rep.boxes + drep.boxes,
                              inconclusive=rep.inconclusive)
        if drep.counterexample == 1.0:
            # a genuinely negative derivative value at 1 cannot improve
            return SignReport(False, reason=f"zero at r=1; {drep.reason}")
        a2 = 1.0 - 0.5 * (1.0 - a2) if a2 > a else max(a, 1.0 - 1e-2)
    return SignReport(False, reason="no provable non-increasing window at r=1")


def prove_signomial_nonneg(sig: Signomial, min_width: float = 1e-12,
                           depth: int = 4, max_boxes: int = 2_000_000) -> SignReport:
    """Prove sig(r) >= 0 for all r in the open interval (0, 1)."""
    if not sig.terms:
        return SignReport(True, reason="identically zero")
    _, g = sig.factor_min_power()
    c0 = g.terms.get(Fraction(0), Fraction(0))
    if c0 < 0:
        # the limit at r -> 0+ is negative; exhibit a concrete witness
        for k in range(2, 300):
            r = 2.0 ** -k
            if g.enclosure(r, r).hi < 0:
                return SignReport(False, reason="negative limit at r=0",
                                  counterexample=r)
        return SignReport(False, reason="negative limit at r=0")
    if c0 == 0:
        # cannot happen after factoring unless sig == 0, handled above
        raise AssertionError("minimal-power coefficient vanished")

    # collar at r = 0: the enclosure converges to c0 > 0 as the width shrinks
    eps0 = 0.25
    for _ in range(200):
        if g.enclosure(0.0, eps0).lo >= 0:
            break
        eps0 *= 0.5
    else:
        return SignReport(False, reason="no sign-definite collar at r=0",
                          inconclusive=[(0.0, eps0)])

    return _prove_upper(g, eps0, depth, min_width, max_boxes)


def _log_uniform_points(n: int, lo: float = 1e-9) -> np.ndarray:
    """Deterministic sampling of (0,1): log-uniform plus uniform points."""
    k = n // 2
    a = np.exp(np.linspace(math.log(lo), 0.0, k, endpoint=False))
    b = np.linspace(0.0, 1.0, n - k, endpoint=False)[1:]
    return np.unique(np.concatenate([a, b]))


def sampled_min(num: Signomial, den: Signomial | None, n: int = 1_000_000):
    """(min value, argmin) of num/den over a dense deterministic sample of (0,1)."""
    r = _log_uniform_points(n)
    v = num(r)
    if den is not None:
        v = v / den(r)
    i = int(np.nanargmin(v))
    return float(v[i]), float(r[i])


def _point_enclosure(num: Signomial, den: Signomial | None, r: float) -> Interval:
    e = num.enclosure(r, r)
    if den is not None:
        e = e / den.enclosure(r, r)
    return e


def inf_enclosure(num: Signomial, den: Signomial | None = None,
                  rel_tol: float = 1e-5, samples: int = 200_001,
                  min_width: float = 1e-10, max_boxes: int = 400_000):
    """Certified enclosure (lo, hi, argmin) of inf over (0,1) of num/den.

    Requires den > 0 on (0,1) (the caller's responsibility).  The upper bound
    is a verified point evaluation at the sampled argmin; the lower bound is
    the largest level c for which "num - c*den >= 0 on (0,1)" is proved.
    """
    est, r_hat = sampled_min(num, den, samples)
    hi = _point_enclosure(num, den, r_hat).hi

    scale = abs(hi) if hi not in (0.0, math.inf, -math.inf) else 1.0

    def provable(c: float) -> bool:
        claim = num - Signomial.constant(_frac(c)) * (den if den is not None
                                                      else Signomial.constant(1))
        return prove_signomial_nonneg(claim, min_width=min_width,
                                      max_boxes=max_boxes).proved

    # find a provable anchor below the sampled minimum
    step = max(rel_tol, 1e-6) * scale
    lo = hi - step
    for _ in range(60):
        if provable(lo):
            break
        step *= 4.0
        lo = hi - step
    else:
        return -math.inf, hi, r_hat

    # bisect the level between the provable anchor and the upper bound
    bad = hi
    while bad - lo > rel_tol * scale:
        mid = 0.5 * (lo + bad)
        if provable(mid):
            lo = mid
        else:
            bad = mid
    return lo, hi, r_hat


def sup_enclosure(num: Signomial, den: Signomial | None = None, **kw):
    """Certified enclosure (lo, hi, argmax) of sup over (0,1) of num/den."""
    lo, hi, r_hat = inf_enclosure(-num, den, **kw)
    return -hi, -lo, r_hat
