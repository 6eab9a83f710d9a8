"""Exact exponent algebra: admissibility, duality, criticality, splittings.

Everything in this module is rational arithmetic, so each identity below is
decided exactly rather than to floating-point tolerance.
"""
from fractions import Fraction

from strz import (
    classify_potential,
    dual,
    dual_pair_case_b,
    global_subcritical_params,
    holder_split_case_a,
    is_admissible,
    local_params,
    pseudoconformal_ok,
    scaling_exponent,
)

print("== admissible pairs (1/p + n/(2q) = n/4) ==")
for p, q, n in [("inf", 2, 3), (2, 6, 3), (4, 3, 3), (2, "inf", 2), (4, 4, 2)]:
    print(f"  (p,q,n) = ({p},{q},{n}): {is_admissible(p, q, n)}")

print("\n== conjugate indices ==")
for e in [2, "inf", 6, Fraction(8, 3)]:
    print(f"  dual({e}) = {dual(e)}")

print("\n== criticality of (r, s): position of 1/r + n/(2s) against 1 ==")
for r, s, n in [(2, 3, 3), (4, 6, 3), (1, 2, 3), ("inf", Fraction(3, 2), 3)]:
    cls = classify_potential(r, s, n)
    sig = scaling_exponent(r, s, n)
    print(f"  (r,s,n) = ({r},{s},{n}): {cls.criticality.value}, rho = {cls.rho}, "
          f"scaling exponent {sig}")

print("\n== Holder splitting on the critical line (r >= 2) ==")
for r, s, n in [(2, 3, 3), (4, 2, 3), (2, 4, 4)]:
    pair = holder_split_case_a(r, s, n)
    print(f"  (r,s,n) = ({r},{s},{n}) -> (p0,q0) = ({pair.p},{pair.q}), "
          f"admissible: {pair.admissible}")

print("\n== companion/dual pairs on the critical line (r <= 2) ==")
for r, s, n in [(2, 3, 3), (1, "inf", 3), (Fraction(3, 2), 6, 4)]:
    pair, d = dual_pair_case_b(r, s, n)
    print(f"  (r,s,n) = ({r},{s},{n}) -> admissible ({pair.p},{pair.q}), dual ({d[0]},{d[1]})")

print("\n== cascade schedule parameters ==")
sub = global_subcritical_params(4, 6, 3)
loc = local_params(1, 2, 3)
print(f"  subcritical (4,6,3): alpha = {sub.alpha}, beta = {sub.beta}")
print(f"  local       (1,2,3): alpha = {loc.alpha}, beta = {loc.beta}")

print("\n== pseudoconformal condition 1/(2r) + n/(2s) > 1, s in ]n/2, n[ ==")
for r, s, n in [(1, 2, 3), (2, Fraction(3, 2), 2)]:
    print(f"  (r,s,n) = ({r},{s},{n}): {pseudoconformal_ok(r, s, n)}")
