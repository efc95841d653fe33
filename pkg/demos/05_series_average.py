"""
Averages of singular series
===========================

Adding one more offset multiplies the singular series by a local factor
that averages out to 1, exactly at every prime.
"""

from jumping_champions import average_ratio_sum, gallagher_ms_average, orw_average, verify_A_identity
from jumping_champions.averages import ms_constant

# the exact cancellation behind the average
w = verify_A_identity(5, (0, 2))
print(w.terms, "->", w.total)

# the ratio sum over d0 <= H stays close to H
for D in [(0,), (0, 6)]:
    for H in (10**2, 10**3, 10**4):
        r = average_ratio_sum(D, H, 10**5)
        print(f"D = {D}, H = {H:>5}: sum {r.sum:10.3f}  |sum - H|/sqrt(H) = {r.normalized:.4f}")

# pairs: D^2 alone is off by a few percent, the three-term expansion by much less
rep = gallagher_ms_average(2, 100)
print(f"brute {rep.brute_sum:.3f}, D^2 {rep.leading:.0f}, three terms {rep.three_term:.3f}")
print(f"secondary constant 1 - gamma - log 2pi = {ms_constant():.7f}")

# fixing both ends of a 3-tuple and averaging the middle
o = orw_average(3, 50, 50)
print(f"{o.terms} terms: {o.brute_sum:.3f} against {o.main_term:.3f}")
