"""
Sandwiching a gap count
=======================

The number of consecutive primes at distance d is squeezed between
truncated inclusion-exclusion sums over the tuples that fit inside.
"""

from jumping_champions import bonferroni_check

for D in [(6,), (4,), (2, 6), (12,)]:
    for I in (0, 1, 2):
        r = bonferroni_check(10**4, D, I, budget=10**12)
        print(f"{'-'.join(map(str, D)):>5} I={I}: {r.lower} <= {r.count} <= {r.upper}")

# each extra level tightens both sides; the twin gap has nothing inside and is exact
print(bonferroni_check(10**4, (2,), 0))
