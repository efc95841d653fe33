"""
Counting predictions against the census
=======================================

Main-term predictions from the singular series, and the first-order
correction for gaps between consecutive primes.
"""

from jumping_champions import count_primes, predict_N, predict_pi_tuple, run_census
from jumping_champions.census import pi_tuple_empirical

# with D = {0} the prediction is just the logarithmic integral
for e in range(4, 9):
    x = 10**e
    pred = predict_pi_tuple(x, (0,)).value
    pi = count_primes(x)
    print(f"x = 10^{e}: integral {pred:12.1f}  pi(x) {pi:>9}  rel. dev {abs(pred / pi - 1):.4%}")

# prime pairs m, m + 2 both prime
x = 10**6
print(pi_tuple_empirical(x, {0, 2}), round(predict_pi_tuple(x, (0, 2)).value, 1))

# consecutive primes with gap 2: main term and corrected term against the count
xs = [10**5, 10**6, 10**7]
for x, snap in zip(xs, run_census(xs, 1)):
    p = predict_N(x, (2,))
    emp = snap[(2,)]
    print(f"x = {x:>8}: count {emp:>6}  main {p.main_term:9.1f}  corrected {p.corrected:9.1f}"
          f"  (factor {p.correction_factor:.3f})")

# the corrected value approaches the count only slowly; at these heights the
# uncorrected main term is much closer
