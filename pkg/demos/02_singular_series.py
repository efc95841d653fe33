"""
Singular series
===============

The arithmetic weight attached to a pattern of offsets, as an Euler product
with a certified tail.
"""

from jumping_champions import local_factor, primorial, singular_series

# twin primes: the classic constant 1.3203...
for P in (10**5, 10**6, 10**7):
    s = singular_series((0, 2), P)
    print(f"P = {P:>8}: {s.value:.10f}  true value in [{s.lower:.10f}, {s.upper:.10f}]")

# local factors are exact rationals
print(local_factor((0, 2), 2), local_factor((0, 2), 3), local_factor((0, 2), 5))

# a pattern covering every class mod 3 can hold at most one prime tuple
print(singular_series((0, 2, 4), 100))

# multiples of small primes gain weight; 6 is worth exactly twice 2
base = singular_series((0, 2), 10**6).value
for d in (2, 4, 6, 10, 30, 210):
    print(f"d = {d:>3}: S = {singular_series((0, d), 10**6).value / base:.4f} x S(0,2)")

# primorials keep getting heavier, which is why they end up as champions
print([primorial(n) for n in range(1, 6)])
