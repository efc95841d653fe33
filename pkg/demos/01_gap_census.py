"""
Who wins among gaps between consecutive primes
==============================================

A census of consecutive-prime windows, followed from 10^4 up to 10^7.
"""

from jumping_champions import champions_of, run_census

# k = 1 counts single gaps p' - p; the most frequent one is the champion
checkpoints = [10**4, 10**5, 10**6, 10**7]
for snap in run_census(checkpoints, 1):
    top = snap.top(4)
    print(f"x = {snap.x:>9}: " + "  ".join(f"{p.label}:{c}" for p, c in top))

# twins lead early, 6 takes over before 10^4 and holds on for a very long time
print()

# k = 2 looks at two consecutive gaps at once, written as cumulative offsets
for snap in run_census(checkpoints[1:], 2):
    rec = champions_of(snap)
    for p in rec.champions:
        print(f"x = {snap.x:>9}: champion {p.label} seen {rec.max_count} times, gcd {rec.gcds[p]}")

# the champion's gcd is 6 here: even, and square-free
