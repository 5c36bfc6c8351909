#!/usr/bin/env python3
"""Regenerate airy_golden.csv with 50-digit mpmath evaluations."""
import mpmath as mp

mp.mp.dps = 50

points = sorted(set(
    [mp.mpf(k) / 4 for k in range(-120, 121)]
    + [mp.mpf(x) for x in ("-9.99", "-10.01", "9.99", "10.01", "0.125", "-0.125", "1e-3", "-1e-3")]
))

with open("airy_golden.csv", "w") as out:
    out.write("t,ai,ai_prime,bi,bi_prime\n")
    for t in points:
        vals = [mp.airyai(t), mp.airyai(t, derivative=1), mp.airybi(t), mp.airybi(t, derivative=1)]
        out.write(",".join([mp.nstr(t, 17)] + [mp.nstr(v, 20) for v in vals]) + "\n")
