"""Pure-numpy four-point scan, the fallback for the compiled kernel.

Both backends evaluate (E[x,y] - E[x,z]) - E[z,y] in exactly this
association order and report the lexicographically first maximizing triple,
so their results agree bit for bit.
"""
import numpy as np


def scan(e):
    """Max of (E[x,y]-E[x,z])-E[z,y] over (x,y,z), with lex-first argmax."""
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]
    et = e.T
    best = -np.inf
    best_x = -1
    for x in range(n):
        row = e[x]
        s = (row[:, None] - row[None, :]) - et
        m = s.max()
        if m > best:
            best = m
            best_x = x
    row = e[best_x]
    s = (row[:, None] - row[None, :]) - et
    flat = int(np.argmax(s))
    return float(best), best_x, flat // n, flat % n
