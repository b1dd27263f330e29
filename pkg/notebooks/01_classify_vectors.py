"""
Classifying defining vectors
============================

A GGS-group over the p^n-adic tree is fixed by a prime p, an exponent n and
a defining vector of p^n - 1 residues.  This walk-through builds a few
vectors, reads off their numerical invariants and asks the classifier which
branch structure applies.
"""

# %%
# A defining vector holds the entries e_1, ..., e_(p^n - 1) modulo p^n.
from ggsbranch.vectors import DefiningVector, classify, is_periodic, r0, reduce_vector

e = DefiningVector(2, 2, (1, 0, 1))
print(e.to_text(), 'R0 =', r0(e), 'periodic:', is_periodic(e))

# %%
# The classifier walks an ordered list of routes and stops at the first one
# that applies.  Its report explains which hypotheses held.
report = classify(e)
print(report.route.value)
print(report.note)

# %%
# Scaling by a unit does not change the group, and neither does the
# normalisation that makes one invertible entry equal to 1.
data = reduce_vector(DefiningVector(5, 1, (0, 2, 0, 1)))
print('k =', data.k, 'r =', data.r, 'reduced:', data.reduced.to_text())

# %%
# A small survey: how many vectors over the alphabet of size 4 fall on each route?
import itertools
from collections import Counter

counts = Counter()
for entries in itertools.product(range(4), repeat=3):
    if any(entries):
        counts[classify(DefiningVector(2, 2, entries)).route.value] += 1
for route, count in sorted(counts.items()):
    print(f'{route:28s} {count}')
