"""
Finite quotients on the levels of the tree
==========================================

Acting on the leaves of level l turns a GGS-group into a finite permutation
group G_l.  Orders, stabilisers and the abelianisation can all be read off
these quotients.
"""

# %%
import numpy as np

from ggsbranch.quotient import build_quotient, fractal_check, index, level_transitive
from ggsbranch.vectors import DefiningVector

e = DefiningVector(3, 1, (1, 2))
q = build_quotient(e, 3)
print('leaves:', q.degree, ' |G_3| =', q.order())

# %%
# The generators are plain numpy permutation arrays on the leaves.
print('a moves', int(np.count_nonzero(q.a != np.arange(q.degree))), 'leaves')
print('b moves', int(np.count_nonzero(q.b != np.arange(q.degree))), 'leaves')

# %%
# The first-level stabiliser has index p^n, and the group is level
# transitive and fractal exactly when R0 = 0.
st1 = q.stabilizer_subgroup(1)
print('|G_3 : st(1)| =', index(q.group, st1))
print('transitive:', level_transitive(q), ' fractal:', fractal_check(e, 3))

# %%
# The abelianisation is C_(p^n) x C_(p^(n - R0)).  A vector with every entry
# divisible by p has R0 > 0 and a smaller second factor.
for v in [e, DefiningVector(2, 2, (2, 0, 2))]:
    print(v.to_text(), build_quotient(v, 3).group.abelian_invariants())

# %%
# Growth of the quotients along the levels, with the lower central series.
dihedral = DefiningVector(2, 1, (1,))
for depth in range(1, 6):
    g = build_quotient(dihedral, depth).group
    print(depth, g.order(), [t.order() for t in g.lower_central_series()])
