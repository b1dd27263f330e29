"""
The constant defining vector
============================

When every entry equals 1 the group is not branch.  The quotients Q_l = G_l / (K_l)'
carry the obstruction: their orders and lower central series match an
integer-matrix model exactly.
"""

# %%
from ggsbranch.constant import (b9_kernel_check, model_lcs_index, model_matrix, not_branch_report,
                                q_order, structure_crosscheck)

for p, n, depth in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)]:
    qd = q_order(p, n, depth)
    print(f'p={p} n={n} l={depth}: |Q| = {qd.order}, class {qd.nilpotency_class}')

# %%
# The model is the companion matrix M of 1 + x + ... + x^(p^n - 1).  The
# lower central indices are powers of det(M - I).
M = model_matrix(3, 1)
print(M.rows)
print([model_lcs_index(3, 1, i) for i in range(1, 7)])

# %%
# The quotient and the model agree term by term.
print(structure_crosscheck(3, 1, 2).detail['indices'])

# %%
# A product b_1^k1 ... b_m^km fixes level 2 only when every exponent vanishes.
print(b9_kernel_check(2, 2).detail)

# %%
# Finally the full summary, whose conclusion is cited rather than proved.
rep = not_branch_report((2, 1), 3)
print(rep['verdict'], '-', rep['conclusion'])
