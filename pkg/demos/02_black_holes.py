# %% [markdown]
# Schwarzschild and Reissner-Nordstrom
#
# Vacuum means a vanishing Ricci tensor. The Kretschmann invariant
# R_abcd R^abcd of Schwarzschild is 12 rs^2 / r^6, and the modified
# M-eigenvalue -rs / (2 r^3) is tied to it by theta = -sqrt(K1 / 48).

# %%
import math

import numpy as np

from curvspec import SolveOptions, builtin, distinct_thetas, invariants, riemann, solve_meig, vacuum_block_check

entry = builtin("schwarzschild", {"rs": 2.0, "c": 1.0})
for r in (3.0, 5.0, 10.0):
    rt = riemann(entry.spec, [0.0, r, math.pi / 4, 0.0])
    inv = invariants(rt)
    thetas = distinct_thetas(solve_meig(rt, SolveOptions(starts=32, modified=True)))
    print(
        f"r={r:>4}: max|Ric|={np.max(np.abs(inv.ricci)):.1e}  K1={inv.kretschmann:.10f}"
        f"  12 rs^2/r^6={12 * 4 / r**6:.10f}  thetas={np.round(thetas, 10)}"
        f"  -sqrt(K1/48)={-math.sqrt(inv.kretschmann / 48):.10f}"
    )

# %% [markdown]
# In an orthonormal frame the 6x6 pair matrix of a vacuum metric has the
# block form [[M, N], [N, -M]] with traceless M and N.

# %%
rt = riemann(entry.spec, [0.0, 3.0, math.pi / 4, 0.0])
report = vacuum_block_check(rt)
print("M =\n", np.round(report.m_block, 12))
print("N =\n", np.round(report.n_block, 12))
print("structure residual", report.max_structure_residual, " tr N", report.trace_n)

# %% [markdown]
# Charge breaks the vacuum condition but leaves the scalar curvature at 0.

# %%
rn = builtin("reissner_nordstrom", {"rs": 2.0, "rq": 0.6})
inv = invariants(riemann(rn.spec, [0.0, 3.0, math.pi / 4, 0.0]))
print("R =", inv.scalar, " max|Ric| =", np.max(np.abs(inv.ricci)))
print("Einstein residual of the block check:", vacuum_block_check(riemann(rn.spec, [0.0, 3.0, 1.0, 0.0])).einstein_residual)
