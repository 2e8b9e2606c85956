# %% [markdown]
# Three dimensions: the Ricci tensor determines everything
#
# In 3D the Weyl part vanishes, so R_abcd is rebuilt from Ricci and the
# metric. Orthonormal Ricci eigenvectors x, y with eigenvalues l, m give a
# modified M-eigenpair with theta = l + m - R/2.

# %%
import numpy as np

from curvspec import SolveOptions, builtin, distinct_thetas, invariants, riemann, ricci_reconstruction, ricci_triples, solve_meig

entry = builtin("perturbed3")
for x in entry.sample_points(3, seed=1):
    rt = riemann(entry.spec, x)
    dev = np.max(np.abs(ricci_reconstruction(rt) - rt.r_down))
    triples = ricci_triples(rt)
    solver = distinct_thetas(solve_meig(rt, SolveOptions(starts=48, modified=True)))
    print(f"x={np.round(x, 3)}  R={invariants(rt).scalar:+.6f}  rebuild dev={dev:.1e}")
    print("  triples:", [f"{t.theta:+.8f} (res {t.residual:.0e})" for t in triples])
    print("  solver: ", [f"{t:+.8f}" for t in solver])
