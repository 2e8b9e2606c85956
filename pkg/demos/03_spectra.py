# %% [markdown]
# Eigenvalues on the space of 2-forms
#
# The curvature operator acts on antisymmetric index pairs. In the compressed
# basis of ordered pairs it becomes a generalized eigenproblem
# R_AB x^B = (zeta / 2) G_AB x^B. Eigenvectors that are simple bivectors
# u ^ v with g(u, v) = 0 give modified M-eigenpairs with theta = zeta / 2.

# %%
import math

import numpy as np

from curvspec import assemble_pencil, builtin, classical_eigen, decompose_bivector, riemann, theta_of

entry = builtin("sphere3", {"a": 2.0})
rt = riemann(entry.spec, entry.default_point)
pencil = assemble_pencil(rt)
print("pairs:", pencil.basis.pairs)
for pair in classical_eigen(pencil):
    uv = decompose_bivector(pair.x, pencil.basis, rt.g)
    if uv is None:
        print(f"zeta={pair.zeta.real:.12g}: not a simple bivector")
        continue
    u, v = uv
    print(f"zeta={pair.zeta.real:.12g}  2*theta(u,v)={2 * theta_of(rt, u, v):.12g}  g(u,v)={u @ rt.g @ v:.1e}")

# %% [markdown]
# Schwarzschild at r = 3 rs / 2 has eigenvalues -2/27 (four times) and 4/27.

# %%
rt = riemann(builtin("schwarzschild").spec, [0.0, 3.0, math.pi / 4, 0.0])
zetas = sorted(p.zeta.real for p in classical_eigen(assemble_pencil(rt)))
print(np.round(zetas, 12), "vs", -2 / 27, 4 / 27)
