# %% [markdown]
# The same eigenproblem for an elasticity tensor
#
# For an isotropic tensor E_ijkl = a d_ij d_kl + b (d_ik d_jl + d_il d_jk)
# the M-eigenvalues are b and a + 2b.

# %%
import numpy as np

from curvspec import ElasticityTensor, SolveOptions, distinct_thetas, elasticity_classical_eigen, elasticity_meig
from curvspec.meig import decompose_symmetric

iso = ElasticityTensor.isotropic(1.0, 0.5)
print("isotropic:", distinct_thetas(elasticity_meig(iso, SolveOptions(starts=64))))

e = iso.e.copy()
for i in range(3):
    e[i, i, i, i] += 0.8
cubic = ElasticityTensor(e)
print("cubic:    ", np.round(distinct_thetas(elasticity_meig(cubic, SolveOptions(starts=64))), 8))

# %% [markdown]
# Symmetric eigentensors of the form (x y^T + y x^T)/sqrt(2) with x, y
# orthonormal give zeta = 2 theta.

# %%
for pair in elasticity_classical_eigen(iso):
    xy = decompose_symmetric(pair.z)
    if xy is not None:
        x, y = xy
        theta = np.einsum("ijkl,i,j,k,l->", iso.e, x, y, x, y)
        print(f"zeta={pair.zeta:.12g}  2*theta={2 * theta:.12g}")
