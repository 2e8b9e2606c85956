# %% [markdown]
# Geodesic deviation
#
# Along the equator of the unit sphere a Jacobi field starting at zero with
# unit northward derivative has length sin t. In constant curvature every
# normal field obeys v'' + kappa v = 0, with kappa the modified M-eigenvalue.

# %%
import math

import numpy as np

from curvspec import builtin, decoupled_solution, integrate_geodesic, integrate_jacobi

spec = builtin("sphere2").spec
geo = integrate_geodesic(spec, [math.pi / 2, 0.0], [0.0, 1.0], math.pi / 2, 1000)
jac = integrate_jacobi(spec, geo, [0.0, 0.0], [1.0, 0.0])
for k in range(0, 1001, 250):
    print(f"t={geo.t[k]:.4f}  |v|={jac.norm_v[k]:.10f}  sin t={math.sin(geo.t[k]):.10f}")

# %% [markdown]
# Negative curvature makes neighbouring geodesics diverge like cosh.

# %%
h2 = builtin("hyperbolic2")
geo = integrate_geodesic(h2.spec, [0.0, 1.0], [1.0, 0.0], 1.0, 1000)
jac = integrate_jacobi(h2.spec, geo, [0.0, 1.0], [0.0, 0.0])
ref, _ = decoupled_solution(-1.0, 1.0, 0.0, geo.t)
print("max | |v| - cosh t | =", np.max(np.abs(jac.norm_v - ref)))

# %% [markdown]
# Halving the RK4 step cuts the error by about 2^4.

# %%
errors = []
for steps in (10, 20, 40):
    geo = integrate_geodesic(spec, [math.pi / 2, 0.0], [0.0, 1.0], math.pi / 2, steps)
    jac = integrate_jacobi(spec, geo, [0.0, 0.0], [1.0, 0.0])
    errors.append(float(np.max(np.abs(jac.norm_v - np.sin(geo.t)))))
print("errors:", errors, "ratios:", [errors[i] / errors[i + 1] for i in range(2)])

# %% [markdown]
# Trajectories export to CSV for plotting elsewhere:
# jac.to_csv("field.csv")
