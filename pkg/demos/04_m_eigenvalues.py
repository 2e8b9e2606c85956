# %% [markdown]
# M-eigenvalues by multi-start Newton
#
# The solver looks for stationary points of R(u, v, u, v) with
# g(u, u) = g(v, v) = 1 and, in modified mode, g(u, v) = 0. Each such pair
# spans a plane whose sectional curvature is the eigenvalue.

# %%
import numpy as np

from curvspec import SolveOptions, builtin, default_catalog, distinct_thetas, kkt_points, riemann, sectional, solve_meig

for entry in default_catalog():
    rt = riemann(entry.spec, entry.default_point)
    pairs = solve_meig(rt, SolveOptions(starts=32, modified=True))
    worst = max(abs(p.theta - sectional(rt, p.u, p.v)) for p in pairs)
    print(f"{entry.name:<22} thetas={np.round(distinct_thetas(pairs), 9)}  max|theta-K|={worst:.1e}")

# %% [markdown]
# Without the orthogonality constraint the sphere also has theta = 0 with
# u = v, a symmetric eigenproblem in disguise.

# %%
rt = riemann(builtin("sphere2").spec, [1.0, 0.0])
print("unmodified:", distinct_thetas(solve_meig(rt, SolveOptions(starts=32))))

# %% [markdown]
# With a timelike unit vector u on Schwarzschild, stationary points exist but
# their multipliers satisfy lambda = -mu != 0, so none is an eigenpair.

# %%
rt = riemann(builtin("schwarzschild").spec, [0.0, 3.0, 0.8, 0.0])
opts = SolveOptions(starts=32, modified=True, sigma_u=-1)
print("eigenpairs:", len(solve_meig(rt, opts)))
for k in kkt_points(rt, opts)[:4]:
    print(f"  lambda={k.lam:+.6f}  mu={k.mu:+.6f}")
