"""Independent reference computations shared by several test modules."""

import math

import numpy as np
from scipy.optimize import least_squares, linear_sum_assignment

from curvspec import christoffel, metric_at


def brute_force_zeta(rt):
    """Spectrum of x^ij -> g^ia g^jb R_abkl x^kl on antisymmetric tensors."""
    n = rt.n
    g_inv = rt.metric_jet.g_inv
    op = np.einsum("ia,jb,abkl->ijkl", g_inv, g_inv, rt.r_down).reshape(n * n, n * n)
    cols = []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j], e[j, i] = 1 / math.sqrt(2), -1 / math.sqrt(2)
            cols.append(e.ravel())
    q = np.array(cols).T
    return np.linalg.eigvals(q.T @ op @ q)


def spectrum_distance(a, b):
    """Largest gap under the best one-to-one matching, relative to max(1, |b|)."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return math.inf
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]) / max(1.0, np.max(np.abs(b))))


def fd_metric_error(spec, x, h1=1e-5, h2=1e-4):
    """Relative gap between the exact metric jet and central differences of g."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    jet = metric_at(spec, x)
    eye = np.eye(n)

    def g(y):
        return metric_at(spec, y, order=0).g

    dg = np.stack([(g(x + h1 * eye[k]) - g(x - h1 * eye[k])) / (2 * h1) for k in range(n)], axis=-1)
    d2g = np.empty((n, n, n, n))
    for k in range(n):
        for l in range(n):
            a, b = h2 * eye[k], h2 * eye[l]
            d2g[:, :, k, l] = (g(x + a + b) - g(x + a - b) - g(x - a + b) + g(x - a - b)) / (4 * h2 * h2)
    e1 = np.max(np.abs(dg - jet.dg)) / max(1.0, np.max(np.abs(jet.dg)))
    e2 = np.max(np.abs(d2g - jet.d2g)) / max(1.0, np.max(np.abs(jet.d2g)))
    return float(max(e1, e2))


def fd_christoffel_error(spec, x, h=1e-5):
    """Relative gap between the exact derivative of Gamma and central differences."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    exact = christoffel(metric_at(spec, x)).dgamma

    def gamma(y):
        return christoffel(metric_at(spec, y, order=1)).gamma

    fd = np.stack([(gamma(x + h * e) - gamma(x - h * e)) / (2 * h) for e in np.eye(n)], axis=-1)
    return float(np.max(np.abs(fd - exact)) / max(1.0, np.max(np.abs(exact))))


def _sphere_point(a, b):
    return np.array([math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)])


def grid_polish_thetas(e, points=16, per_bin=4, bin_width=0.02):
    """M-eigenvalues of E by a dense grid over S^2 x S^2 plus least-squares polish.

    Stationary points of f(x, y) = E(x, y, x, y) on the sphere product are
    zeros of the tangential gradients. Grid pairs are grouped by their f
    value; the best few of each group by residual are polished in angle
    coordinates, so every critical level gets candidates.
    """
    ang = [(a, b) for a in np.linspace(0.05, math.pi - 0.05, points) for b in np.linspace(0, 2 * math.pi, 2 * points, endpoint=False)]
    xs = np.array([_sphere_point(a, b) for a, b in ang])
    # x = xs[n], y = xs[m]
    fx = np.einsum("hijk,mi,nj,mk->nmh", e, xs, xs, xs)
    fy = np.einsum("hijk,ni,mj,nk->nmh", e, xs, xs, xs)
    rx = fx - np.einsum("nmh,nh->nm", fx, xs)[..., None] * xs[:, None, :]
    ry = fy - np.einsum("nmh,mh->nm", fy, xs)[..., None] * xs[None, :, :]
    score = np.sum(rx**2, axis=-1) + np.sum(ry**2, axis=-1)
    level = np.einsum("nmh,mh->nm", fy, xs)  # f(x, y)

    bins: dict[int, list[int]] = {}
    for idx in np.argsort(score, axis=None):
        key = int(np.floor(level.flat[idx] / bin_width))
        group = bins.setdefault(key, [])
        if len(group) < per_bin:
            group.append(idx)

    def resid(params):
        x, y = _sphere_point(*params[:2]), _sphere_point(*params[2:])
        gx = np.einsum("hijk,i,j,k->h", e, y, x, y)
        gy = np.einsum("hijk,i,j,k->h", e, x, y, x)
        return np.concatenate([gx - (gx @ x) * x, gy - (gy @ y) * y])

    thetas = []
    for group in bins.values():
        for idx in group:
            n, m = np.unravel_index(idx, score.shape)
            sol = least_squares(resid, [*ang[n], *ang[m]], xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if np.linalg.norm(sol.fun) < 1e-9:
                x, y = _sphere_point(*sol.x[:2]), _sphere_point(*sol.x[2:])
                thetas.append(float(np.einsum("ijkl,i,j,k,l->", e, x, y, x, y)))
    out = []
    for t in sorted(thetas):
        if not out or t - out[-1] > 1e-6:
            out.append(t)
    return out
