"""M-eigenpairs of the Riemann tensor and of the elasticity tensor.

An M-eigenpair (theta, u, v) solves

    R_hijk u^i v^j u^k = theta g_hl v^l,    R_hijk v^i u^j v^k = theta g_hl u^l,
    g(u, u) = sigma_u,  g(v, v) = sigma_v,

and the modified problem adds g(u, v) = 0. Solutions are found by
multi-start damped Newton on the square KKT system with separate
multipliers (lambda, mu); converged points with lambda = mu are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .geometry import RiemannTensor

__all__ = [
    "SolveOptions",
    "MEigenpair",
    "KKTPoint",
    "kkt_points",
    "ElasticityTensor",
    "meig_residual",
    "theta_of",
    "solve_meig",
    "elasticity_meig",
    "elasticity_classical_eigen",
    "decompose_symmetric",
    "dedupe",
    "distinct_thetas",
]

CLASSIFY_TOL = 1e-8
MAX_RESAMPLES = 100


@dataclass(frozen=True)
class SolveOptions:
    starts: int = 64
    seed: int = 0
    tol: float = 1e-12
    max_iter: int = 100
    sigma_u: int = 1
    sigma_v: int = 1
    modified: bool = False
    dedupe_tol: float = 1e-6

    def __post_init__(self):
        if self.starts < 1:
            raise InputError("starts must be >= 1")
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be >= 1")
        if self.sigma_u not in (-1, 1) or self.sigma_v not in (-1, 1):
            raise InputError("sigma_u and sigma_v must be +1 or -1")


@dataclass(frozen=True)
class MEigenpair:
    theta: float
    u: np.ndarray
    v: np.ndarray
    lambda_mu_gap: float
    residual: float
    norm_u: float
    norm_v: float
    ortho: float


@dataclass(frozen=True)
class ElasticityTensor:
    """Fourth-order 3x3x3x3 tensor with minor and major symmetries."""

    e: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.shape != (3, 3, 3, 3):
            raise InputError(f"elasticity tensor must be 3x3x3x3, got {e.shape}")
        for axes, label in (((1, 0, 2, 3), "E_ijkl = E_jikl"), ((0, 1, 3, 2), "E_ijkl = E_ijlk"), ((2, 3, 0, 1), "E_ijkl = E_klij")):
            if not np.array_equal(e, e.transpose(axes)):
                raise InputError(f"elasticity tensor violates {label}")
        object.__setattr__(self, "e", e)

    @classmethod
    def isotropic(cls, a: float, b: float) -> "ElasticityTensor":
        """E_ijkl = a d_ij d_kl + b (d_ik d_jl + d_il d_jk)."""
        d = np.eye(3)
        e = a * np.einsum("ij,kl->ijkl", d, d) + b * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
        return cls(e)

    @classmethod
    def symmetrized(cls, e: np.ndarray) -> "ElasticityTensor":
        """Project an arbitrary 3x3x3x3 array onto the symmetric subspace."""
        e = np.asarray(e, dtype=float)
        e = 0.5 * (e + e.transpose(2, 3, 0, 1))
        e = 0.5 * (e + e.transpose(1, 0, 2, 3))
        e = 0.5 * (e + e.transpose(0, 1, 3, 2))
        # the three projections commute; one more pass fixes rounding order
        e = 0.5 * (e + e.transpose(2, 3, 0, 1))
        return cls(e)


# --------------------------------------------------------------------------
# Contractions and the KKT system
# --------------------------------------------------------------------------


def _contract3(t: np.ndarray, a, b, c) -> np.ndarray:
    """t_hijk a^i b^j c^k."""
    return ((t @ c) @ b) @ a


def _residual(t, g, u, v, theta) -> float:
    r1 = _contract3(t, u, v, u) - theta * (g @ v)
    r2 = _contract3(t, v, u, v) - theta * (g @ u)
    return float(math.sqrt(r1 @ r1 + r2 @ r2))


def meig_residual(rt: RiemannTensor, u, v, theta: float) -> float:
    """Norm of the stacked 2n residual of the M-eigen equations."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return _residual(rt.r_down, rt.g, u, v, theta)


def theta_of(rt: RiemannTensor, u, v) -> float:
    """R_ijkl u^i v^j u^k v^l."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(_contract3(rt.r_down, v, u, v) @ u)


class _KKT:
    """F(z) = 0 with z = (u, v, lambda, mu[, nu]).

    With ``ortho`` the orthogonality constraint g(u, v) = 0 is part of the
    system and its multiplier nu enters both vector equations.
    """

    def __init__(self, t, g, sigma_u, sigma_v, ortho):
        self.t = t
        self.g = g
        self.n = g.shape[0]
        self.su = sigma_u
        self.sv = sigma_v
        self.ortho = ortho
        self.size = 2 * self.n + (3 if ortho else 2)

    def split(self, z):
        n = self.n
        nu = z[2 * n + 2] if self.ortho else 0.0
        return z[:n], z[n : 2 * n], z[2 * n], z[2 * n + 1], nu

    def residual(self, z) -> np.ndarray:
        u, v, lam, mu, nu = self.split(z)
        t, g = self.t, self.g
        gu, gv = g @ u, g @ v
        f1 = _contract3(t, u, v, u) - lam * gv - nu * gu
        f2 = _contract3(t, v, u, v) - mu * gu - nu * gv
        tail = [u @ gu - self.su, v @ gv - self.sv]
        if self.ortho:
            tail.append(u @ gv)
        return np.concatenate([f1, f2, tail])

    def jacobian(self, z) -> np.ndarray:
        n = self.n
        u, v, lam, mu, nu = self.split(z)
        t, g = self.t, self.g
        gu, gv = g @ u, g @ v
        # d/du of t_hijk u^i v^j u^k, and the mixed terms
        a_u = (t @ u) @ v + np.einsum("hijk,i,j->hk", t, u, v)
        a_v = np.einsum("hijk,i,k->hj", t, u, u)
        b_v = (t @ v) @ u + np.einsum("hijk,i,j->hk", t, v, u)
        b_u = np.einsum("hijk,i,k->hj", t, v, v)
        J = np.zeros((self.size, self.size))
        J[:n, :n] = a_u - nu * g
        J[:n, n : 2 * n] = a_v - lam * g
        J[:n, 2 * n] = -gv
        J[n : 2 * n, :n] = b_u - mu * g
        J[n : 2 * n, n : 2 * n] = b_v - nu * g
        J[n : 2 * n, 2 * n + 1] = -gu
        J[2 * n, :n] = 2 * gu
        J[2 * n + 1, n : 2 * n] = 2 * gv
        if self.ortho:
            J[:n, 2 * n + 2] = -gu
            J[n : 2 * n, 2 * n + 2] = -gv
            J[2 * n + 2, :n] = gv
            J[2 * n + 2, n : 2 * n] = gu
        return J


def _newton_step(J: np.ndarray, F: np.ndarray) -> np.ndarray:
    U, s, Vt = np.linalg.svd(J)
    rhs = U.T @ -F
    if s[-1] > 1e-10 * s[0]:
        return Vt.T @ (rhs / s)
    # Levenberg shift for rank-deficient Jacobians (solution manifolds)
    delta = 1e-10 * s[0]
    return Vt.T @ (s * rhs / (s * s + delta * delta))


def _newton(system: _KKT, z: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, float]:
    F = system.residual(z)
    norm = float(np.linalg.norm(F))
    polish = 0
    for _ in range(max_iter):
        if not math.isfinite(norm) or np.max(np.abs(z)) > 1e8:
            break
        if norm < tol:
            # a couple of extra full steps push the residual to roundoff
            polish += 1
            if polish > 2:
                break
        step = _newton_step(system.jacobian(z), F)
        alpha = 1.0
        while True:
            z_new = z + alpha * step
            F_new = system.residual(z_new)
            norm_new = float(np.linalg.norm(F_new))
            if norm_new <= (1.0 - 1e-4 * alpha) * norm or (polish and norm_new <= norm):
                break
            alpha *= 0.5
            if alpha < 1e-10:
                return z, norm
        z, F, norm = z_new, F_new, norm_new
    return z, norm


def _initial_vector(rng: np.random.Generator, g: np.ndarray, sigma: int) -> np.ndarray | None:
    for _ in range(MAX_RESAMPLES):
        w = rng.standard_normal(g.shape[0])
        q = w @ g @ w
        if q * sigma > 0:
            return w / math.sqrt(abs(q))
    return None


def _canonical_sign(w: np.ndarray) -> np.ndarray:
    big = np.flatnonzero(np.abs(w) > 1e-12 * max(np.max(np.abs(w)), 1e-300))
    if big.size and w[big[0]] < 0:
        return -w
    return w


def _make_pair(t, g, u, v, lam, mu) -> MEigenpair:
    theta = 0.5 * (lam + mu)
    return MEigenpair(
        theta=float(theta),
        u=u,
        v=v,
        lambda_mu_gap=float(abs(lam - mu)),
        residual=_residual(t, g, u, v, theta),
        norm_u=float(u @ g @ u),
        norm_v=float(v @ g @ v),
        ortho=float(u @ g @ v),
    )


@dataclass(frozen=True)
class KKTPoint:
    """A converged Newton solution before the lambda = mu filter."""

    u: np.ndarray
    v: np.ndarray
    lam: float
    mu: float
    nu: float
    residual_norm: float


def _kkt_points(t: np.ndarray, g: np.ndarray, opts: SolveOptions) -> list[KKTPoint]:
    system = _KKT(t, g, opts.sigma_u, opts.sigma_v, ortho=opts.modified)
    seeds = np.random.SeedSequence(opts.seed).spawn(opts.starts)
    out = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        u = _initial_vector(rng, g, opts.sigma_u)
        v = _initial_vector(rng, g, opts.sigma_v)
        if u is None or v is None:
            continue
        lam = _contract3(t, u, v, u) @ v * opts.sigma_v
        mu = _contract3(t, v, u, v) @ u * opts.sigma_u
        z0 = np.concatenate([u, v, [lam, mu], [0.0] if opts.modified else []])
        z, norm = _newton(system, z0, opts.tol, opts.max_iter)
        if not norm < opts.tol:
            continue
        u, v, lam, mu, nu = system.split(z)
        out.append(KKTPoint(u.copy(), v.copy(), float(lam), float(mu), float(nu), float(norm)))
    return out


def _solve(t: np.ndarray, g: np.ndarray, opts: SolveOptions) -> list[MEigenpair]:
    found = []
    for k in _kkt_points(t, g, opts):
        if abs(k.lam - k.mu) >= CLASSIFY_TOL or abs(k.nu) >= CLASSIFY_TOL:
            continue
        pair = _make_pair(t, g, k.u, k.v, k.lam, k.mu)
        if opts.modified and abs(pair.ortho) >= CLASSIFY_TOL:
            continue
        if not pair.residual < opts.tol:
            continue
        found.append(pair)
    return dedupe(found, opts.dedupe_tol)


def kkt_points(rt: RiemannTensor, opts: SolveOptions | None = None) -> list[KKTPoint]:
    """Every converged start of the Newton search, unfiltered.

    Useful for inspecting solutions with lambda != mu, which appear when
    g(u,u) and g(v,v) have opposite signs (there lambda = -mu).
    """
    return _kkt_points(rt.r_down, rt.g, opts or SolveOptions())


def solve_meig(rt: RiemannTensor, opts: SolveOptions | None = None) -> list[MEigenpair]:
    """Multi-start Newton search for (modified) M-eigenpairs of ``rt``.

    Returns the distinct converged pairs sorted by theta; an empty list
    means no start converged. Completeness is not guaranteed.
    """
    return _solve(rt.r_down, rt.g, opts or SolveOptions())


def elasticity_meig(e: ElasticityTensor, opts: SolveOptions | None = None) -> list[MEigenpair]:
    """M-eigenpairs E_ijkl y^j x^k y^l = theta x_i, E_ijkl x^i y^j x^k = theta y_l.

    Unit Euclidean constraints; the returned ``u`` is x and ``v`` is y.
    """
    opts = opts or SolveOptions()
    if opts.sigma_u != 1 or opts.sigma_v != 1:
        opts = replace(opts, sigma_u=1, sigma_v=1)
    return _solve(e.e, np.eye(3), opts)


# --------------------------------------------------------------------------
# Deduplication
# --------------------------------------------------------------------------


def _canonical(pair: MEigenpair) -> MEigenpair:
    u = _canonical_sign(pair.u)
    v = _canonical_sign(pair.v)
    if tuple(np.round(v, 9)) < tuple(np.round(u, 9)):
        u, v = v, u
    return replace(pair, u=u, v=v)


def dedupe(pairs: Iterable[MEigenpair], tol: float = 1e-6) -> list[MEigenpair]:
    """Merge pairs equal modulo (+-u, +-v), (+-v, +-u) and |d theta| < tol.

    Representatives have the first nonzero entry of u and of v positive and
    u <= v lexicographically. Output is sorted by theta, then by (u, v).
    """
    canon = sorted(
        (_canonical(p) for p in pairs),
        key=lambda p: (p.theta, tuple(np.round(p.u, 9)), tuple(np.round(p.v, 9))),
    )
    kept: list[MEigenpair] = []
    for p in canon:
        for k, q in enumerate(kept):
            if abs(p.theta - q.theta) < tol and _same_vectors(p, q, tol):
                if p.residual < q.residual:
                    kept[k] = p
                break
        else:
            kept.append(p)
    kept.sort(key=lambda p: (p.theta, tuple(np.round(p.u, 9)), tuple(np.round(p.v, 9))))
    return kept


def _same_vectors(p: MEigenpair, q: MEigenpair, tol: float) -> bool:
    scale = max(1.0, float(np.max(np.abs(p.u))), float(np.max(np.abs(p.v))))
    lim = tol * scale
    return bool(np.max(np.abs(p.u - q.u)) < lim and np.max(np.abs(p.v - q.v)) < lim)


def distinct_thetas(pairs: Sequence[MEigenpair], tol: float = 1e-6) -> list[float]:
    """Sorted M-eigenvalues with values closer than ``tol`` merged."""
    out: list[float] = []
    for theta in sorted(p.theta for p in pairs):
        if not out or theta - out[-1] >= tol:
            out.append(theta)
    return out


# --------------------------------------------------------------------------
# Elasticity: classical eigentensors and the zeta = 2 theta bridge
# --------------------------------------------------------------------------


def _sym_basis() -> list[np.ndarray]:
    basis = []
    for i in range(3):
        m = np.zeros((3, 3))
        m[i, i] = 1.0
        basis.append(m)
    for i, j in ((1, 2), (2, 0), (0, 1)):
        m = np.zeros((3, 3))
        m[i, j] = m[j, i] = 1.0 / math.sqrt(2.0)
        basis.append(m)
    return basis


@dataclass(frozen=True)
class SymmetricEigenpair:
    zeta: float
    z: np.ndarray = field(repr=False)


def elasticity_classical_eigen(e: ElasticityTensor) -> list[SymmetricEigenpair]:
    """Eigenpairs of E_ijkl z^kl = zeta z_ij over symmetric z (unit Frobenius norm)."""
    basis = _sym_basis()
    k = np.array([[np.einsum("ij,ijkl,kl->", a, e.e, b) for b in basis] for a in basis])
    values, vecs = np.linalg.eigh(0.5 * (k + k.T))
    return [
        SymmetricEigenpair(float(values[c]), sum(vecs[a, c] * basis[a] for a in range(6)))
        for c in range(6)
    ]


def decompose_symmetric(z: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray] | None:
    """Write z = c (x y^T + y x^T) with x, y orthonormal, or return None.

    Such z have eigenvalues (-c, 0, c); x = (p + q)/sqrt 2, y = (p - q)/sqrt 2
    from the eigenvectors p (for c) and q (for -c).
    """
    w, vecs = np.linalg.eigh(0.5 * (z + z.T))
    scale = float(np.max(np.abs(w)))
    if scale == 0.0 or abs(w[0] + w[2]) > tol * scale or abs(w[1]) > tol * scale:
        return None
    p, q = vecs[:, 2], vecs[:, 0]
    return (p + q) / math.sqrt(2.0), (p - q) / math.sqrt(2.0)


def elasticity_residual(e: ElasticityTensor, x, y, theta: float) -> float:
    return _residual(e.e, np.eye(3), np.asarray(x, float), np.asarray(y, float), theta)
