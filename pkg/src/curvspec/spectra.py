"""Pair-index pencil (R_AB, G_AB) and the classical curvature eigenproblem.

An antisymmetric tensor x^ij is stored by its components on a list of
index pairs A = (i, j), one per unordered pair. The eigenproblem
R_ijkl x^kl = zeta x_ij then reads R_AB x^B = (zeta / 2) G_AB x^B with
G_AB = g_ik g_jl - g_il g_jk.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateMetric, DegeneratePencil, WrongDimension
from .geometry import MetricJet, RiemannTensor, invariants

__all__ = [
    "PairBasis",
    "Pencil",
    "ClassicalEigenpair",
    "VacuumBlockReport",
    "pair_basis",
    "assemble_pencil",
    "classical_eigen",
    "orthonormal_frame",
    "frame_components",
    "vacuum_block_check",
    "bivector_matrix",
    "decompose_bivector",
]

# 10, 20, 30, 23, 31, 12 for spacetime
_PAIRS_4D = ((1, 0), (2, 0), (3, 0), (2, 3), (3, 1), (1, 2))


@dataclass(frozen=True)
class PairBasis:
    n: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)


@lru_cache(maxsize=None)
def pair_basis(n: int) -> PairBasis:
    """Ordered pair basis; for n = 4 the order is 10, 20, 30, 23, 31, 12."""
    if n < 2:
        raise WrongDimension(f"pair basis needs n >= 2, got {n}")
    if n == 4:
        return PairBasis(4, _PAIRS_4D)
    return PairBasis(n, tuple((i, j) for i in range(1, n) for j in range(i)))


@dataclass(frozen=True)
class Pencil:
    r_ab: np.ndarray
    g_ab: np.ndarray
    basis: PairBasis


@dataclass(frozen=True)
class ClassicalEigenpair:
    zeta: complex
    x: np.ndarray
    residual: float


@dataclass(frozen=True)
class VacuumBlockReport:
    """Block structure of R_AB in an orthonormal frame (n = 4).

    ``R_AB = [[M, N], [N^T, W]]``. Lorentzian Einstein spaces satisfy
    W = -M, N = N^T, tr N = 0, tr M = -kappa with R_ij = kappa g_ij.
    ``duality_sign`` is the product of the frame signs; the residuals are
    taken against W = duality_sign * M and tr M = duality_sign * kappa so
    Riemannian Einstein metrics (W = M, tr M = kappa) are handled too.
    """

    m_block: np.ndarray
    n_block: np.ndarray
    w_block: np.ndarray
    signs: np.ndarray
    duality_sign: int
    kappa: float
    max_structure_residual: float
    trace_n: float
    trace_m_plus_kappa: float
    einstein_residual: float


def assemble_pencil(rt: RiemannTensor) -> Pencil:
    basis = pair_basis(rt.n)
    idx = np.array(basis.pairs)
    i, j = idx[:, 0], idx[:, 1]
    r_ab = rt.r_down[i[:, None], j[:, None], i[None, :], j[None, :]]
    g = rt.g
    g_ab = g[i[:, None], i[None, :]] * g[j[:, None], j[None, :]] - g[i[:, None], j[None, :]] * g[j[:, None], i[None, :]]
    return Pencil(0.5 * (r_ab + r_ab.T), g_ab, basis)


def classical_eigen(p: Pencil) -> list[ClassicalEigenpair]:
    """Solve R_AB x = (zeta/2) G_AB x; zeta may be complex for indefinite G."""
    m = p.basis.size
    scale = float(np.max(np.abs(p.g_ab)))
    det = float(np.linalg.det(p.g_ab))
    if scale == 0.0 or abs(det) < 1e-12 * scale**m:
        raise DegeneratePencil(f"G_AB is singular (det={det:g})")
    op = np.linalg.solve(p.g_ab, p.r_ab)
    values, vectors = np.linalg.eig(op)
    out = []
    for k in range(m):
        zeta = 2.0 * values[k]
        x = vectors[:, k]
        res = float(np.linalg.norm(p.r_ab @ x - 0.5 * zeta * (p.g_ab @ x)))
        if abs(zeta.imag) == 0.0:
            zeta = complex(zeta.real, 0.0)
        out.append(ClassicalEigenpair(complex(zeta), _real_if_close(x), res))
    out.sort(key=lambda e: (e.zeta.real, e.zeta.imag))
    return out


def _real_if_close(x: np.ndarray) -> np.ndarray:
    if not np.iscomplexobj(x):
        return x
    # rotate the phase so the largest entry is real
    k = int(np.argmax(np.abs(x)))
    y = x * np.exp(-1j * np.angle(x[k]))
    if np.max(np.abs(y.imag)) <= 1e-12 * np.max(np.abs(y)):
        return y.real.copy()
    return x


def orthonormal_frame(jet: MetricJet | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Frame e (columns e_a) with e^T g e = diag(s), s_a = +-1, negatives first.

    Within each sign group the frame vectors are ordered by their dominant
    coordinate axis, so diagonal metrics keep their coordinate order.
    """
    g = jet.g if isinstance(jet, MetricJet) else np.asarray(jet, dtype=float)
    values, vecs = np.linalg.eigh(g)
    scale = float(np.max(np.abs(values)))
    if scale == 0.0 or np.min(np.abs(values)) < 1e-12 * scale:
        raise DegenerateMetric("metric has a (near-)zero eigenvalue")
    axis = np.argmax(np.abs(vecs), axis=0)
    order = sorted(range(len(values)), key=lambda k: (values[k] > 0, axis[k], values[k]))
    values = values[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        if vecs[np.argmax(np.abs(vecs[:, k])), k] < 0:
            vecs[:, k] = -vecs[:, k]
    e = vecs / np.sqrt(np.abs(values))
    return e, np.sign(values)


def frame_components(rt: RiemannTensor, e: np.ndarray) -> np.ndarray:
    """R_abcd = R_ijkl e^i_a e^j_b e^k_c e^l_d."""
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", rt.r_down, e, e, e, e, optimize=True)


def vacuum_block_check(rt: RiemannTensor) -> VacuumBlockReport:
    if rt.n != 4:
        raise WrongDimension(f"vacuum block check needs n = 4, got n = {rt.n}")
    e, s = orthonormal_frame(rt.metric_jet)
    rf = frame_components(rt, e)
    basis = pair_basis(4)
    idx = np.array(basis.pairs)
    i, j = idx[:, 0], idx[:, 1]
    r_ab = rf[i[:, None], j[:, None], i[None, :], j[None, :]]
    m_blk, n_blk = r_ab[:3, :3], r_ab[:3, 3:]
    n_low, w_blk = r_ab[3:, :3], r_ab[3:, 3:]
    eps = int(np.prod(s))

    inv = invariants(rt)
    ricci_frame = e.T @ inv.ricci @ e
    kappa = inv.scalar / 4.0
    einstein = ricci_frame - kappa * np.diag(s)

    scale = float(np.max(np.abs(r_ab)))
    if scale == 0.0:
        scale = 1.0
    structure = max(
        np.max(np.abs(w_blk - eps * m_blk)),
        np.max(np.abs(n_blk - n_blk.T)),
        np.max(np.abs(n_low - n_blk)),
        np.max(np.abs(m_blk - m_blk.T)),
    )
    return VacuumBlockReport(
        m_block=m_blk,
        n_block=n_blk,
        w_block=w_blk,
        signs=s,
        duality_sign=eps,
        kappa=kappa,
        max_structure_residual=float(structure) / scale,
        trace_n=float(np.trace(n_blk)),
        trace_m_plus_kappa=float(np.trace(m_blk) - eps * kappa),
        einstein_residual=float(np.max(np.abs(einstein))),
    )


def bivector_matrix(x: np.ndarray, basis: PairBasis) -> np.ndarray:
    """Antisymmetric n x n matrix X^ij from pair components x^A."""
    X = np.zeros((basis.n, basis.n), dtype=np.result_type(x, float))
    for a, (i, j) in enumerate(basis.pairs):
        X[i, j] = x[a]
        X[j, i] = -x[a]
    return X


def decompose_bivector(
    x: np.ndarray, basis: PairBasis, g: np.ndarray, tol: float = 1e-8
) -> tuple[np.ndarray, np.ndarray] | None:
    """Write x^ij = c (u^i v^j - v^i u^j) with g(u,v) = 0 and |g(u,u)| = |g(v,v)| = 1.

    Returns ``(u, v)`` or ``None`` when x is complex, not of rank two (third
    singular value above ``tol`` relative to the first), or spans a null plane.
    """
    if np.iscomplexobj(x):
        return None
    X = bivector_matrix(np.asarray(x, dtype=float), basis)
    U, sv, _ = np.linalg.svd(X)
    if sv[0] == 0.0:
        return None
    if len(sv) > 2 and sv[2] > tol * sv[0]:
        return None
    a, b = U[:, 0], U[:, 1]
    gaa = a @ g @ a
    if abs(gaa) < 1e-12:
        a, b = b, a
        gaa = a @ g @ a
    if abs(gaa) < 1e-12:
        a, b = a + b, a - b
        gaa = a @ g @ a
        if abs(gaa) < 1e-12:
            return None
    u = a / np.sqrt(abs(gaa))
    v = b - np.sign(gaa) * (u @ g @ b) * u
    gvv = v @ g @ v
    if abs(gvv) < 1e-12:
        return None
    v = v / np.sqrt(abs(gvv))
    return u, v
