"""Metric jets, Christoffel symbols and curvature tensors at a point.

Index conventions (0-based, coordinate order as declared):

* ``dg[i, j, k] = d_k g_ij`` and ``d2g[i, j, k, m] = d_k d_m g_ij``
* ``gamma[i, j, k] = Gamma^i_jk`` and ``dgamma[i, j, k, m] = d_m Gamma^i_jk``
* ``r_up[l, k, i, j] = R^l_kij`` with ``R(d_i, d_j) d_k = R^l_kij d_l``
* ``r_down[i, j, k, l] = R_ijkl = g_ih R^h_jkl``

With these conventions ``R(u, v, u, v) = R_ijkl u^i v^j u^k v^l`` is the
sectional curvature of an orthonormal pair, positive on the round sphere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Mapping, Sequence

import numpy as np

from .errors import DegeneratePlane, InputError, SingularPoint
from .expr import Expression, eval_grad, eval_jet2, evaluate, parse

__all__ = [
    "MetricSpec",
    "MetricJet",
    "ChristoffelJet",
    "RiemannTensor",
    "CurvatureInvariants",
    "SymmetryReport",
    "metric_at",
    "christoffel",
    "riemann",
    "invariants",
    "sectional",
    "check_symmetries",
    "metric_from_dict",
    "metric_to_dict",
    "load_metric",
    "dump_metric",
]

DEGENERACY_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Metric field g_ij(x) given by DSL expressions.

    ``components`` is the full symmetric n x n table; ``None`` marks an
    identically zero entry. Build instances with :meth:`from_strings`.
    """

    name: str
    coords: tuple[str, ...]
    components: tuple[tuple[Expression | None, ...], ...]
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.coords)
        if n < 2:
            raise InputError("a metric needs at least two coordinates")
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise InputError(f"components must be a {n}x{n} table")
        for i in range(n):
            for j in range(i):
                if self.components[i][j] is not self.components[j][i]:
                    raise InputError(f"components ({i},{j}) and ({j},{i}) differ")

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def from_strings(
        cls,
        name: str,
        coords: Sequence[str],
        components: Mapping[tuple[int, int], str],
        params: Mapping[str, float] | None = None,
    ) -> "MetricSpec":
        """Build a spec from ``{(i, j): source}``; either triangle may be given."""
        coords = tuple(coords)
        params = dict(params or {})
        n = len(coords)
        table: list[list[Expression | None]] = [[None] * n for _ in range(n)]
        for (i, j), source in components.items():
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"component index ({i},{j}) out of range for n={n}")
            lo, hi = max(i, j), min(i, j)
            if table[lo][hi] is not None:
                raise InputError(f"component ({lo},{hi}) given twice")
            try:
                expr = parse(str(source), coords, params)
            except InputError as exc:
                exc.args = (f"component {i},{j}: {exc}",)
                raise
            table[lo][hi] = table[hi][lo] = expr
        return cls(name, coords, tuple(tuple(row) for row in table), params)

    @classmethod
    def diagonal(
        cls, name: str, coords: Sequence[str], diag: Sequence[str], params=None
    ) -> "MetricSpec":
        return cls.from_strings(name, coords, {(k, k): s for k, s in enumerate(diag)}, params)

    def with_params(self, **overrides: float) -> "MetricSpec":
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise InputError(f"unknown parameters {sorted(unknown)} for metric {self.name!r}")
        params = {**self.params, **overrides}
        return MetricSpec.from_strings(self.name, self.coords, self.source_components(), params)

    def source_components(self) -> dict[tuple[int, int], str]:
        return {
            (i, j): str(self.components[i][j])
            for i in range(self.n)
            for j in range(i + 1)
            if self.components[i][j] is not None
        }


@dataclass(frozen=True)
class MetricJet:
    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    det: float
    dg: np.ndarray
    d2g: np.ndarray | None


@dataclass(frozen=True)
class ChristoffelJet:
    gamma: np.ndarray
    dgamma: np.ndarray | None


@dataclass(frozen=True)
class SymmetryReport:
    """Residuals of the algebraic curvature identities, scaled by max|R|."""

    antisym_first: float
    antisym_second: float
    pair_exchange: float
    double_swap: float
    bianchi: float

    def as_dict(self) -> dict[str, float]:
        return {
            "antisym_first": self.antisym_first,
            "antisym_second": self.antisym_second,
            "pair_exchange": self.pair_exchange,
            "double_swap": self.double_swap,
            "bianchi": self.bianchi,
        }

    @property
    def max(self) -> float:
        return max(self.as_dict().values())


@dataclass(frozen=True)
class RiemannTensor:
    r_up: np.ndarray
    r_down: np.ndarray
    metric_jet: MetricJet
    christoffel: ChristoffelJet | None = None
    symmetry: SymmetryReport | None = None

    @property
    def n(self) -> int:
        return self.r_down.shape[0]

    @property
    def g(self) -> np.ndarray:
        return self.metric_jet.g


@dataclass(frozen=True)
class CurvatureInvariants:
    ricci: np.ndarray
    scalar: float
    kretschmann: float


def _point_array(spec: MetricSpec, point: Sequence[float]) -> np.ndarray:
    x = np.asarray(point, dtype=float)
    if x.shape != (spec.n,):
        raise InputError(f"point must have {spec.n} coordinates, got shape {x.shape}")
    return x


def metric_at(spec: MetricSpec, point: Sequence[float], order: int = 2) -> MetricJet:
    """Evaluate g, its inverse and determinant, and derivatives up to ``order``.

    Raises :class:`SingularPoint` when any component is non-finite or
    ``|det g| < 1e-12 * (max row norm)^n``.
    """
    x = _point_array(spec, point)
    n = spec.n
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n)) if order >= 2 else None
    for i in range(n):
        for j in range(i + 1):
            expr = spec.components[i][j]
            if expr is None:
                continue
            if expr.constant or order == 0:
                g[i, j] = g[j, i] = evaluate(expr, x, warn=False)
            elif order >= 2:
                jet = eval_jet2(expr, x, warn=False)
                g[i, j] = g[j, i] = jet.value
                dg[i, j] = dg[j, i] = jet.grad
                d2g[i, j] = d2g[j, i] = jet.hess
            else:
                value, grad = eval_grad(expr, x, warn=False)
                g[i, j] = g[j, i] = value
                dg[i, j] = dg[j, i] = grad
    finite = np.isfinite(g).all() and np.isfinite(dg).all()
    if d2g is not None:
        finite = finite and np.isfinite(d2g).all()
    if not finite:
        raise SingularPoint(f"metric {spec.name!r} is not finite at {x.tolist()}")
    det, adj = _det_adjugate(g)
    scale = float(np.sqrt((g * g).sum(axis=1)).max())
    if scale == 0.0 or abs(det) < DEGENERACY_THRESHOLD * scale**n:
        raise SingularPoint(f"metric {spec.name!r} is degenerate at {x.tolist()} (det={det:g})")
    g_inv = adj / det
    return MetricJet(x, g, g_inv, det, dg, d2g)


def _det_adjugate(g: np.ndarray) -> tuple[float, np.ndarray]:
    """Determinant and adjugate of a small symmetric matrix by cofactors."""
    n = g.shape[0]
    if n == 2:
        a, b, d = g[0, 0], g[0, 1], g[1, 1]
        return float(a * d - b * b), np.array([[d, -b], [-b, a]])
    if n == 3:
        c0, c1, c2 = g[0], g[1], g[2]
        adj = np.array([np.cross(c1, c2), np.cross(c2, c0), np.cross(c0, c1)]).T
        det = float(c0 @ adj[:, 0])
        adj = 0.5 * (adj + adj.T)
        return det, adj
    det = float(np.linalg.det(g))
    inv = np.linalg.inv(g) if det != 0.0 else np.full_like(g, np.nan)
    return det, 0.5 * (inv + inv.T) * det


def christoffel(jet: MetricJet) -> ChristoffelJet:
    """Christoffel symbols of the Levi-Civita connection and their derivatives."""
    g_inv, dg, d2g = jet.g_inv, jet.dg, jet.d2g
    # lowered symbols Gamma_hjk = (d_k g_hj + d_j g_hk - d_h g_jk) / 2
    low = 0.5 * (dg + dg.transpose(0, 2, 1) - dg.transpose(2, 0, 1))
    n = g_inv.shape[0]
    gamma = (g_inv @ low.reshape(n, n * n)).reshape(n, n, n)
    if d2g is None:
        return ChristoffelJet(gamma, None)
    # d_m g^ih = -g^ia (d_m g_ab) g^bh
    dg_inv = -(g_inv @ dg.transpose(2, 0, 1) @ g_inv)  # indexed [m, i, h]
    dlow = 0.5 * (d2g + d2g.transpose(0, 2, 1, 3) - d2g.transpose(2, 0, 1, 3))
    dgamma = (dg_inv @ low.reshape(n, n * n)).reshape(n, n, n, n).transpose(1, 2, 3, 0)
    dgamma += (g_inv @ dlow.reshape(n, -1)).reshape(n, n, n, n)
    return ChristoffelJet(gamma, dgamma)


def _riemann_up(ch: ChristoffelJet) -> np.ndarray:
    gamma, dgamma = ch.gamma, ch.dgamma
    # R^l_kij = d_i G^l_jk - d_j G^l_ik + G^h_jk G^l_ih - G^h_ik G^l_jh
    deriv = dgamma.transpose(0, 2, 3, 1) - dgamma.transpose(0, 2, 1, 3)
    n = gamma.shape[0]
    # quad[l, k, i, j] = G^h_jk G^l_ih
    quad = (gamma.reshape(n * n, n) @ gamma.reshape(n, n * n)).reshape(n, n, n, n).transpose(0, 3, 1, 2)
    return deriv + quad - quad.transpose(0, 1, 3, 2)


def riemann(spec: MetricSpec, point: Sequence[float]) -> RiemannTensor:
    """Riemann tensor in (1,3) and (0,4) form with its symmetry report."""
    jet = metric_at(spec, point)
    ch = christoffel(jet)
    r_up = _riemann_up(ch)
    r_down = np.einsum("ih,hjkl->ijkl", jet.g, r_up)
    rt = RiemannTensor(r_up, r_down, jet, ch)
    return RiemannTensor(r_up, r_down, jet, ch, check_symmetries(rt))


def from_components(r_down: np.ndarray, g: np.ndarray) -> RiemannTensor:
    """Wrap a hand-made (0,4) tensor and constant metric as a RiemannTensor."""
    r_down = np.asarray(r_down, dtype=float)
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    g_inv = np.linalg.inv(g)
    jet = MetricJet(np.zeros(n), g, g_inv, float(np.linalg.det(g)), np.zeros((n,) * 3), np.zeros((n,) * 4))
    r_up = np.einsum("hi,ijkl->hjkl", g_inv, r_down)
    rt = RiemannTensor(r_up, r_down, jet)
    return RiemannTensor(r_up, r_down, jet, None, check_symmetries(rt))


def invariants(rt: RiemannTensor) -> CurvatureInvariants:
    """Ricci tensor R_ik = g^hj R_hijk, scalar curvature and Kretschmann scalar."""
    g_inv = rt.metric_jet.g_inv
    ricci = np.einsum("hj,hijk->ik", g_inv, rt.r_down)
    scalar = float(np.einsum("ik,ik->", g_inv, ricci))
    r_all_up = np.einsum("ai,bj,ck,dl,ijkl->abcd", g_inv, g_inv, g_inv, g_inv, rt.r_down, optimize=True)
    kretschmann = float(np.einsum("abcd,abcd->", rt.r_down, r_all_up))
    return CurvatureInvariants(ricci, scalar, kretschmann)


def wedge_norm2(g: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """|u ^ v|^2 = g(u,u) g(v,v) - g(u,v)^2 (negative for timelike planes)."""
    guu = u @ g @ u
    gvv = v @ g @ v
    guv = u @ g @ v
    return float(guu * gvv - guv * guv)


def sectional(rt: RiemannTensor, u: Sequence[float], v: Sequence[float]) -> float:
    """Sectional curvature R(u,v,u,v) / |u ^ v|^2 of the plane span{u, v}."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    area2 = wedge_norm2(rt.g, u, v)
    if abs(area2) <= DEGENERACY_THRESHOLD:
        raise DegeneratePlane(f"|u ^ v|^2 = {area2:g} does not span a plane")
    q = np.einsum("ijkl,i,j,k,l->", rt.r_down, u, v, u, v)
    return float(q / area2)


def check_symmetries(rt: RiemannTensor) -> SymmetryReport:
    r = rt.r_down
    scale = float(np.max(np.abs(r)))
    if scale == 0.0 or not math.isfinite(scale):
        scale = 1.0

    def res(a: np.ndarray) -> float:
        return float(np.max(np.abs(a))) / scale

    return SymmetryReport(
        antisym_first=res(r + r.transpose(1, 0, 2, 3)),
        antisym_second=res(r + r.transpose(0, 1, 3, 2)),
        pair_exchange=res(r - r.transpose(2, 3, 0, 1)),
        double_swap=res(r - r.transpose(1, 0, 3, 2)),
        # R_ijkl + R_iljk + R_iklj
        bianchi=res(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)),
    )


# --------------------------------------------------------------------------
# Metric file format (JSON)
# --------------------------------------------------------------------------


def metric_to_dict(spec: MetricSpec) -> dict:
    return {
        "name": spec.name,
        "coords": list(spec.coords),
        "params": dict(spec.params),
        "components": {f"{i},{j}": s for (i, j), s in spec.source_components().items()},
    }


def metric_from_dict(data: Mapping) -> MetricSpec:
    """Build a MetricSpec from the decoded metric-file document.

    Required keys: ``coords`` and ``components`` (``"i,j" -> expression``,
    lower triangle; omitted entries are zero). Optional: ``name``, ``params``.
    """
    for key in ("coords", "components"):
        if key not in data:
            raise InputError(f"metric document is missing field {key!r}")
    unknown = set(data) - {"name", "coords", "params", "components"}
    if unknown:
        raise InputError(f"metric document has unknown fields {sorted(unknown)}")
    components = {}
    for key, source in dict(data["components"]).items():
        try:
            i, j = (int(part) for part in str(key).split(","))
        except ValueError:
            raise InputError(f"bad component key {key!r}; expected 'i,j'") from None
        components[(i, j)] = source
    params = {str(k): float(v) for k, v in dict(data.get("params", {})).items()}
    return MetricSpec.from_strings(
        str(data.get("name", "metric")), [str(c) for c in data["coords"]], components, params
    )


def load_metric(path: str | PathLike) -> MetricSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from None
    return metric_from_dict(data)


def dump_metric(spec: MetricSpec, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metric_to_dict(spec), fh, indent=2)
        fh.write("\n")
