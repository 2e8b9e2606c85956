"""Built-in metrics with closed-form curvature values for checking the pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import BadParams, UnknownCase, WrongDimension
from .geometry import MetricSpec, RiemannTensor, invariants, riemann
from .meig import SolveOptions, meig_residual, solve_meig
from .spectra import orthonormal_frame

__all__ = [
    "CatalogEntry",
    "CheckRow",
    "CheckReport",
    "RicciTriple",
    "builtin",
    "catalog_names",
    "run_checks",
    "default_catalog",
    "ricci_reconstruction",
    "ricci_triples",
]

Oracle = Callable[[np.ndarray], object]


@dataclass(frozen=True)
class CatalogEntry:
    spec: MetricSpec
    oracles: Mapping[str, Oracle]
    default_point: tuple[float, ...]
    sampler: Callable[[np.random.Generator], np.ndarray] = field(repr=False)

    @property
    def name(self) -> str:
        return self.spec.name

    def sample_points(self, count: int, seed: int = 0) -> list[np.ndarray]:
        rng = np.random.default_rng(seed)
        return [self.sampler(rng) for _ in range(count)]


def _coord_names(n: int) -> list[str]:
    return ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{k}" for k in range(1, n + 1)]


def _positive(name: str, value: float) -> float:
    if not value > 0 or not math.isfinite(value):
        raise BadParams(f"parameter {name} must be positive, got {value!r}")
    return float(value)


def _dimension(value: float, low: int = 2) -> int:
    n = int(value)
    if n != value or n < low:
        raise BadParams(f"dimension n must be an integer >= {low}, got {value!r}")
    return n


def _const(value: float) -> Oracle:
    return lambda x: value


def _euclidean(n: float = 3) -> CatalogEntry:
    n = _dimension(n)
    spec = MetricSpec.diagonal(f"euclidean{n}", _coord_names(n), ["1"] * n, {})
    oracles = {
        "scalar_R": _const(0.0),
        "kretschmann": _const(0.0),
        "constant_kappa": _const(0.0),
        "ricci_eigenvalues": _const([0.0] * n),
        "meig_values": _const([0.0]),
    }
    if n == 2:
        oracles["gaussian_K"] = _const(0.0)
    return CatalogEntry(spec, oracles, (0.0,) * n, lambda rng: rng.uniform(-2, 2, n))


def _sphere2(a: float = 1.0) -> CatalogEntry:
    a = _positive("a", a)
    spec = MetricSpec.diagonal("sphere2", ["theta", "phi"], ["a^2", "a^2*sin(theta)^2"], {"a": a})
    k = 1.0 / a**2
    oracles = {
        "gaussian_K": _const(k),
        "scalar_R": _const(2 * k),
        "constant_kappa": _const(k),
        "kretschmann": _const(4 * k * k),
        "ricci_eigenvalues": _const([k, k]),
        "meig_values": _const([k]),
    }
    return CatalogEntry(
        spec, oracles, (math.pi / 3, 0.0), lambda rng: np.array([rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)])
    )


def _hyperbolic2(a: float = 1.0) -> CatalogEntry:
    a = _positive("a", a)
    spec = MetricSpec.diagonal("hyperbolic2", ["x", "y"], ["a^2/y^2", "a^2/y^2"], {"a": a})
    k = -1.0 / a**2
    oracles = {
        "gaussian_K": _const(k),
        "scalar_R": _const(2 * k),
        "constant_kappa": _const(k),
        "kretschmann": _const(4 * k * k),
        "ricci_eigenvalues": _const([k, k]),
        "meig_values": _const([k]),
    }
    return CatalogEntry(spec, oracles, (0.0, 2.0), lambda rng: np.array([rng.uniform(-2, 2), rng.uniform(0.5, 3)]))


def _sphere3(a: float = 1.0) -> CatalogEntry:
    a = _positive("a", a)
    spec = MetricSpec.diagonal(
        "sphere3", ["chi", "theta", "phi"], ["a^2", "a^2*sin(chi)^2", "a^2*sin(chi)^2*sin(theta)^2"], {"a": a}
    )
    k = 1.0 / a**2
    oracles = {
        "scalar_R": _const(6 * k),
        "constant_kappa": _const(k),
        "kretschmann": _const(12 * k * k),
        "ricci_eigenvalues": _const([2 * k] * 3),
        "meig_values": _const([k]),
    }
    return CatalogEntry(
        spec,
        oracles,
        (1.0, math.pi / 3, 0.0),
        lambda rng: np.array([rng.uniform(0.3, math.pi - 0.3), rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)]),
    )


def _constant_curvature_form(n: float = 3, kappa: float = 1.0) -> CatalogEntry:
    """Conformally flat space form g = delta / (1 + kappa |x|^2 / 4)^2."""
    n = _dimension(n)
    kappa = float(kappa)
    coords = _coord_names(n)
    radius2 = " + ".join(f"{c}^2" for c in coords)
    comp = f"1/(1 + kappa*({radius2})/4)^2"
    spec = MetricSpec.diagonal(f"constant_curvature{n}", coords, [comp] * n, {"kappa": kappa})
    oracles = {
        "scalar_R": _const(n * (n - 1) * kappa),
        "constant_kappa": _const(kappa),
        "kretschmann": _const(2 * n * (n - 1) * kappa**2),
        "ricci_eigenvalues": _const([(n - 1) * kappa] * n),
        "meig_values": _const([kappa]),
    }
    if n == 2:
        oracles["gaussian_K"] = _const(kappa)
    # stay well inside the chart when kappa < 0 (|x|^2 < 4/|kappa|)
    reach = 0.8 if kappa >= 0 else min(0.8, 0.5 / math.sqrt(n * abs(kappa)))
    return CatalogEntry(spec, oracles, (0.1,) * n, lambda rng: rng.uniform(-reach, reach, n))


_SCHWARZSCHILD_COORDS = ["t", "r", "theta", "phi"]


def _schwarzschild(rs: float = 2.0, c: float = 1.0) -> CatalogEntry:
    rs = _positive("rs", rs)
    c = _positive("c", c)
    spec = MetricSpec.diagonal(
        "schwarzschild",
        _SCHWARZSCHILD_COORDS,
        ["-(1 - rs/r)*c^2", "1/(1 - rs/r)", "r^2", "r^2*sin(theta)^2"],
        {"rs": rs, "c": c},
    )
    oracles = {
        "scalar_R": _const(0.0),
        "ricci_eigenvalues": _const([0.0] * 4),
        "kretschmann": lambda x: 12.0 * (rs / x[1] ** 3) ** 2,
        "meig_values": lambda x: [-rs / (2.0 * x[1] ** 3)],
    }
    return CatalogEntry(
        spec,
        oracles,
        (0.0, 1.5 * rs, math.pi / 4, 0.0),
        lambda rng: np.array(
            [rng.uniform(-1, 1), rs * rng.uniform(1.2, 3.0), rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)]
        ),
    )


def _reissner_nordstrom(rs: float = 2.0, rq: float = 0.5, c: float = 1.0) -> CatalogEntry:
    rs = _positive("rs", rs)
    c = _positive("c", c)
    rq = float(rq)
    if rq < 0 or 2 * rq > rs:
        raise BadParams(f"need 0 <= rq <= rs/2 for a black hole exterior, got rq={rq!r}")
    f = "(1 - rs/r + rq^2/r^2)"
    spec = MetricSpec.diagonal(
        "reissner_nordstrom",
        _SCHWARZSCHILD_COORDS,
        [f"-{f}*c^2", f"1/{f}", "r^2", "r^2*sin(theta)^2"],
        {"rs": rs, "rq": rq, "c": c},
    )
    horizon = 0.5 * (rs + math.sqrt(rs * rs - 4 * rq * rq))
    return CatalogEntry(
        spec,
        {"scalar_R": _const(0.0)},
        (0.0, 1.5 * rs, math.pi / 4, 0.0),
        lambda rng: np.array(
            [rng.uniform(-1, 1), horizon * rng.uniform(1.2, 3.0), rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)]
        ),
    )


def _perturbed3() -> CatalogEntry:
    """diag(1 + r^2, r^2, r^2 sin^2 theta): curved, not of constant curvature."""
    spec = MetricSpec.diagonal("perturbed3", ["r", "theta", "phi"], ["1 + r^2", "r^2", "r^2*sin(theta)^2"], {})
    return CatalogEntry(
        spec,
        {},
        (1.0, math.pi / 3, 0.0),
        lambda rng: np.array([rng.uniform(0.5, 2.0), rng.uniform(0.3, math.pi - 0.3), rng.uniform(0, 2 * math.pi)]),
    )


_BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "euclidean": _euclidean,
    "sphere2": _sphere2,
    "hyperbolic2": _hyperbolic2,
    "sphere3": _sphere3,
    "constant_curvature_form": _constant_curvature_form,
    "schwarzschild": _schwarzschild,
    "reissner_nordstrom": _reissner_nordstrom,
    "perturbed3": _perturbed3,
}


def catalog_names() -> list[str]:
    return list(_BUILDERS)


def builtin(name: str, params: Mapping[str, float] | None = None) -> CatalogEntry:
    """Look up a catalog metric; ``params`` override its defaults.

    Names and parameters: euclidean(n), sphere2(a), hyperbolic2(a),
    sphere3(a), constant_curvature_form(n, kappa), schwarzschild(rs, c),
    reissner_nordstrom(rs, rq, c), perturbed3().
    """
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise UnknownCase(f"unknown case {name!r}; choose from {catalog_names()}") from None
    try:
        return build(**dict(params or {}))
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name}: {exc}") from None


def default_catalog() -> list[CatalogEntry]:
    """One instance of every catalog metric, as used by the test suites."""
    return [
        builtin("euclidean", {"n": 3}),
        builtin("sphere2", {"a": 1.0}),
        builtin("hyperbolic2", {"a": 1.0}),
        builtin("sphere3", {"a": 2.0}),
        builtin("constant_curvature_form", {"n": 2, "kappa": -0.5}),
        builtin("constant_curvature_form", {"n": 3, "kappa": 0.7}),
        builtin("constant_curvature_form", {"n": 4, "kappa": 1.3}),
        builtin("schwarzschild", {"rs": 2.0, "c": 1.0}),
        builtin("reissner_nordstrom", {"rs": 2.0, "rq": 0.6, "c": 1.0}),
        builtin("perturbed3"),
    ]


# --------------------------------------------------------------------------
# Three-dimensional identities
# --------------------------------------------------------------------------


def _kulkarni_nomizu(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a o b)_{ijkl} = a_ik b_jl - a_il b_jk + b_ik a_jl - b_il a_jk."""
    ab = np.einsum("ik,jl->ijkl", a, b)
    ba = np.einsum("ik,jl->ijkl", b, a)
    return ab - ab.transpose(0, 1, 3, 2) + ba - ba.transpose(0, 1, 3, 2)


def ricci_reconstruction(rt: RiemannTensor) -> np.ndarray:
    """R_abcd rebuilt from Ricci alone, valid in three dimensions.

    R_abcd = R_ac g_bd - R_ad g_bc + g_ac R_bd - g_ad R_bc
             - (R/2)(g_ac g_bd - g_ad g_bc)
    """
    if rt.n != 3:
        raise WrongDimension(f"Ricci reconstruction needs n=3, got n={rt.n}")
    inv = invariants(rt)
    g = rt.g
    return _kulkarni_nomizu(inv.ricci, g) - 0.25 * inv.scalar * _kulkarni_nomizu(g, g)


@dataclass(frozen=True)
class RicciTriple:
    theta: float
    x: np.ndarray
    y: np.ndarray
    ricci_values: tuple[float, float]
    residual: float


def ricci_triples(rt: RiemannTensor) -> list[RicciTriple]:
    """Modified M-eigen candidates built from pairs of Ricci eigenvectors.

    For each pair of g-orthonormal eigenvectors (x, y) of the mixed Ricci
    tensor with eigenvalues (lam, mu), theta = lam + mu - R/2.
    """
    if rt.n != 3:
        raise WrongDimension(f"Ricci eigen-triples need n=3, got n={rt.n}")
    inv = invariants(rt)
    e, _ = orthonormal_frame(rt.g)
    values, q = np.linalg.eigh(e.T @ inv.ricci @ e)
    vecs = e @ q
    out = []
    for a in range(3):
        for b in range(a + 1, 3):
            theta = float(values[a] + values[b] - 0.5 * inv.scalar)
            x, y = vecs[:, a], vecs[:, b]
            out.append(RicciTriple(theta, x, y, (float(values[a]), float(values[b])), meig_residual(rt, x, y, theta)))
    return out


# --------------------------------------------------------------------------
# Checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRow:
    name: str
    expected: float
    computed: float
    abs_dev: float
    rel_dev: float


@dataclass(frozen=True)
class CheckReport:
    case: str
    point: tuple[float, ...]
    rows: list[CheckRow]
    symmetry: dict[str, float]

    @property
    def max_abs_dev(self) -> float:
        return max((r.abs_dev for r in self.rows), default=0.0)

    def ok(self, tol: float = 1e-8) -> bool:
        return all(r.abs_dev < tol or r.rel_dev < tol for r in self.rows) and max(self.symmetry.values()) < 1e-10


def _row(name: str, expected: float, computed: float) -> CheckRow:
    dev = abs(computed - expected)
    rel = dev / abs(expected) if expected != 0 else dev
    return CheckRow(name, float(expected), float(computed), float(dev), float(rel))


def run_checks(entry: CatalogEntry, point: Sequence[float] | None = None, opts: SolveOptions | None = None) -> CheckReport:
    """Compare every oracle of ``entry`` with the numerical pipeline at ``point``."""
    x = np.asarray(entry.default_point if point is None else point, dtype=float)
    rt = riemann(entry.spec, x)
    inv = invariants(rt)
    g = rt.g
    n = rt.n
    rows: list[CheckRow] = []
    for name, oracle in entry.oracles.items():
        expected = oracle(x)
        if name == "gaussian_K":
            rows.append(_row(name, expected, rt.r_down[0, 1, 0, 1] / np.linalg.det(g)))
        elif name == "scalar_R":
            rows.append(_row(name, expected, inv.scalar))
        elif name == "kretschmann":
            rows.append(_row(name, expected, inv.kretschmann))
        elif name == "constant_kappa":
            kappa = inv.scalar / (n * (n - 1))
            model = kappa * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g))
            rows.append(_row(name, expected, kappa))
            rows.append(_row("constant_curvature_form_dev", 0.0, float(np.max(np.abs(rt.r_down - model)))))
        elif name == "ricci_eigenvalues":
            mixed = rt.metric_jet.g_inv @ inv.ricci
            computed = np.sort(np.linalg.eigvals(mixed).real)
            for k, (e, c) in enumerate(zip(sorted(expected), computed)):
                rows.append(_row(f"ricci_eigenvalue[{k}]", e, c))
        elif name == "meig_values":
            pairs = solve_meig(rt, opts or SolveOptions(modified=True))
            thetas = [p.theta for p in pairs]
            for e in expected:
                nearest = min(thetas, key=lambda t: abs(t - e), default=math.nan)
                rows.append(_row("modified_meig", e, nearest))
        else:
            raise UnknownCase(f"oracle {name!r} has no check")
    if n == 3 and rt.metric_jet.det > 0:
        dev = float(np.max(np.abs(ricci_reconstruction(rt) - rt.r_down)))
        rows.append(_row("ricci_reconstruction_dev", 0.0, dev))
        worst = max(t.residual for t in ricci_triples(rt))
        rows.append(_row("ricci_triple_residual", 0.0, worst))
    return CheckReport(entry.name, tuple(float(v) for v in x), rows, rt.symmetry.as_dict())
