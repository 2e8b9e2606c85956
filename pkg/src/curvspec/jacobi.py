"""Geodesics and Jacobi fields by fixed-step classical RK4.

The geodesic equation x'' = -Gamma(x')(x') and the Jacobi equation
D^2 v/dt^2 + R^mu_{nu rho sigma} u^nu v^rho u^sigma = 0 are integrated as
first-order systems. For the Jacobi field the state carries v and its
covariant derivative w = Dv/dt:

    v' = w - Gamma^mu_{nu rho} u^nu v^rho
    w' = -Gamma^mu_{nu rho} u^nu w^rho - R^mu_{nu rho sigma} u^nu v^rho u^sigma
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike
from typing import IO, Iterator, Sequence

import numpy as np

from .errors import InputError
from .geometry import MetricSpec, _riemann_up, christoffel, metric_at

__all__ = [
    "GeodesicState",
    "JacobiState",
    "GeodesicTrajectory",
    "JacobiTrajectory",
    "geodesic_step",
    "integrate_geodesic",
    "integrate_jacobi",
    "decoupled_solution",
]


@dataclass(frozen=True)
class GeodesicState:
    t: float
    x: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class JacobiState:
    v: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class GeodesicTrajectory:
    spec: MetricSpec
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, k: int) -> GeodesicState:
        return GeodesicState(float(self.t[k]), self.x[k], self.u[k])

    def __iter__(self) -> Iterator[GeodesicState]:
        return (self[k] for k in range(len(self)))

    def norms(self) -> np.ndarray:
        """g(u, u) at every sample."""
        return np.array([s.u @ metric_at(self.spec, s.x, order=0).g @ s.u for s in self])


@dataclass(frozen=True)
class JacobiTrajectory:
    geodesic: GeodesicTrajectory
    v: np.ndarray
    w: np.ndarray
    norm_v: np.ndarray

    def __len__(self) -> int:
        return len(self.v)

    def __getitem__(self, k: int) -> JacobiState:
        return JacobiState(self.v[k], self.w[k])

    def to_csv(self, target: str | PathLike | IO[str]) -> None:
        """Write columns t, x0.., u0.., v0.., norm_v."""
        n = self.v.shape[1]
        header = ["t"] + [f"x{k}" for k in range(n)] + [f"u{k}" for k in range(n)] + [f"v{k}" for k in range(n)] + ["norm_v"]
        rows = np.column_stack([self.geodesic.t, self.geodesic.x, self.geodesic.u, self.v, self.norm_v])
        if hasattr(target, "write"):
            _write_rows(target, header, rows)
        else:
            with open(target, "w", newline="", encoding="utf-8") as fh:
                _write_rows(fh, header, rows)


def _write_rows(fh: IO[str], header: list[str], rows: np.ndarray) -> None:
    writer = csv.writer(fh)
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])


def _gamma(spec: MetricSpec, x: np.ndarray) -> np.ndarray:
    return christoffel(metric_at(spec, x, order=1)).gamma


def _gamma_and_curvature(spec: MetricSpec, x: np.ndarray):
    jet = metric_at(spec, x)
    ch = christoffel(jet)
    return ch.gamma, _riemann_up(ch), jet.g


def _geodesic_rhs(spec, x, u):
    gamma = _gamma(spec, x)
    return u, -(gamma @ u) @ u


def geodesic_step(spec: MetricSpec, x: np.ndarray, u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """One classical RK4 step of the geodesic equation."""
    k1x, k1u = _geodesic_rhs(spec, x, u)
    k2x, k2u = _geodesic_rhs(spec, x + 0.5 * h * k1x, u + 0.5 * h * k1u)
    k3x, k3u = _geodesic_rhs(spec, x + 0.5 * h * k2x, u + 0.5 * h * k2u)
    k4x, k4u = _geodesic_rhs(spec, x + h * k3x, u + h * k3u)
    x_new = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
    u_new = u + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
    return x_new, u_new


def _check_steps(spec: MetricSpec, x0, u0, steps: int):
    x0 = np.asarray(x0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if x0.shape != (spec.n,) or u0.shape != (spec.n,):
        raise InputError(f"x0 and u0 must have {spec.n} entries")
    if steps < 1:
        raise InputError("steps must be >= 1")
    return x0, u0


def integrate_geodesic(spec: MetricSpec, x0, u0, t_max: float, steps: int) -> GeodesicTrajectory:
    """Sample the geodesic through (x0, u0) at ``steps + 1`` equally spaced t.

    Raises :class:`SingularPoint` if the path reaches a metric degeneracy.
    """
    x, u = _check_steps(spec, x0, u0, steps)
    metric_at(spec, x, order=0)
    h = t_max / steps
    xs = np.empty((steps + 1, spec.n))
    us = np.empty((steps + 1, spec.n))
    xs[0], us[0] = x, u
    for k in range(steps):
        x, u = geodesic_step(spec, x, u, h)
        xs[k + 1], us[k + 1] = x, u
    return GeodesicTrajectory(spec, np.linspace(0.0, t_max, steps + 1), xs, us)


def _coupled_rhs(spec, x, u, v, w):
    gamma, r_up, g = _gamma_and_curvature(spec, x)
    gu = gamma @ u  # symmetric in the lower pair
    acc = -gu @ u
    dv = w - gu @ v
    # R^mu_{nu rho sigma} u^nu v^rho u^sigma
    dw = -gu @ w - ((r_up @ u) @ v) @ u
    return u, acc, dv, dw


def integrate_jacobi(spec: MetricSpec, geodesic: GeodesicTrajectory, v0, w0) -> JacobiTrajectory:
    """Jacobi field along ``geodesic`` with v(0) = v0 and Dv/dt(0) = w0.

    The geodesic is re-integrated together with (v, w) on the same time
    grid, so the RK4 stages see consistent base points; its samples
    reproduce ``geodesic`` exactly.
    """
    n = spec.n
    v = np.asarray(v0, dtype=float)
    w = np.asarray(w0, dtype=float)
    if v.shape != (n,) or w.shape != (n,):
        raise InputError(f"v0 and w0 must have {n} entries")
    ts = geodesic.t
    steps = len(ts) - 1
    if steps < 1:
        raise InputError("geodesic must have at least two samples")
    h = (ts[-1] - ts[0]) / steps
    x, u = geodesic.x[0].copy(), geodesic.u[0].copy()
    xs = np.empty((steps + 1, n))
    us = np.empty((steps + 1, n))
    vs = np.empty((steps + 1, n))
    ws = np.empty((steps + 1, n))
    norms = np.empty(steps + 1)
    xs[0], us[0], vs[0], ws[0] = x, u, v, w
    g = metric_at(spec, x, order=0).g
    norms[0] = math.sqrt(abs(v @ g @ v))
    for k in range(steps):
        k1 = _coupled_rhs(spec, x, u, v, w)
        k2 = _coupled_rhs(spec, *(s + 0.5 * h * d for s, d in zip((x, u, v, w), k1)))
        k3 = _coupled_rhs(spec, *(s + 0.5 * h * d for s, d in zip((x, u, v, w), k2)))
        k4 = _coupled_rhs(spec, *(s + h * d for s, d in zip((x, u, v, w), k3)))
        x, u, v, w = (
            s + (h / 6.0) * (a + 2 * b + 2 * c + d) for s, a, b, c, d in zip((x, u, v, w), k1, k2, k3, k4)
        )
        xs[k + 1], us[k + 1], vs[k + 1], ws[k + 1] = x, u, v, w
        g = metric_at(spec, x, order=0).g
        norms[k + 1] = math.sqrt(abs(v @ g @ v))
    traj = GeodesicTrajectory(spec, ts.copy(), xs, us)
    return JacobiTrajectory(traj, vs, ws, norms)


def decoupled_solution(theta: float, v0: float, w0: float, t: float | np.ndarray):
    """Solution of v'' + theta v = 0 with v(0) = v0, v'(0) = w0.

    Returns ``(v(t), v'(t))``.
    """
    if theta > 0:
        k = math.sqrt(theta)
        return v0 * np.cos(k * t) + w0 * np.sin(k * t) / k, -v0 * k * np.sin(k * t) + w0 * np.cos(k * t)
    if theta < 0:
        k = math.sqrt(-theta)
        return v0 * np.cosh(k * t) + w0 * np.sinh(k * t) / k, v0 * k * np.sinh(k * t) + w0 * np.cosh(k * t)
    return v0 + w0 * t, w0 + 0.0 * t
