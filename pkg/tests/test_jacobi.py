import csv
import io
import math

import numpy as np
import pytest

from curvspec import (
    SolveOptions,
    builtin,
    decoupled_solution,
    distinct_thetas,
    geodesic_step,
    integrate_geodesic,
    integrate_jacobi,
    metric_at,
    riemann,
    solve_meig,
)
from curvspec.errors import InputError, SingularPoint

EQUATOR = np.array([math.pi / 2, 0.0])
ALONG = np.array([0.0, 1.0])
NORTH = np.array([1.0, 0.0])


def sphere_field(unit_sphere, t_max, steps):
    geo = integrate_geodesic(unit_sphere.spec, EQUATOR, ALONG, t_max, steps)
    return geo, integrate_jacobi(unit_sphere.spec, geo, np.zeros(2), NORTH)


def test_flat_geodesic_is_straight_line():
    flat = builtin("euclidean", {"n": 3}).spec
    x0 = np.array([0.5, -1.0, 2.0])
    u0 = np.array([0.3, 0.2, -0.7])
    geo = integrate_geodesic(flat, x0, u0, 2.0, 7)
    np.testing.assert_allclose(geo.x, x0 + np.outer(geo.t, u0), atol=1e-14)
    np.testing.assert_array_equal(geo.u, np.tile(u0, (8, 1)))


def test_equator_is_geodesic(unit_sphere):
    geo = integrate_geodesic(unit_sphere.spec, EQUATOR, ALONG, math.pi, 10_000)
    assert np.max(np.abs(geo.x[:, 0] - math.pi / 2)) < 1e-12
    assert abs(geo.x[-1, 1] - math.pi) < 1e-10
    assert np.max(np.abs(geo.norms() - 1.0)) < 1e-10


def test_tilted_great_circle(unit_sphere):
    # start on the equator heading north-east: the orbit reaches latitude pi/4
    u0 = np.array([-1.0, 1.0]) / math.sqrt(2)
    geo = integrate_geodesic(unit_sphere.spec, EQUATOR, u0, math.pi, 2000)
    assert np.min(geo.x[:, 0]) == pytest.approx(math.pi / 4, abs=1e-9)
    assert geo.x[-1, 0] == pytest.approx(math.pi / 2, abs=1e-9)
    assert geo.x[-1, 1] == pytest.approx(math.pi, abs=1e-9)
    assert np.max(np.abs(geo.norms() - 1.0)) < 1e-10


def test_schwarzschild_radial_infall(schwarzschild):
    rs, r0 = 2.0, 4.0
    x0 = np.array([0.0, r0, math.pi / 2, 0.0])
    u0 = np.array([1.0 / math.sqrt(1 - rs / r0), 0.0, 0.0, 0.0])
    geo = integrate_geodesic(schwarzschild.spec, x0, u0, 1.0, 10_000)
    norms = geo.norms()
    assert norms[0] == pytest.approx(-1.0, abs=1e-14)
    assert np.max(np.abs(norms - norms[0])) < 1e-8
    assert np.all(np.diff(geo.x[:, 1]) < 0)
    np.testing.assert_array_equal(geo.x[:, 2:], np.tile(x0[2:], (10_001, 1)))


def test_geodesic_into_horizon_raises(schwarzschild):
    x0 = np.array([0.0, 2.0, math.pi / 2, 0.0])
    with pytest.raises(SingularPoint):
        integrate_geodesic(schwarzschild.spec, x0, np.array([1.0, 0, 0, 0]), 1.0, 10)


def test_input_validation(unit_sphere):
    with pytest.raises(InputError):
        integrate_geodesic(unit_sphere.spec, EQUATOR, ALONG, 1.0, 0)
    with pytest.raises(InputError):
        integrate_geodesic(unit_sphere.spec, [1.0, 2.0, 3.0], ALONG, 1.0, 5)
    geo = integrate_geodesic(unit_sphere.spec, EQUATOR, ALONG, 1.0, 5)
    with pytest.raises(InputError):
        integrate_jacobi(unit_sphere.spec, geo, np.zeros(3), NORTH)


def test_geodesic_step_matches_integrator(unit_sphere):
    u0 = np.array([0.2, 0.9])
    geo = integrate_geodesic(unit_sphere.spec, [1.0, 0.3], u0, 0.4, 4)
    x, u = np.array([1.0, 0.3]), u0
    for _ in range(4):
        x, u = geodesic_step(unit_sphere.spec, x, u, 0.1)
    np.testing.assert_array_equal(geo.x[-1], x)
    np.testing.assert_array_equal(geo.u[-1], u)


def test_equator_jacobi_is_sine(unit_sphere):
    geo, jac = sphere_field(unit_sphere, math.pi / 2, 10_000)
    assert jac.norm_v[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(jac.norm_v - np.sin(geo.t))) < 1e-6
    v_ref, _ = decoupled_solution(1.0, 0.0, 1.0, geo.t)
    assert np.max(np.abs(jac.norm_v - v_ref)) < 1e-6
    # the joint integration reproduces the supplied geodesic
    np.testing.assert_allclose(jac.geodesic.x, geo.x, atol=1e-15)


def test_flat_jacobi_is_linear():
    flat = builtin("euclidean", {"n": 2}).spec
    geo = integrate_geodesic(flat, [0.0, 0.0], [1.0, 0.5], 3.0, 9)
    v0, w0 = np.array([0.2, -1.0]), np.array([0.7, 0.4])
    jac = integrate_jacobi(flat, geo, v0, w0)
    np.testing.assert_allclose(jac.v, v0 + np.outer(geo.t, w0), atol=1e-14)
    np.testing.assert_allclose(jac.w, np.tile(w0, (10, 1)), atol=1e-14)


def test_tangent_field_is_jacobi(schwarzschild):
    x0 = np.array([0.0, 5.0, 1.2, 0.3])
    u0 = np.array([1.4, -0.2, 0.03, 0.05])
    geo = integrate_geodesic(schwarzschild.spec, x0, u0, 1.0, 2000)
    jac = integrate_jacobi(schwarzschild.spec, geo, u0, np.zeros(4))
    assert np.max(np.abs(jac.v - geo.u)) < 1e-8


def _unit_normal_start(entry, x, seed):
    g = metric_at(entry.spec, x, order=0).g
    rng = np.random.default_rng(seed)
    u = rng.normal(size=len(x))
    u /= math.sqrt(u @ g @ u)
    e = rng.normal(size=len(x))
    e -= (u @ g @ e) * u
    e /= math.sqrt(e @ g @ e)
    return u, e


@pytest.mark.parametrize(
    "name, params",
    [
        ("sphere2", {"a": 1.0}),
        ("sphere2", {"a": 1.7}),
        ("hyperbolic2", {"a": 1.0}),
        ("sphere3", {"a": 2.0}),
        ("constant_curvature_form", {"n": 2, "kappa": 0.6}),
        ("constant_curvature_form", {"n": 3, "kappa": -0.8}),
        ("constant_curvature_form", {"n": 4, "kappa": 1.3}),
    ],
)
def test_constant_curvature_matches_decoupled(name, params):
    entry = builtin(name, params)
    x0 = np.asarray(entry.default_point, dtype=float)
    thetas = distinct_thetas(solve_meig(riemann(entry.spec, x0), SolveOptions(starts=16, modified=True)))
    assert len(thetas) == 1
    theta = thetas[0]
    u0, e = _unit_normal_start(entry, x0, seed=len(x0))
    a, b = 0.3, 0.9
    geo = integrate_geodesic(entry.spec, x0, u0, 1.0, 1000)
    jac = integrate_jacobi(entry.spec, geo, a * e, b * e)
    v_ref, _ = decoupled_solution(theta, a, b, geo.t)
    assert np.max(np.abs(jac.norm_v - np.abs(v_ref))) < 1e-5


def test_rk4_convergence_factor(unit_sphere):
    errors = []
    for steps in (10, 20, 40):
        geo, jac = sphere_field(unit_sphere, math.pi / 2, steps)
        errors.append(np.max(np.abs(jac.norm_v - np.sin(geo.t))))
    for coarse, fine in zip(errors, errors[1:]):
        assert 12 <= coarse / fine <= 20


def test_rk4_convergence_factor_geodesic(unit_sphere):
    u0 = np.array([-0.6, 0.8])

    def endpoint(steps):
        return integrate_geodesic(unit_sphere.spec, EQUATOR, u0, 2.0, steps).x[-1]

    ref = endpoint(4000)
    e1 = np.max(np.abs(endpoint(20) - ref))
    e2 = np.max(np.abs(endpoint(40) - ref))
    assert 12 <= e1 / e2 <= 20


@pytest.mark.parametrize(
    "theta, v0, w0, t, expected",
    [
        (1.0, 0.0, 1.0, math.pi / 2, 1.0),
        (0.0, 2.0, 3.0, 2.0, 8.0),
        (-1.0, 1.0, 0.0, 1.0, math.cosh(1.0)),
        (4.0, 1.0, 0.0, math.pi / 4, 0.0),
        (-4.0, 0.0, 2.0, 0.5, math.sinh(1.0)),
    ],
)
def test_decoupled_solution(theta, v0, w0, t, expected):
    value, _ = decoupled_solution(theta, v0, w0, t)
    assert value == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("theta", [-2.0, 0.0, 0.5])
def test_decoupled_solution_derivative(theta):
    t = np.linspace(0, 2, 9)
    h = 1e-4
    v, dv = decoupled_solution(theta, 0.4, -1.1, t)
    vp, _ = decoupled_solution(theta, 0.4, -1.1, t + h)
    vm, _ = decoupled_solution(theta, 0.4, -1.1, t - h)
    np.testing.assert_allclose(dv, (vp - vm) / (2 * h), atol=1e-6)
    np.testing.assert_allclose((vp - 2 * v + vm) / h**2, -theta * v, atol=1e-5)


def test_csv_export(unit_sphere, tmp_path):
    geo, jac = sphere_field(unit_sphere, 1.0, 4)
    buf = io.StringIO()
    jac.to_csv(buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["t", "x0", "x1", "u0", "u1", "v0", "v1", "norm_v"]
    assert len(rows) == 6
    assert float(rows[-1][0]) == 1.0
    assert float(rows[-1][-1]) == jac.norm_v[-1]
    path = tmp_path / "field.csv"
    jac.to_csv(path)
    with open(path, newline="", encoding="utf-8") as fh:
        assert fh.read() == buf.getvalue()
