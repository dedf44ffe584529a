import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from elastic_esm.disk_kernels import DiskSpec, rigid_disk_farfield_at
from elastic_esm.elastic_core import ElasticFarField, Material, PlaneWave, direction, uniform_angles, wavenumbers
from elastic_esm.forward_mfs import (
    DEFAULT_BC,
    BoundaryCondition,
    DomainError,
    MFSConfig,
    MFSError,
    ShapeSpec,
    add_noise,
    generate_farfield,
    kupradze_displacement,
    kupradze_tensor,
    kupradze_traction,
    mfs_solve,
    point_force_farfield,
    shape_eval,
    _inside,
)

MAT = Material()


def _rot(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s], [s, c]])


@pytest.mark.parametrize("kind,theta,expect", [
    ("pear", 0.0, (-0.85, 3.0)),
    ("peanut", 0.0, (-0.5, 3.0)),
    ("kite", np.pi / 2, (-0.5, 1.7)),
])
def test_shape_points(kind, theta, expect):
    p, _, _ = shape_eval(ShapeSpec(kind), theta)
    np.testing.assert_allclose(p, expect, atol=1e-14)


@pytest.mark.parametrize("kind", ["pear", "peanut", "kite", "disk"])
def test_frame_and_outward_normal(kind):
    s = ShapeSpec(kind)
    th = uniform_angles(300)
    p, tau, nu = shape_eval(s, th)
    np.testing.assert_allclose(np.linalg.norm(tau, axis=1), 1, atol=1e-14)
    np.testing.assert_allclose(nu, np.stack([tau[:, 1], -tau[:, 0]], 1), atol=0)
    # tangent agrees with the chord direction (up to orientation of the walk)
    chord = np.roll(p, -1, 0) - np.roll(p, 1, 0)
    cos = np.sum(chord * tau, 1) / np.linalg.norm(chord, axis=1)
    assert np.all(np.abs(np.abs(cos) - 1) < 1e-3)
    assert not np.any(_inside(s, p + 1e-3 * nu)) and np.all(_inside(s, p - 1e-3 * nu))


def test_kupradze_navier_residual(rng):
    y, q = np.array([0.2, -0.1]), np.array([1 - 0.4j, 0.3 + 0.9j])
    u = lambda x: kupradze_displacement(y, q, MAT, x)
    h = 1e-3
    for _ in range(4):
        x = y + rng.uniform(0.5, 3, 2) * rng.choice([-1, 1], 2)
        e1, e2 = np.array([h, 0]), np.array([0, h])
        uxx = (u(x + e1) - 2 * u(x) + u(x - e1)) / h**2
        uyy = (u(x + e2) - 2 * u(x) + u(x - e2)) / h**2
        uxy = (u(x + e1 + e2) - u(x + e1 - e2) - u(x - e1 + e2) + u(x - e1 - e2)) / (4 * h * h)
        gd = np.array([uxx[0] + uxy[1], uxy[0] + uyy[1]])
        res = MAT.mu * (uxx + uyy) + (MAT.lam + MAT.mu) * gd + MAT.omega**2 * u(x)
        assert np.linalg.norm(res) <= 1e-4 * np.linalg.norm(u(x))


def test_kupradze_reciprocity(rng):
    for _ in range(5):
        x, y = rng.uniform(-3, 3, (2, 2))
        G1 = kupradze_tensor(x[None], y[None], MAT)[0, 0]
        G2 = kupradze_tensor(y[None], x[None], MAT)[0, 0]
        assert np.max(np.abs(G1 - G2.T)) < 1e-12


def test_kupradze_radiation_decay():
    y, q, xh = np.zeros(2), np.array([0.6, -1.1 + 0.2j]), direction(0.7)
    a = np.linalg.norm(kupradze_displacement(y, q, MAT, 1e3 * xh)) * np.sqrt(1e3)
    b = np.linalg.norm(kupradze_displacement(y, q, MAT, 4e3 * xh)) * np.sqrt(4e3)
    assert abs(a - b) / b < 0.01


def test_point_force_farfield_constants():
    """Far-field formula reproduces the near field e^{ikr}/sqrt(r) asymptotics."""
    k = wavenumbers(MAT)
    y, q = np.array([0.3, -0.5]), np.array([1.0 + 0.2j, -0.4 + 0.7j])
    th = 1.1
    xh, r = direction(th), 2e5
    u = kupradze_displacement(y, q, MAT, r * xh)
    up, us = point_force_farfield(y, q, MAT, np.array([th]))
    xp = np.array([-xh[1], xh[0]])
    model = (up[0] * xh * np.exp(1j * k.kp * r) + us[0] * xp * np.exp(1j * k.ks * r)) / np.sqrt(r)
    assert np.linalg.norm(u - model) < 1e-4 * np.linalg.norm(model)


def test_traction_finite_differences(rng):
    y, q = np.array([0.1, 0.4]), np.array([0.8 + 0.1j, -0.2 + 1.0j])
    h = 1e-4
    for _ in range(3):
        x = y + rng.uniform(0.6, 2.5, 2)
        nrm = direction(rng.uniform(0, 2 * np.pi))
        G = np.zeros((2, 2), complex)
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            G[:, k] = (kupradze_displacement(y, q, MAT, x + e) - kupradze_displacement(y, q, MAT, x - e)).ravel() / (2 * h)
        div, curl = G[0, 0] + G[1, 1], G[1, 0] - G[0, 1]
        fd = 2 * MAT.mu * G @ nrm + MAT.lam * nrm * div - MAT.mu * np.array([-nrm[1], nrm[0]]) * curl
        t = np.ravel(kupradze_traction(y, q, MAT, x, nrm))
        np.testing.assert_allclose(t, fd, rtol=1e-5, atol=1e-5 * np.abs(fd).max())


def test_traction_linear_in_q(rng):
    y, x, nrm = np.zeros(2), np.array([1.2, 0.5]), direction(0.3)
    q1, q2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    a, b = 0.7 - 0.2j, -1.3 + 0.4j
    lhs = np.ravel(kupradze_traction(y, a * q1 + b * q2, MAT, x, nrm))
    rhs = a * np.ravel(kupradze_traction(y, q1, MAT, x, nrm)) + b * np.ravel(kupradze_traction(y, q2, MAT, x, nrm))
    assert np.max(np.abs(lhs - rhs)) <= 1e-15 * np.abs(lhs).max()


@given(a=st.floats(0, 2 * np.pi))
def test_traction_rotation_equivariance(a):
    y, x, nrm, q = np.array([0.2, 0.1]), np.array([1.0, -0.7]), direction(0.9), np.array([1 + 1j, -0.5])
    Q = _rot(a)
    t0 = np.ravel(kupradze_traction(y, q, MAT, x, nrm))
    t1 = np.ravel(kupradze_traction(Q @ y, Q @ q, MAT, Q @ x, Q @ nrm))
    assert np.max(np.abs(t1 - Q @ t0)) < 1e-12


def test_coincident_points_rejected():
    with pytest.raises(DomainError):
        kupradze_displacement(np.zeros(2), np.ones(2), MAT, np.zeros(2))


def test_mfs_disk_matches_series(plane_wave):
    ff = generate_farfield(ShapeSpec("disk", 1.0), BoundaryCondition("dirichlet"), plane_wave, MAT)
    up, us = rigid_disk_farfield_at(MAT, DiskSpec((-2.0, 3.0), 1.0), plane_wave, uniform_angles(52))
    assert max(np.max(np.abs(ff.up - up)), np.max(np.abs(ff.us - us))) < 1e-6


def test_benchmark_shapes_validation_residual(benchmark_data):
    for kind, ff in benchmark_data.items():
        assert ff.meta["residual"] < 1e-8, kind


@pytest.mark.parametrize("kind", ["disk", "pear"])
def test_doubling_sources_plateau(kind):
    c = MFSConfig.for_shape(kind)
    a = generate_farfield(ShapeSpec(kind), config=c)
    b = generate_farfield(ShapeSpec(kind), config=MFSConfig.for_shape(
        kind, n_sources=2 * c.n_sources, n_collocation=2 * c.n_collocation))
    assert max(np.max(np.abs(a.up - b.up)), np.max(np.abs(a.us - b.us))) < 1e-8


def test_dirichlet_farfield_reciprocity(rng):
    shape, bc = ShapeSpec("pear"), BoundaryCondition("dirichlet")

    def up_at(obs, inc):
        sol = mfs_solve(shape, bc, PlaneWave(inc, 1.0, 0.0), MAT)
        return point_force_farfield(sol.sources, sol.strengths, MAT, np.array([obs]))[0][0]

    for _ in range(5):
        tx, td = rng.uniform(0, 2 * np.pi, 2)
        assert abs(up_at(tx, td) - up_at(td + np.pi, tx + np.pi)) < 1e-5


def test_single_source_shear_null():
    th = 0.8
    _, us = point_force_farfield(np.zeros((1, 2)), direction(th)[None], MAT, np.array([th]))
    assert abs(us[0]) < 1e-15


@given(t=st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_point_force_translation(t):
    k = wavenumbers(MAT)
    th = uniform_angles(16)
    src = np.array([[0.3, -0.2], [-0.5, 0.4]])
    q = np.array([[1 + 1j, 0.5], [-0.2j, 0.8]])
    up0, us0 = point_force_farfield(src, q, MAT, th)
    up1, us1 = point_force_farfield(src + np.asarray(t), q, MAT, th)
    xt = direction(th) @ np.asarray(t)
    assert np.max(np.abs(up1 - up0 * np.exp(-1j * k.kp * xt))) < 1e-12
    assert np.max(np.abs(us1 - us0 * np.exp(-1j * k.ks * xt))) < 1e-12


def test_add_noise_contract(rng):
    ff = ElasticFarField(rng.standard_normal(52) + 1j, rng.standard_normal(52) - 2j)
    same = add_noise(ff, 0.0, 1)
    np.testing.assert_array_equal(same.up, ff.up)
    a, b = add_noise(ff, 0.02, 7), add_noise(ff, 0.02, 7)
    np.testing.assert_array_equal(a.up, b.up)
    np.testing.assert_array_equal(a.us, b.us)
    with pytest.raises(ValueError):
        add_noise(ff, -0.1)


@given(level=st.floats(0, 1), seed=st.integers(0, 2**31))
def test_add_noise_bound(level, seed):
    base = np.exp(1j * np.linspace(0, 5, 40)) * np.linspace(0.1, 3, 40)
    ff = ElasticFarField(base, base[::-1])
    noisy = add_noise(ff, level, seed)
    rel = np.linalg.norm(noisy.stacked() - ff.stacked()) / np.linalg.norm(ff.stacked())
    assert rel <= level * np.sqrt(2) + 1e-15


def test_refuses_poor_fit():
    cfg = MFSConfig(n_sources=8, n_collocation=16)
    with pytest.raises(MFSError):
        generate_farfield(ShapeSpec("kite"), config=cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        MFSConfig(n_sources=100, n_collocation=150)
    with pytest.raises(ValueError):
        MFSConfig(retraction=1.2)
    with pytest.raises(ValueError):
        ShapeSpec("triangle")
    with pytest.raises(ValueError):
        BoundaryCondition("impedance", -1.0)


def test_default_bc_table():
    assert DEFAULT_BC["pear"].kind == "dirichlet"
    assert DEFAULT_BC["peanut"].kind == "neumann"
    assert DEFAULT_BC["kite"] == BoundaryCondition("impedance", 2.0)


def test_farfield_metadata(benchmark_data):
    ff = benchmark_data["kite"]
    assert ff.meta["shape"] == "kite" and ff.meta["bc"] == "impedance" and ff.meta["sigma"] == 2.0
