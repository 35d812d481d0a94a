import numpy as np
import pytest

from reeb_lab import finsler, quat


def test_K_eps_is_transported_H_eps(rng):
    p = rng.normal(size=(1000, 4))
    for eps in (0.0, 0.2, 0.9):
        assert np.max(finsler.K_identity_residual(eps, p)) < 1e-13


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.5, 0.9])
def test_K_eps_homogeneous_of_degree_two(rng, eps):
    for p in rng.normal(size=(3, 4)):
        assert abs(finsler.homogeneity_degree(lambda q: finsler.K_eps(eps, q), p) - 2.0) < 1e-9


def test_homogeneity_rejects_sign_change():
    with pytest.raises(ValueError):
        finsler.homogeneity_degree(lambda q: q[0] - 1.0, np.array([1.0, 0, 0, 0]))


def test_cometric_closed_form(rng):
    x = quat.random_unit_vector(rng, 200)
    p = np.cross(x, quat.random_unit_vector(rng, 200)) * rng.uniform(0.5, 3, (200, 1))
    for eps in (0.0, 0.3, 0.8):
        assert np.allclose(finsler.cometric(eps, x, p), finsler.cometric_closed(eps, x, p), atol=1e-12)


def test_cometric_fibre_degree_one(rng):
    x = quat.random_unit_vector(rng)
    p = np.cross(x, quat.random_unit_vector(rng))
    assert abs(finsler.homogeneity_degree(lambda s: finsler.cometric(0.4, x, s), p) - 1.0) < 1e-9


def test_finsler_norm_is_dual(rng):
    eps = 0.6
    x = quat.random_unit_vector(rng)
    e = finsler.fibre_frame(x)
    ang = np.linspace(0, 2 * np.pi, 20001)
    dirs = np.cos(ang)[:, None] * e[0] + np.sin(ang)[:, None] * e[1]
    unit = dirs / finsler.cometric_closed(eps, x, dirs)[:, None]
    for v in (e[0], e[1], 0.3 * e[0] - 2 * e[1]):
        brute = np.max(unit @ v)
        assert finsler.finsler_norm(eps, x, v) == pytest.approx(brute, rel=1e-6)


def test_finsler_norm_rejects_strong_wind():
    with pytest.raises(ValueError):
        finsler.finsler_norm(1.0, quat.E_J, quat.E_K)


def test_randers_identities(rng):
    r = finsler.randers_identity(quat.random_unit(rng, 10_000))
    assert np.max(r.identity) < 1e-13
    assert np.max(r.covector) < 1e-13


def test_convex_below_threshold():
    cfg = finsler.FinslerCheckConfig(0.05, 100)
    ev = finsler.fibre_min_eigenvalues(0.05, cfg.sample_fibres())
    assert np.all(ev > finsler.EIGEN_FLOOR)


def test_not_convex_beyond_one():
    cfg = finsler.FinslerCheckConfig(0.05, 100)
    ev = finsler.fibre_min_eigenvalues(1.5, cfg.sample_fibres())
    assert np.min(ev) < 0


def test_threshold_near_oracle():
    rep = finsler.fibre_convexity_threshold(finsler.FinslerCheckConfig(0.05, 40))
    assert rep.convex
    assert rep.eps_star == pytest.approx(rep.eps_star_oracle, abs=1e-2)


def test_config_validation():
    with pytest.raises(ValueError):
        finsler.FinslerCheckConfig(eps=1.0)
    with pytest.raises(ValueError):
        finsler.FinslerCheckConfig(directions=2)


def test_squared_hamiltonian_field(rng):
    assert np.max(finsler.squared_field_residual(rng.normal(size=(200, 4)))) < 1e-11


def test_k_flow_closed_solves_field(rng):
    eps = 0.4
    p0 = rng.normal(size=4)
    t = np.array([0.3, 1.7])
    h = 1e-6
    d = (finsler.k_flow_closed(eps, p0, t + h) - finsler.k_flow_closed(eps, p0, t - h)) / (2 * h)
    assert np.allclose(d, finsler.k_field(eps, finsler.k_flow_closed(eps, p0, t)), atol=1e-8)


def test_surviving_geodesics_share_a_great_circle():
    geo = finsler.surviving_geodesics(1 / np.sqrt(2))
    a, b = geo["z1 = 0"], geo["z0 = 0"]
    assert a.angle == pytest.approx(np.pi / 2, abs=1e-9)
    assert b.angle == pytest.approx(np.pi / 2, abs=1e-9)
    assert np.linalg.norm(np.cross(a.axis, b.axis)) < 1e-9
    assert a.direction == -b.direction
