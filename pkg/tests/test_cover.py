import numpy as np
import pytest

from reeb_lab import cover, forms, quat
from reeb_lab.dynamics import flows


def test_phi_lands_in_st(rng):
    u = quat.random_unit(rng, 1000)
    p = cover.phi(u)
    assert np.allclose(np.linalg.norm(p.x, axis=-1), 1.0)
    assert np.allclose(np.linalg.norm(p.y, axis=-1), 1.0)
    assert np.max(np.abs(np.sum(p.x * p.y, axis=-1))) < 1e-14
    assert np.array_equal(cover.phi_array(u), cover.phi_array(-u))


@pytest.mark.parametrize("which", sorted(cover.PULLBACKS))
def test_pullbacks(rng, which):
    u, (v,) = forms.random_s3_tangents(rng, 2000, 1)
    assert np.max(cover.pullback_residual(which, u, v)) < 1e-12


def test_pullback_unknown_form(rng):
    u, (v,) = forms.random_s3_tangents(rng, 1, 1)
    with pytest.raises(ValueError):
        cover.pullback_residual("omega", u, v)


def test_hopf_point_and_stereo(rng):
    u = quat.random_unit(rng, 500)
    hp = cover.hopf_project(u)
    assert np.allclose(np.linalg.norm(hp.xyz, axis=-1), 1.0)
    assert np.allclose(hp.stereo, cover.z_ratio(u), atol=1e-12)
    # cartesian round trip
    assert np.allclose(cover.from_cartesian(cover.to_cartesian(cover.hopf_vector(u))), cover.hopf_vector(u))


def test_stereo_undefined_at_south_pole():
    hp = cover.hopf_project(quat.J)
    assert hp.at_south_pole[()] and np.isnan(hp.stereo)
    assert cover.hopf_project(quat.ONE).stereo == 0


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3])
def test_latitude_of_reeb_orbit(theta):
    spec = forms.ContactFormSpec.from_theta(theta)
    u = flows.contact_flow(spec, spec.rotor, np.linspace(0, 4 * np.pi, 1001))
    fit = cover.latitude_fit(cover.hopf_vector(u), pole_hint=cover.hopf_vector(quat.ONE))
    assert abs(fit.angle - theta) < 1e-9
    assert fit.winding == 2
    assert np.allclose(np.abs(cover.hopf_project(u).stereo), np.tan(theta / 2), atol=1e-9)


def test_latitude_fit_needs_points():
    with pytest.raises(ValueError):
        cover.latitude_fit(np.eye(3))


@pytest.mark.parametrize("angle", [0.3, 1.0, np.pi / 2, 2.5])
def test_holonomy_is_minus_cap_area(angle):
    r = cover.latitude_holonomy(quat.E_K, angle)
    assert r["distance"] < 1e-5
    # polygonal quadrature with 2^16 chords
    assert cover.angle_distance(r["cone_integral"], r["expected"]) < 1e-8


def test_holonomy_of_constant_loop():
    r = cover.holonomy(cover.LoopOnS2.constant(quat.E_J))
    assert cover.angle_distance(r.holonomy, 0.0) < 1e-12


def test_open_loop_rejected():
    with pytest.raises(ValueError):
        cover.LoopOnS2(lambda s: np.stack([np.cos(s / 2), np.sin(s / 2), 0 * s], axis=-1))


def test_angle_distance():
    assert cover.angle_distance(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)
    assert cover.angle_distance(np.pi, -np.pi) == pytest.approx(0.0)


def test_projection_record(rng):
    rec = cover.projection_record(quat.random_unit(rng, 3))
    assert len(rec["points"]) == 3 and "latitude_fit" not in rec
    assert cover.projection_record(quat.J)["points"][0]["stereo"] is None
