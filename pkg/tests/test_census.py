import numpy as np
import pytest

from reeb_lab import cover, forms, quat
from reeb_lab.census import lift
from reeb_lab.dynamics import flows


@pytest.fixture(scope="module")
def rotation_lift():
    return lift.build_lift(lift.BaseHamiltonian.affine(quat.E_I, 2.0), shift=0.0)


def test_base_field_is_rotation(rng):
    H = lift.BaseHamiltonian.affine(quat.E_K, 0.0)
    x = quat.random_unit_vector(rng, 50)
    assert np.allclose(lift.base_field(H, x), np.cross(x, quat.E_K))


def test_horizontal_lift_matches_closed_form(rng):
    u = quat.random_unit(rng, 200)
    x = quat.rotate(u, quat.E_I)
    xf = np.cross(x, quat.random_unit_vector(rng, 200))
    assert np.allclose(lift.horizontal_lift(xf, u), lift.horizontal_lift_closed(xf, u), atol=1e-12)


def test_invariant_residuals(rng, rotation_lift):
    res = rotation_lift.invariant_residuals(quat.random_unit(rng, 500))
    assert res and max(res.values()) < 1e-12


def test_rotation_lift_closed_form(rng, rotation_lift):
    # H = 2 + <i, x> lifts to 2 R_i + u i / 2
    u = quat.random_unit(rng, 100)
    assert np.allclose(rotation_lift(u), 2 * 0.5 * quat.mul(quat.I, u) + 0.5 * quat.mul(u, quat.I), atol=1e-12)


def test_rotation_lift_flow(rng):
    u0 = quat.random_unit(rng)
    t = np.array([0.5, 1.3])
    h = 1e-6
    lf = lift.build_lift(lift.BaseHamiltonian.affine(quat.E_I, 2.0), shift=0.0)
    d = (lift.rotation_lift_flow(2.0, u0, t + h) - lift.rotation_lift_flow(2.0, u0, t - h)) / (2 * h)
    assert np.allclose(d, lf(lift.rotation_lift_flow(2.0, u0, t)), atol=1e-8)


def test_default_shift_makes_H_positive():
    lf = lift.build_lift(lift.BaseHamiltonian.affine(quat.E_I, 0.0))
    assert lf.shift >= 2.0


def test_constant_H_lifts_to_reeb(rng):
    lf = lift.build_lift(lift.BaseHamiltonian.constant(1.0))
    u = quat.random_unit(rng, 50)
    assert np.allclose(lf(u), forms.reeb(forms.ContactFormSpec(), u).vec)


def test_lie_bracket_of_commuting_fields(rng, rotation_lift):
    u = quat.random_unit(rng, 100)
    b = lift.lie_bracket(rotation_lift.reeb, rotation_lift.horizontal, u)
    assert np.max(np.abs(b)) < 1e-8


def test_lie_bracket_detects_non_commuting(rng):
    rj = forms.ContactFormSpec((0.0, 1.0, 0.0))
    ri = forms.ContactFormSpec()
    u = quat.random_unit(rng, 20)
    b = lift.lie_bracket(lambda p: p @ ri.reeb_matrix.T, lambda p: p @ rj.reeb_matrix.T, u)
    assert np.min(np.linalg.norm(b, axis=-1)) > 0.1


def test_fibre_displacement_of_reeb_flow(rng):
    u0 = quat.random_unit(rng)
    # the R_i flow stays in one fibre and turns it at unit rate
    u1 = flows.contact_flow(forms.ContactFormSpec(), u0, np.pi / 2)
    assert cover.angle_distance(lift.fibre_displacement(u0, u1), np.pi / 2) < 1e-12


def test_fibre_displacement_needs_same_fibre(rng):
    u0 = quat.random_unit(rng)
    # the u i / 2 part of the lifted rotation moves the base point
    with pytest.raises(ValueError):
        lift.fibre_displacement(u0, lift.rotation_lift_flow(1.0, u0, 1.0, extra=-1.0))


def test_fixed_fibre_census():
    c = lift.fixed_fibre_census()
    assert c.count == 2
    assert sorted(o.description for o in c.orbits) == ["fibre over +i", "fibre over -i"]
