import numpy as np
import pytest

from reeb_lab import cover, forms, quat
from reeb_lab.dynamics import flows, hamiltonian as hm, orbits
from reeb_lab.dynamics.integrate import ProjectionError, first_return, integrate, step_count
from reeb_lab.dynamics.runs import FlowConfig, run_flow


# --- closed-form flows ----------------------------------------------------------

def test_round_reeb_orbits_close_at_4pi(rng):
    for _ in range(10):
        spec = forms.ContactFormSpec.from_theta(rng.uniform(0, 2 * np.pi))
        u0 = quat.random_unit(rng)
        assert np.linalg.norm(flows.contact_flow(spec, u0, 4 * np.pi) - u0) < 1e-12
        # and not before: half way the orbit sits at -u0
        assert np.allclose(flows.contact_flow(spec, u0, 2 * np.pi), -u0)


def test_closed_form_solves_the_ode(rng):
    spec = forms.ContactFormSpec.from_theta(0.7, 0.4)
    u0 = quat.random_unit(rng)
    t = np.linspace(0, 3, 7)
    h = 1e-6
    deriv = (flows.contact_flow(spec, u0, t + h) - flows.contact_flow(spec, u0, t - h)) / (2 * h)
    assert np.allclose(deriv, flows.contact_flow(spec, u0, t) @ spec.reeb_matrix.T, atol=1e-8)


def test_deformed_periods():
    eps = 0.5
    spec = forms.ContactFormSpec(eps=eps)
    assert flows.minimal_period(spec, quat.ONE) == pytest.approx(4 * np.pi / (1 + eps))
    assert flows.minimal_period(spec, quat.J) == pytest.approx(4 * np.pi / (1 - eps))
    # ratio 3: generic orbits close at the longer period
    generic = quat.normalize(quat.ONE + quat.J)
    assert flows.minimal_period(spec, generic) == pytest.approx(8 * np.pi)
    assert flows.minimal_period(forms.ContactFormSpec(eps=1 / np.sqrt(2)), generic) is None


def test_flow_speed():
    assert flows.flow_speed(forms.ContactFormSpec()) == pytest.approx(0.5)
    assert flows.flow_speed(forms.ContactFormSpec(eps=0.5)) == pytest.approx(0.75)


# --- Hamiltonian fields ----------------------------------------------------------

def test_r4_field_matches_closed_form(rng):
    p = rng.normal(size=(200, 4))
    for eps in (0.0, 0.3, 0.9):
        omega = hm.SymplecticFormSpec(0.0, "r4")
        x = hm.hamiltonian_field(omega, hm.HamiltonianSpec("H_eps", eps), p)
        assert np.allclose(x, hm.closed_form_x_eps(eps, p), atol=1e-12)


def test_hamiltonian_convention(rng):
    # omega(X, .) = -dH
    omega = hm.SymplecticFormSpec(0.0, "r4")
    ham = hm.HamiltonianSpec("H_eps", 0.2)
    p = rng.normal(size=(20, 4))
    sol = hm.solve_field(omega, ham, p)
    w = omega.contact_spec.d_matrix
    v = rng.normal(size=(20, 4))
    lhs = np.einsum("ni,ij,nj->n", sol.field, w, v)
    rhs = -np.einsum("ni,ni->n", hm.gradient(ham, p), v)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_gradient_matches_finite_differences(rng):
    p = rng.normal(size=4)
    for tag in ("H0", "F", "H_eps", "K_eps"):
        ham = hm.HamiltonianSpec(tag, 0.3, 0.9 if tag == "H_eps" else None)
        g = np.array([(hm.energy(ham, p + 1e-6 * e) - hm.energy(ham, p - 1e-6 * e)) / 2e-6 for e in np.eye(4)])
        assert np.allclose(hm.gradient(ham, p), g, atol=1e-7)


def test_cotangent_field_is_pushed_reeb_field(rng):
    # dPhi(R^theta) equals the omega^theta field of |p|^2/2 at Phi(u)
    u, _ = forms.random_s3_tangents(rng, 50, 1)
    for th in (np.pi / 4, np.pi / 2, 2.0):
        spec = forms.ContactFormSpec.from_theta(th)
        r = forms.reeb(spec, u)
        push = cover.d_phi(u, r.vec)
        x = hm.hamiltonian_field(hm.SymplecticFormSpec(th), hm.HamiltonianSpec("H"), cover.phi_array(u))
        assert np.allclose(np.concatenate([push.dx, push.dy], axis=-1), x, atol=1e-12)


def test_zero_section_is_degenerate():
    p = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(hm.DegenerateFormError):
        hm.hamiltonian_field(hm.SymplecticFormSpec(1.0), hm.HamiltonianSpec("H"), p)


def test_spec_validation():
    with pytest.raises(ValueError):
        hm.SymplecticFormSpec(model="flat")
    with pytest.raises(ValueError):
        hm.HamiltonianSpec("G")
    with pytest.raises(ValueError):
        hm.HamiltonianSpec("H_eps", 1.0)
    assert hm.SymplecticFormSpec.from_strength(1.0).strength == pytest.approx(1.0)


# --- integrator ------------------------------------------------------------------

def test_step_count():
    assert step_count(12.5664, 1e-3) == 12566
    with pytest.raises(ValueError):
        step_count(1.0, 0.0)


def test_rk4_matches_closed_form(rng):
    spec = forms.ContactFormSpec.from_theta(1.1, 0.2)
    u0 = quat.random_unit(rng, 3)
    tr = integrate(lambda u: u @ spec.reeb_matrix.T, u0, 4 * np.pi, 1e-3, "s3")
    exact = flows.contact_flow(spec, u0[:, None, :], tr.times[None, :])
    assert np.max(np.abs(tr.states - np.swapaxes(exact, 0, 1))) < 1e-9
    assert tr.constraint_drift.max() < 1e-14


def test_projection_error_carries_last_good_state():
    with pytest.raises(ProjectionError) as info:
        integrate(lambda u: 50.0 * u, np.array([1.0, 0, 0, 0]), 1.0, 0.01, "s3")
    assert np.allclose(np.linalg.norm(info.value.last_good), 1.0)


def test_first_return_is_refined_between_samples():
    spec = forms.ContactFormSpec()
    field_fn = lambda u: u @ spec.reeb_matrix.T  # noqa: E731
    # 12.5664 is not 4 pi, so the last sample misses the start by ~3e-5
    tr = integrate(field_fn, quat.ONE, 12.5664, 1e-3, "s3")
    assert tr.closure_distance() > 1e-6
    c = first_return(tr, field_fn, "s3")
    assert c.period == pytest.approx(4 * np.pi, abs=1e-12)
    assert c.distance < 1e-12


def test_first_return_none_when_open():
    spec = forms.ContactFormSpec()
    field_fn = lambda u: u @ spec.reeb_matrix.T  # noqa: E731
    tr = integrate(field_fn, quat.ONE, 5.0, 1e-2, "s3")
    assert first_return(tr, field_fn, "s3").period is None


# --- runs --------------------------------------------------------------------------

def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(eps=1.0)
    with pytest.raises(ValueError):
        FlowConfig(kind="geodesic")
    with pytest.raises(ValueError):
        FlowConfig(dt=-1.0)
    with pytest.raises(ValueError):
        FlowConfig(u0=(0.0, 0.0, 0.0, 0.0))


def test_magnetic_run_conserves_energy():
    run = run_flow(FlowConfig("magnetic", s=1.0, T=6.0, dt=1e-3, u0=(0.3, 0.5, -0.2, 0.7)))
    assert run.trajectory.energy_drift.max() < 1e-12
    # magnetic circles of strength s close after 2 pi / sqrt(1 + s^2)
    assert run.closure.period == pytest.approx(2 * np.pi / np.sqrt(2), abs=1e-9)


# --- censuses ------------------------------------------------------------------------

def test_rational_approximation():
    assert orbits.rational_approximation(1.5) == (3, 2)
    assert orbits.rational_approximation(np.sqrt(2)) is None
    assert orbits.rational_approximation(1.0) == (1, 1)
    with pytest.raises(ValueError):
        orbits.rational_approximation(0.0)


@pytest.mark.parametrize("n", range(1, 6))
def test_irrational_ellipsoid(n):
    w = [1.0, np.sqrt(2), np.sqrt(3), np.sqrt(5), np.sqrt(7), np.sqrt(11)][: n + 1]
    c = orbits.periodic_census_ellipsoid(w)
    assert c.verdict == orbits.FINITE and c.count == n + 1
    assert sorted(o.period for o in c.orbits) == pytest.approx(sorted(2 * np.pi * a for a in w))


@pytest.mark.parametrize("w", [(1, 1), (2, 3), (1, np.sqrt(2), 2 * np.sqrt(2))])
def test_resonant_ellipsoid(w):
    c = orbits.periodic_census_ellipsoid(w)
    assert c.verdict == orbits.RESONANT and c.count is None and c.resonances


def test_ellipsoid_rejects_bad_weights():
    with pytest.raises(ValueError):
        orbits.periodic_census_ellipsoid([1.0, -2.0])


def test_small_two_orbit_scan():
    c = orbits.deformed_scan(1 / np.sqrt(2), grid=250, T_max=100.0)
    assert c.count == 2
    assert sorted(o.description for o in c.orbits) == ["z0 = 0", "z1 = 0"]


def test_small_scan_resonant_at_eps_zero():
    c = orbits.deformed_scan(0.0, grid=250, T_max=20.0)
    assert c.verdict == orbits.RESONANT
    assert c.near_periodic_fraction == 1.0


def test_scan_grid_floor():
    with pytest.raises(ValueError):
        orbits.deformed_scan(0.5, grid=100)


def test_rotated_scan_finds_rotated_circles():
    c = orbits.deformed_scan(1 / np.sqrt(2), theta=1.0, grid=250, T_max=100.0)
    assert c.count == 2


def test_correspondence_short_horizon(rng):
    r = orbits.correspondence_check(np.pi / 3, quat.random_unit(rng), T=2.0, dt=1e-3)
    assert r.scale == pytest.approx(1.0, abs=1e-8)
    assert r.mismatch < 1e-8


def test_magnetic_model_scale(rng):
    th = np.pi / 3
    r = orbits.correspondence_check(th, quat.random_unit(rng), T=2.0, dt=1e-3, model="magnetic")
    assert r.scale == pytest.approx(1 / np.sin(th), abs=1e-7)
    assert r.mismatch < 1e-7
