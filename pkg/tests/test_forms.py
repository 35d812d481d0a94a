import numpy as np
import pytest

from reeb_lab import forms, quat


def tangent(u, v):
    return forms.S3Tangent(u, v, check=False)


def test_contact_spec_validation():
    with pytest.raises(ValueError):
        forms.ContactFormSpec((1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        forms.ContactFormSpec(eps=1.0)
    with pytest.raises(ValueError):
        forms.ContactFormSpec(eps=-0.1)


@pytest.mark.parametrize("spec", [
    forms.ContactFormSpec(),
    forms.ContactFormSpec((0.0, 0.0, 1.0)),
    forms.ContactFormSpec.from_theta(1.3),
    forms.ContactFormSpec.from_theta(2.2, 0.6),
    forms.ContactFormSpec((0.0, 1.0, 0.0), 0.99),
])
def test_reeb_normalisation_and_kernel(rng, spec):
    u, (v,) = forms.random_s3_tangents(rng, 500, 1)
    r = forms.reeb(spec, u)
    assert np.max(np.abs(forms.alpha_eval(spec, r) - 1.0)) < 1e-12
    assert np.max(np.abs(forms.d_alpha_eval(spec, u, r, tangent(u, v)))) < 1e-12
    # R is tangent to S^3
    assert np.max(np.abs(np.sum(r.vec * u, axis=-1))) < 1e-13


def test_round_reeb_field_is_half_cu(rng):
    u = quat.random_unit(rng, 100)
    c = quat.random_unit_vector(rng)
    r = forms.reeb(forms.ContactFormSpec(tuple(c)), u)
    assert np.allclose(r.vec, 0.5 * quat.mul(quat.embed(c), u))


def test_s3_structure_equations(rng):
    u, (v, w) = forms.random_s3_tangents(rng, 2000, 2)
    res = forms.s3_structure_residuals(u, v, w)
    cyclic = {k: r for k, r in res.items() if not k.startswith("noncyclic")}
    assert len(cyclic) == 3
    for r in cyclic.values():
        assert np.max(r) < 1e-12
    # the non-cyclic variant dalpha_k = alpha_i ^ alpha_k fails by an O(1) amount
    assert np.max(res["noncyclic:dalpha_k=alpha_i^alpha_k"]) > 0.1


def test_st_structure_equations(rng):
    base, [(dx1, dy1), (dx2, dy2)] = forms.random_st_tangents(rng, 2000, 2)
    res = forms.structure_residuals(base, forms.STTangent(base, dx1, dy1), forms.STTangent(base, dx2, dy2))
    assert len(res) == 3
    for r in res.values():
        assert np.max(r) < 1e-10


def test_connection_sign_is_forced(rng):
    assert forms.calibrate_connection_sign(rng) == forms.CONNECTION_SIGN
    base, [(dx1, dy1), (dx2, dy2)] = forms.random_st_tangents(rng, 200, 2)
    wrong = forms.structure_residuals(base, forms.STTangent(base, dx1, dy1), forms.STTangent(base, dx2, dy2),
                                      sign=-forms.CONNECTION_SIGN)
    assert max(np.max(r) for r in wrong.values()) > 0.1


def test_st_point_validation():
    with pytest.raises(ValueError):
        forms.STPoint(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        forms.S3Tangent(quat.ONE, quat.ONE)


def test_lie_derivative_of_alpha_along_reeb(rng):
    spec = forms.ContactFormSpec.from_theta(0.8, 0.3)
    u, (v,) = forms.random_s3_tangents(rng, 50, 1)
    res = forms.lie_derivative_residual(lambda p, w: forms.alpha_eval(spec, tangent(p, w)),
                                        lambda p: p @ spec.reeb_matrix.T, u, v)
    assert np.max(res) < 1e-6


def test_lie_derivative_detects_non_invariance(rng):
    spec = forms.ContactFormSpec()
    other = forms.ContactFormSpec((0.0, 1.0, 0.0))
    u, (v,) = forms.random_s3_tangents(rng, 50, 1)
    # the R_j flow does not preserve alpha_i
    res = forms.lie_derivative_residual(lambda p, w: forms.alpha_eval(spec, tangent(p, w)),
                                        lambda p: p @ other.reeb_matrix.T, u, v)
    assert np.max(res) > 1e-2


def test_lie_derivative_rejects_bad_step(rng):
    u, (v,) = forms.random_s3_tangents(rng, 1, 1)
    with pytest.raises(ValueError):
        forms.lie_derivative_residual(lambda p, w: 0.0, lambda p: p, u, v, h=0.0)


def test_alpha_theta_is_combination(rng):
    u, (v,) = forms.random_s3_tangents(rng, 100, 1)
    t = tangent(u, v)
    for th in (0.0, 0.4, np.pi / 2, 2.0):
        lhs = forms.alpha_eval(forms.ContactFormSpec.from_theta(th), t)
        rhs = np.cos(th) * forms.alpha_eval(forms.ContactFormSpec(), t) + np.sin(th) * forms.alpha_eval(
            forms.ContactFormSpec((0.0, 1.0, 0.0)), t)
        assert np.allclose(lhs, rhs, atol=1e-13)
