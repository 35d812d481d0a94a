"""Closed-form Reeb flows on S^3.

The Reeb field of alpha_c is u -> c u / 2, so its flow is left
multiplication by exp(c t / 2) and every orbit has period 4 pi.  The
deformed field R_{i,eps} rotates the two complex coordinates of
u = z0 + z1 j at the rates (1 + eps)/2 and (1 - eps)/2.  A general member
of the family is the conjugate of the deformed flow by the rotor a of its
spec: u -> a flow(conj(a) u).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .. import quat
from ..forms import ContactFormSpec, _check_eps


def _times(t):
    return np.asarray(t, dtype=float)


def reeb_flow_closed(c, u0, t):
    """exp(c t/2) u0.  Broadcasts t against the leading axes of u0."""
    c = quat.as_vector(c)
    t = _times(t)
    g = quat.exp_pure(c, t / 2.0)
    out = quat.mul(quat.as_array(g), quat.as_array(u0))
    if out.ndim == 1 and isinstance(u0, quat.UnitQuaternion):
        return quat.UnitQuaternion.from_array(out)
    return out


def deformed_flow_closed(eps: float, u0, t):
    """(e^{i(1+eps)t/2} z0, e^{i(1-eps)t/2} z1) for u0 = z0 + z1 j."""
    eps = _check_eps(eps)
    t = _times(t)
    z0, z1 = quat.to_complex_pair(u0)
    w0 = np.exp(0.5j * (1.0 + eps) * t) * z0
    w1 = np.exp(0.5j * (1.0 - eps) * t) * z1
    out = quat.from_complex_pair(w0, w1)
    if out.ndim == 1 and isinstance(u0, quat.UnitQuaternion):
        return quat.UnitQuaternion.from_array(out)
    return out


def contact_flow(spec: ContactFormSpec, u0, t) -> np.ndarray:
    """Reeb flow of any family member; equals reeb_flow_closed for eps = 0."""
    a = spec.rotor
    v = quat.mul(quat.conj(a), quat.as_array(u0))
    return quat.mul(a, deformed_flow_closed(spec.eps, v, t))


def flow_speed(spec: ContactFormSpec) -> float:
    """Upper bound for |R(u)| on S^3."""
    return float(np.linalg.norm(spec.reeb_matrix, 2))


def minimal_period(spec: ContactFormSpec, u0, tol: float = 1e-12) -> float | None:
    """Minimal period of the orbit through u0, or None if it is not closed.

    Exact phase bookkeeping: the coordinate circles close at 4 pi/(1 +- eps);
    other orbits close only when (1 + eps)/(1 - eps) is rational.
    """
    v = quat.mul(quat.conj(spec.rotor), quat.as_array(u0))
    z0, z1 = quat.to_complex_pair(v)
    w0, w1 = 0.5 * (1.0 + spec.eps), 0.5 * (1.0 - spec.eps)
    if abs(z1) <= tol:
        return 2 * np.pi / w0
    if abs(z0) <= tol:
        return 2 * np.pi / w1
    r = Fraction(w0 / w1).limit_denominator(10**4)
    if abs(float(r) - w0 / w1) > 1e-9:
        return None
    # w0 T = 2 pi p', w1 T = 2 pi q' with p'/q' = r in lowest terms
    return 2 * np.pi * r.denominator / w1
