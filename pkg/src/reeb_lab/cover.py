"""The double cover Phi: S^3 -> ST*S^2, Hopf projection, latitude fits and holonomy.

Coordinates on S^2: `hopf_vector(u)` is conj(u) i u written in the raw
(i, j, k) components.  `hopf_project` relabels it into the cartesian
coordinates used for stereographic projection,

    conj(u) i u = x3 i - x2 j + x1 k,

and projects from the south pole (0, 0, -1), giving (x1 + i x2)/(1 + x3) = z1/z0
for u = z0 + z1 j.  [1:0] is x3 = +1, the origin of the plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import forms, quat


def phi(u) -> forms.STPoint:
    u = quat.as_array(u)
    return forms.STPoint(quat.rotate(u, quat.E_I), quat.rotate(u, quat.E_K), check=False)


def phi_array(u) -> np.ndarray:
    """Phi(u) flattened to R^6."""
    return phi(u).array


def d_phi(u, v) -> forms.STTangent:
    """(conj(v) i u + conj(u) i v, conj(v) k u + conj(u) k v)."""
    if isinstance(v, forms.S3Tangent):
        u, v = v.base, v.vec
    else:
        forms.S3Tangent(u, v)  # validates tangency
    u = quat.as_array(u)
    v = quat.as_array(v)
    uc, vc = quat.conj(u), quat.conj(v)
    out = []
    for e in (quat.I, quat.K):
        out.append((quat.mul(quat.mul(vc, e), u) + quat.mul(quat.mul(uc, e), v))[..., 1:])
    return forms.STTangent(phi(u), out[0], out[1], check=False)


PULLBACKS = {"lambda1": "j", "lambda2": "k", "alpha": "i"}


def pullback_residual(which: str, u, v) -> np.ndarray:
    """|Phi^* form (v) - alpha_c(v)| for (lambda1, alpha_j), (lambda2, alpha_k), (alpha, alpha_i)."""
    if which not in PULLBACKS:
        raise ValueError(f"unknown pullback {which!r}; expected one of {sorted(PULLBACKS)}")
    t = forms.S3Tangent(u, v)
    spec = forms.ContactFormSpec(tuple(forms.AXES[PULLBACKS[which]]))
    lhs = forms.liouville_cartan(which, d_phi(t.base, t.vec))
    return np.abs(lhs - forms.alpha_eval(spec, t))


# --- Hopf projection -------------------------------------------------------

def hopf_vector(u) -> np.ndarray:
    return quat.rotate(quat.as_array(u), quat.E_I)


def to_cartesian(v) -> np.ndarray:
    """Raw (i, j, k) components -> (x1, x2, x3)."""
    v = np.asarray(v, dtype=float)
    return np.stack([v[..., 2], -v[..., 1], v[..., 0]], axis=-1)


def from_cartesian(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 2], -x[..., 1], x[..., 0]], axis=-1)


@dataclass
class HopfPoint:
    xyz: np.ndarray  # cartesian (x1, x2, x3)
    stereo: np.ndarray  # complex; nan where undefined
    at_south_pole: np.ndarray  # bool


def hopf_project(u, pole_tol: float = 1e-14) -> HopfPoint:
    u = quat.as_array(u)
    xyz = to_cartesian(hopf_vector(u))
    # 1 + x3 = 2 |z0|^2 / |u|^2, evaluated without cancellation near the south pole
    den = 2.0 * (u[..., 0] ** 2 + u[..., 1] ** 2) / np.sum(u * u, axis=-1)
    south = np.abs(den) <= pole_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        st = np.where(south, np.nan + 0j, (xyz[..., 0] + 1j * xyz[..., 1]) / np.where(south, 1.0, den))
    return HopfPoint(xyz, st, south)


def z_ratio(u) -> np.ndarray:
    z0, z1 = quat.to_complex_pair(u)
    return z1 / z0


# --- circles of latitude ---------------------------------------------------

@dataclass
class LatitudeFit:
    axis: np.ndarray
    angle: float
    rms: float
    winding: int
    direction: int  # +1 counterclockwise about axis, -1 clockwise, 0 none


def latitude_fit(points, pole_hint=None) -> LatitudeFit:
    """Fit a circle of latitude to points on S^2.

    Total least squares for the plane <n, x> = d, then angle = arccos(d).
    The axis sign follows `pole_hint` if given, otherwise d >= 0.
    Winding counts full turns of the angular progression about the axis.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[0] < 8:
        raise ValueError("latitude_fit needs at least 8 points")
    m = p.mean(axis=0)
    spread = np.max(np.linalg.norm(p - p[0], axis=-1))
    if spread < 1e-14:
        return LatitudeFit(p[0] / np.linalg.norm(p[0]), 0.0, 0.0, 0, 0)
    _, _, vt = np.linalg.svd(p - m)
    n = vt[-1]
    d = float(n @ m)
    flip = (pole_hint is not None and float(n @ np.asarray(pole_hint, dtype=float)) < 0) or (
        pole_hint is None and d < 0
    )
    if flip:
        n, d = -n, -d
    rms = float(np.sqrt(np.mean((p @ n - d) ** 2)))
    e1 = vt[0] - (vt[0] @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    ang = np.unwrap(np.arctan2(p @ e2, p @ e1))
    total = float(ang[-1] - ang[0])
    winding = int(round(abs(total) / (2 * np.pi)))
    return LatitudeFit(n, float(np.arccos(np.clip(d, -1.0, 1.0))), rms, winding, int(np.sign(total)) if winding else 0)


# --- holonomy of the connection alpha along loops on S^2 ---------------------

@dataclass
class LoopOnS2:
    """Closed curve s -> S^2 for s in [0, 2 pi] (raw (i, j, k) components)."""

    curve: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    n: int = 512

    def __post_init__(self):
        gap = np.linalg.norm(self.curve(np.array([0.0]))[0] - self.curve(np.array([2 * np.pi]))[0])
        if gap > 1e-10:
            raise ValueError(f"loop is not closed (gap {gap:.2e})")

    def velocity(self, s: np.ndarray) -> np.ndarray:
        if self.derivative is not None:
            return self.derivative(s)
        h = 1e-6
        return (self.curve(s + h) - self.curve(s - h)) / (2 * h)

    @classmethod
    def latitude(cls, axis, angle: float, n: int = 512) -> "LoopOnS2":
        """Circle at angular distance `angle` from `axis`, counterclockwise about it."""
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
        helper = quat.E_J if abs(a[1]) < 0.9 else quat.E_K
        e1 = np.cross(helper, a)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(a, e1)
        ca, sa = np.cos(angle), np.sin(angle)

        def curve(s):
            s = np.asarray(s, dtype=float)[..., None]
            return ca * a + sa * (np.cos(s) * e1 + np.sin(s) * e2)

        def deriv(s):
            s = np.asarray(s, dtype=float)[..., None]
            return sa * (-np.sin(s) * e1 + np.cos(s) * e2)

        return cls(curve, deriv, n)

    @classmethod
    def constant(cls, point, n: int = 64) -> "LoopOnS2":
        p = np.asarray(point, dtype=float)
        p = p / np.linalg.norm(p)
        return cls(lambda s: np.broadcast_to(p, np.shape(s) + (3,)).copy(),
                   lambda s: np.zeros(np.shape(s) + (3,)), n)


@dataclass
class HolonomyResult:
    holonomy: float  # fibre displacement of the horizontal lift, in [0, 2 pi)
    area_integral: float  # -integral of sigma_0 over the spanning cone, mod 2 pi
    signed_area: float
    steps: int


def _wrap(a):
    return np.mod(a, 2 * np.pi)


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on R / 2 pi Z."""
    d = np.mod(a - b + np.pi, 2 * np.pi) - np.pi
    return float(abs(d))


def _transport(loop: LoopOnS2, y0: np.ndarray, n: int) -> np.ndarray:
    # alpha(x', y') = 0 together with the constraints gives y' = -<y, x'> x
    h = 2 * np.pi / n
    y = y0.copy()

    def f(s, y):
        x = loop.curve(np.array([s]))[0]
        dx = loop.velocity(np.array([s]))[0]
        return -float(y @ dx) * x

    for k in range(n):
        s = k * h
        k1 = f(s, y)
        k2 = f(s + h / 2, y + h / 2 * k1)
        k3 = f(s + h / 2, y + h / 2 * k2)
        k4 = f(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x = loop.curve(np.array([s + h]))[0]
        y = y - (y @ x) * x
        y /= np.linalg.norm(y)
    return y


def cone_area(loop: LoopOnS2, n: int = 1 << 16, center=None) -> float:
    """Signed area of the geodesic cone over the loop from `center`.

    Defaults to the normalised centroid (or the plane-fit normal when the
    centroid vanishes, e.g. for great circles).
    """
    s = np.linspace(0.0, 2 * np.pi, n + 1)
    p = loop.curve(s)
    if center is None:
        m = p[:-1].mean(axis=0)
        if np.linalg.norm(m) > 1e-3:
            center = m
        else:
            center = np.linalg.svd(p[:-1] - m, full_matrices=False)[2][-1]
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    a, b = p[:-1], p[1:]
    num = np.einsum("i,ni->n", c, np.cross(a, b))
    den = 1.0 + a @ c + np.sum(a * b, axis=-1) + b @ c
    return float(np.sum(2.0 * np.arctan2(num, den)))


def holonomy(
    loop: LoopOnS2, basepoint: forms.STPoint | None = None, tol: float = 1e-10, max_steps: int = 1 << 17
) -> HolonomyResult:
    """Fibre displacement of the alpha-horizontal lift of `loop` after one circuit."""
    x0 = loop.curve(np.array([0.0]))[0]
    if basepoint is None:
        helper = quat.E_J if abs(x0[1]) < 0.9 else quat.E_K
        y0 = np.cross(helper, x0)
        y0 /= np.linalg.norm(y0)
    else:
        if np.linalg.norm(basepoint.x - x0) > 1e-10:
            raise ValueError("basepoint must lie in the fibre over loop(0)")
        y0 = np.asarray(basepoint.y, dtype=float)
    positive = np.cross(y0, x0)  # positive fibre direction at (x0, y0)

    def disp(n):
        y = _transport(loop, y0, n)
        return float(_wrap(np.arctan2(y @ positive, y @ y0)))

    n = loop.n
    prev = disp(n)
    while True:
        n *= 2
        cur = disp(n)
        if angle_distance(cur, prev) < tol:
            break
        if n >= max_steps:
            raise RuntimeError(f"holonomy did not converge with {n} steps")
        prev = cur
    area = cone_area(loop)
    return HolonomyResult(cur, float(_wrap(-area)), area, n)


# --- report helpers shared with the command line -----------------------------

def projection_record(u) -> dict:
    """Phi, Hopf point (cartesian) and stereographic value of each u; a latitude fit when there are enough points."""
    u = quat.normalize(np.atleast_2d(quat.as_array(u)))
    st = phi(u)
    hp = hopf_project(u)
    rec = {
        "points": [
            {
                "u": list(ui),
                "phi_x": list(xi),
                "phi_y": list(yi),
                "hopf": list(hi),
                "stereo": None if south else [float(si.real), float(si.imag)],
            }
            for ui, xi, yi, hi, si, south in zip(u, st.x, st.y, hp.xyz, hp.stereo, hp.at_south_pole)
        ]
    }
    if len(u) >= 8:
        fit = latitude_fit(hp.xyz)
        rec["latitude_fit"] = {"axis": list(fit.axis), "angle": fit.angle, "rms": fit.rms,
                               "winding": fit.winding, "direction": fit.direction}
    return rec


def latitude_holonomy(axis, angle: float) -> dict:
    """Holonomy of a latitude loop against -(cap area) mod 2 pi."""
    r = holonomy(LoopOnS2.latitude(axis, angle))
    target = float(_wrap(-2 * np.pi * (1 - np.cos(angle))))
    return {"axis": list(np.asarray(axis, dtype=float)), "angle": float(angle), "holonomy": r.holonomy,
            "cone_integral": r.area_integral, "signed_area": r.signed_area, "expected": target,
            "distance": angle_distance(r.holonomy, target), "steps": r.steps}
