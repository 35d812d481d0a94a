"""Quaternion algebra on H = R^4 and the double cover S^3 -> SO(3).

Components are always ordered (w, x, y, z) for 1, i, j, k with ij = k.
The array functions broadcast over leading axes, so a batch of quaternions
is simply an array of shape (..., 4) and a batch of pure imaginary
quaternions (vectors of R^3) an array of shape (..., 3).

The small dataclasses below wrap single values for readable scalar code;
every function accepts them as well as raw arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])

E_I = np.array([1.0, 0.0, 0.0])
E_J = np.array([0.0, 1.0, 0.0])
E_K = np.array([0.0, 0.0, 1.0])

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def real(self) -> float:
        return self.w

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array + other.array)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array - other.array)

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.array)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        return Quaternion.from_array(self.array * float(other))

    __rmul__ = __mul__


class UnitQuaternion(Quaternion):
    """A point of S^3.  Renormalised on construction, so products of unit
    quaternions never drift off the sphere."""

    def __init__(self, w: float, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        a = np.array([w, x, y, z], dtype=float)
        n = np.linalg.norm(a)
        if n == 0.0:
            raise ValueError("zero quaternion has no direction")
        a = a / n
        super().__init__(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def from_array(cls, a) -> "UnitQuaternion":
        a = np.asarray(a, dtype=float)
        return cls(*a[:4])

    def conj(self) -> "UnitQuaternion":
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, UnitQuaternion):
            return UnitQuaternion.from_array(_mul(self.array, other.array))
        return Quaternion.__mul__(self, other)


@dataclass(frozen=True)
class PureImaginary:
    """x1 i + x2 j + x3 k, i.e. a vector of R^3."""

    x1: float
    x2: float
    x3: float

    @classmethod
    def from_array(cls, a) -> "PureImaginary":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def to_quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x1, self.x2, self.x3)


def as_array(q) -> np.ndarray:
    """Quaternion-like (dataclass, PureImaginary or array) -> float array (..., 4)."""
    if isinstance(q, Quaternion):
        return q.array
    if isinstance(q, PureImaginary):
        return np.concatenate([[0.0], q.array])
    a = np.asarray(q, dtype=float)
    if a.shape[-1] == 3:
        return embed(a)
    return a


def as_vector(x) -> np.ndarray:
    if isinstance(x, PureImaginary):
        return x.array
    if isinstance(x, Quaternion):
        return x.array[1:]
    a = np.asarray(x, dtype=float)
    return a[..., 1:] if a.shape[-1] == 4 else a


def embed(x) -> np.ndarray:
    """R^3 -> pure imaginary quaternions."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([np.zeros(x.shape[:-1] + (1,)), x], axis=-1)


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    out[..., 1] = a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2
    out[..., 2] = a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1
    out[..., 3] = a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0
    return out


def mul(a, b):
    """Hamilton product.  Dataclass in, dataclass out; arrays broadcast."""
    out = _mul(as_array(a), as_array(b))
    if isinstance(a, UnitQuaternion) and isinstance(b, UnitQuaternion):
        return UnitQuaternion.from_array(out)
    if isinstance(a, Quaternion) and isinstance(b, Quaternion):
        return Quaternion.from_array(out)
    return out


def conj(q):
    if isinstance(q, Quaternion):
        return q.conj()
    return as_array(q) * _CONJ


def norm(q) -> np.ndarray:
    return np.linalg.norm(as_array(q), axis=-1)


def normalize(q) -> np.ndarray:
    a = as_array(q)
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def inner(a, b):
    """<a, b> = Real(a conj(b))."""
    return _mul(as_array(a), as_array(b) * _CONJ)[..., 0]


def exp_pure(c, s):
    """cos(s) + c sin(s) for a unit pure imaginary axis c.

    Broadcasts over s.  Raises ValueError for a non-unit axis.
    """
    c = as_vector(c)
    if np.any(np.abs(np.linalg.norm(c, axis=-1) - 1.0) > UNIT_TOL):
        raise ValueError("exp_pure needs a unit axis")
    s = np.asarray(s, dtype=float)
    out = np.concatenate(
        [np.cos(s)[..., None], np.sin(s)[..., None] * c], axis=-1
    )
    if out.ndim == 1:
        return UnitQuaternion.from_array(out)
    return out


def rotate(u, x):
    """f_u(x) = conj(u) x u, the SO(3) element attached to u.

    With this convention f_v(f_u(x)) = f_{uv}(x).
    """
    ua = as_array(u)
    out = _mul(_mul(ua * _CONJ, as_array(x)), ua)[..., 1:]
    if isinstance(x, PureImaginary) or isinstance(u, Quaternion):
        if out.ndim == 1:
            return PureImaginary.from_array(out)
    return out


def rotation_matrix(u) -> np.ndarray:
    """Matrix of f_u; columns are f_u(i), f_u(j), f_u(k)."""
    ua = as_array(u)
    cols = [rotate(ua, e) for e in (E_I, E_J, E_K)]
    return np.stack([np.asarray(c) for c in cols], axis=-1)


def from_rotation_matrix(m) -> np.ndarray:
    """A unit quaternion u with rotation_matrix(u) == m (sign of u arbitrary).

    Shepperd's method on the standard rotor q with q x conj(q) = m x; our
    convention is u = conj(q).  Batched over leading axes.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise ValueError("expected 3 x 3 matrices")
    gram = np.swapaxes(m, -1, -2) @ m
    if np.max(np.abs(gram - np.eye(3)), initial=0.0) > 1e-9 or np.any(np.linalg.det(m) <= 0):
        raise ValueError("not a rotation matrix (needs m^T m = 1 and det m = +1)")
    m00, m11, m22 = m[..., 0, 0], m[..., 1, 1], m[..., 2, 2]
    tr = m00 + m11 + m22
    a = m[..., 2, 1] - m[..., 1, 2]
    b = m[..., 0, 2] - m[..., 2, 0]
    c = m[..., 1, 0] - m[..., 0, 1]
    d = m[..., 0, 1] + m[..., 1, 0]
    e = m[..., 0, 2] + m[..., 2, 0]
    f = m[..., 1, 2] + m[..., 2, 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        s0 = 2.0 * np.sqrt(np.maximum(1.0 + tr, 0.0))
        s1 = 2.0 * np.sqrt(np.maximum(1.0 + m00 - m11 - m22, 0.0))
        s2 = 2.0 * np.sqrt(np.maximum(1.0 + m11 - m00 - m22, 0.0))
        s3 = 2.0 * np.sqrt(np.maximum(1.0 + m22 - m00 - m11, 0.0))
        cands = np.stack(
            [
                np.stack([s0 / 4, a / s0, b / s0, c / s0], axis=-1),
                np.stack([a / s1, s1 / 4, d / s1, e / s1], axis=-1),
                np.stack([b / s2, d / s2, s2 / 4, f / s2], axis=-1),
                np.stack([c / s3, e / s3, f / s3, s3 / 4], axis=-1),
            ],
            axis=-2,
        )
    k = np.argmax(np.stack([tr, m00, m11, m22], axis=-1), axis=-1)
    q = np.take_along_axis(cands, k[..., None, None], axis=-2)[..., 0, :]
    return normalize(q * _CONJ)


def left_matrix(a) -> np.ndarray:
    """4x4 matrix L_a with L_a q = a q (batched over leading axes of a)."""
    a = as_array(a)
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    rows = [[a0, -a1, -a2, -a3], [a1, a0, -a3, a2], [a2, a3, a0, -a1], [a3, -a2, a1, a0]]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def right_matrix(b) -> np.ndarray:
    """4x4 matrix with q -> q b."""
    return np.stack([_mul(e, as_array(b)) for e in np.eye(4)], axis=-1)


def cross_check(x, y) -> float:
    """Max-norm residual of (xy - yx) - 2 x cross y."""
    x = as_vector(x)
    y = as_vector(y)
    xq, yq = embed(x), embed(y)
    comm = _mul(xq, yq) - _mul(yq, xq)
    res = comm - embed(2.0 * np.cross(x, y))
    return float(np.max(np.abs(res)))


def rotor_to(c) -> np.ndarray:
    """A unit quaternion a with a i conj(a) = c.

    The minimal rotation from i to c about i x c; for c = i cos(t) + j sin(t)
    with t in (-pi, pi] this is cos(t/2) + k sin(t/2) up to sign.
    """
    c = as_vector(c)
    c = c / np.linalg.norm(c)
    d = float(np.dot(E_I, c))
    if d < -1.0 + 1e-15:
        return K.copy()
    v = np.cross(E_I, c)
    return normalize(np.concatenate([[1.0 + d], v]))


def theta_rotor(theta: float) -> np.ndarray:
    """a = cos(theta/2) + k sin(theta/2), so that a i conj(a) = i cos(theta) + j sin(theta)."""
    return np.array([np.cos(theta / 2), 0.0, 0.0, np.sin(theta / 2)])


def theta_axis(theta: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta), 0.0])


# C^2 <-> H via (z0, z1) -> z0 + z1 j.

def from_complex_pair(z0, z1) -> np.ndarray:
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    return np.stack([z0.real, z0.imag, z1.real, z1.imag], axis=-1)


def to_complex_pair(u) -> tuple[np.ndarray, np.ndarray]:
    a = as_array(u)
    return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]


def random_unit(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    shape = (4,) if n is None else (n, 4)
    return normalize(rng.normal(size=shape))


def random_unit_vector(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    shape = (3,) if n is None else (n, 3)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
