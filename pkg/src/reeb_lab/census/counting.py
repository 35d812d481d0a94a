"""Exact bookkeeping for periodic-orbit counts.

Reeb side: a Hamiltonian circle action on CP^n blown up a times has
n + 1 + a (n - 1) isolated fixed points, hence that many closed Reeb orbits
on the Boothby-Wang bundle.

Hypersurface side: an irrational ellipsoid in R^{2n+2} has n + 1 closed
characteristics; each surgery adds 4n - 1 (type b) or 4n (type c), and a
plug removes one (n >= 2) or, in dimension three (n = 1), trades one for two.

All arithmetic is on Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np


def fixed_point_count(n: int, a: int) -> int:
    if n < 1 or a < 0:
        raise ValueError("need n >= 1 and a >= 0")
    return n + 1 + a * (n - 1)


@dataclass
class ReebRealization:
    n: int
    k: int
    feasible: bool
    a: int | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        d = {"n": self.n, "k": self.k, "feasible": self.feasible, "a": self.a}
        if self.reason:
            d["reason"] = self.reason
        if self.feasible:
            d["trace"] = f"{self.n}+1+{self.a}*({self.n}-1) = {fixed_point_count(self.n, self.a)}"
        return d


def realize_reeb(n: int, k: int) -> ReebRealization:
    """Smallest a >= 0 with n + 1 + a (n - 1) = k."""
    if n < 2:
        raise ValueError("realize_reeb needs n >= 2")
    base, step = n + 1, n - 1
    if k < base:
        return ReebRealization(n, k, False, None, f"k < n + 1 = {base}")
    if (k - base) % step:
        return ReebRealization(
            n, k, False, None,
            f"k - (n + 1) = {k - base} is {(k - base) % step} mod {step}, not 0",
        )
    return ReebRealization(n, k, True, (k - base) // step)


@dataclass
class RealizabilityPlan:
    n: int
    k: int
    feasible: bool
    b: int = 0  # surgeries adding 4n - 1
    c: int = 0  # surgeries adding 4n
    plugs: int = 0
    trace: list = field(default_factory=list)
    reason: str = ""

    @property
    def base(self) -> int:
        return self.n + 1

    def count(self) -> int:
        plug = 1 if self.n == 1 else -1
        return self.base + self.b * (4 * self.n - 1) + self.c * 4 * self.n + plug * self.plugs

    def to_dict(self) -> dict:
        d = {"n": self.n, "k": self.k, "feasible": self.feasible}
        if self.feasible:
            d.update({"b": self.b, "c": self.c, "plugs": self.plugs, "trace": self.trace})
        else:
            d["reason"] = self.reason
        return d


def _trace(n: int, b: int, c: int, plugs: int) -> list:
    """Running counts: base, then every b-surgery, every c-surgery, every plug."""
    cur = n + 1
    out = [cur]
    for _ in range(b):
        cur += 4 * n - 1
        out.append(cur)
    for _ in range(c):
        cur += 4 * n
        out.append(cur)
    for _ in range(plugs):
        cur += 1 if n == 1 else -1
        if cur < 0:
            raise ArithmeticError("plug applied with no closed characteristic left")
        out.append(cur)
    return out


def _surgeries(n: int, m: int) -> tuple[int, int] | None:
    """(b, c) with b (4n - 1) + c 4n = m minimising b + c, then c; None if impossible."""
    if m < 0:
        return None
    p, q = 4 * n - 1, 4 * n
    best = None
    # b + c = s is forced to satisfy s p <= m <= s q, with c = m - s p
    for s in range(m // q, m // p + 1):
        c = m - s * p
        if 0 <= c <= s:
            cand = (s - c, c)
            if best is None or (sum(cand), cand[1]) < (sum(best), best[1]):
                best = cand
            break  # the smallest feasible s wins; c is then determined
    return best


def realize_hypersurface(n: int, k: int) -> RealizabilityPlan:
    """A plan reaching exactly k closed characteristics.

    Order of preference: fewest plugs, then fewest surgeries, then fewest
    4n-surgeries.  Surgeries come first, plugs after, and a plug in
    dimension >= 5 needs an existing orbit to destroy.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if k < 0:
        return RealizabilityPlan(n, k, False, reason="k must be non-negative")
    base = n + 1
    if n == 1 and k < base:
        return RealizabilityPlan(n, k, False, reason="in dimension three every plug adds one orbit, so k >= 2")
    # n >= 2: k + d must be reachable by surgeries; n = 1: k - d
    d = 0
    while True:
        target = k + d if n >= 2 else k - d
        bc = _surgeries(n, target - base)
        if bc is not None:
            b, c = bc
            plan = RealizabilityPlan(n, k, True, b, c, d, _trace(n, b, c, d))
            if plan.count() != k or plan.trace[-1] != k:
                raise ArithmeticError("plan does not reproduce k")
            return plan
        d += 1
        if n == 1 and k - d < base:
            raise ArithmeticError("unreachable")  # d = k - 2 always works


def threshold(n: int) -> int:
    """16 n^2 - 11 n + 3: every count from here on needs no plug."""
    if n < 2:
        raise ValueError("threshold needs n >= 2")
    return 16 * n * n - 11 * n + 3


def frobenius_two(p: int, q: int) -> int:
    """Largest integer not in the semigroup <p, q> for coprime p, q."""
    if gcd(p, q) != 1:
        raise ValueError("generators must be coprime")
    return p * q - p - q


def semigroup_onset(n: int, limit: int | None = None) -> int:
    """First m such that every integer >= m lies in n + 1 + <4n - 1, 4n>, by direct enumeration."""
    p, q = 4 * n - 1, 4 * n
    limit = limit or (p * q + n + 1)
    reach = [False] * (limit + 1)
    for b in range(limit // p + 1):
        for c in range((limit - b * p) // q + 1):
            v = n + 1 + b * p + c * q
            if v <= limit:
                reach[v] = True
    last_gap = max(i for i in range(limit + 1) if not reach[i])
    return last_gap + 1


def consecutive_block(n: int) -> list[int]:
    """The 4n - 1 counts from (b, c) = (4n - 2, 0), ..., (0, 4n - 2)."""
    m = 4 * n - 2
    return [n + 1 + (m - c) * (4 * n - 1) + c * 4 * n for c in range(m + 1)]


def brute_force_feasible(n: int, k: int, max_bc: int = 60, max_plugs: int = 200) -> bool:
    """Exhaustive search over b, c <= max_bc and plugs <= max_plugs."""
    if k < 0:
        return False
    sign = 1 if n == 1 else -1
    for b in range(max_bc + 1):
        for c in range(max_bc + 1):
            s = n + 1 + b * (4 * n - 1) + c * 4 * n
            d = (k - s) * sign
            if 0 <= d <= max_plugs:
                return True
    return False


# --- moment maps on CP^n -----------------------------------------------------------

@dataclass(frozen=True)
class WeightVector:
    weights: tuple

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise ValueError("need at least one weight")

    @property
    def n(self) -> int:
        return len(self.weights)

    def problems(self) -> list[str]:
        w = self.weights
        out = []
        if any(x == 0 for x in w):
            out.append("zero weight: fixed points are not isolated")
        if len(set(w)) != len(w):
            out.append("repeated weight: fixed points are not isolated")
        g = 0
        for x in w:
            g = gcd(g, x)
        if g != 1:
            out.append(f"gcd {g} != 1: the action is not effective")
        return out

    @property
    def effective_isolated(self) -> bool:
        return not self.problems()


def moment_value(w: WeightVector, z) -> float:
    """H([z0 : ... : zn]) = (1/2) sum_k w_k |z_k|^2 / sum_k |z_k|^2 (w_0 = 0).

    Computed in floating point; weights beyond 2^40 lose relative precision
    in the sum but the value is still returned.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != w.n + 1:
        raise ValueError(f"expected {w.n + 1} homogeneous coordinates")
    a = np.abs(z) ** 2
    den = a.sum(axis=-1)
    if np.any(den == 0):
        raise ValueError("the zero vector is not a point of CP^n")
    num = (a[..., 1:] * np.asarray(w.weights, dtype=float)).sum(axis=-1)
    return 0.5 * num / den


def fixed_points(w: WeightVector) -> list[list[int]]:
    """The coordinate points [1:0:...:0], ..., [0:...:0:1]."""
    return [[1 if j == i else 0 for j in range(w.n + 1)] for i in range(w.n + 1)]
