"""Points on E_τ = C/(Z + τZ), the extension map ψ and special families.

Divisor classes of equal degree on E are compared through the group law
with base point 0, so every condition becomes an identity of torus sums.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .lattice_core import build_lattice, simple_roots
from .parabolic_group import check_upper

logger = logging.getLogger(__name__)

CATEGORIES = ("a", "b")
POINT_COUNT = 18
DEFAULT_TOL = 1e-9


def _lattice_coords(value: complex, tau: complex) -> tuple[float, float]:
    """(s, t) with value = s + tτ."""
    t = value.imag / tau.imag
    return value.real - t * tau.real, t


def lattice_distance(value: complex, tau: complex) -> float:
    """Distance from value to the nearest point of Z + τZ."""
    s, t = _lattice_coords(value, tau)
    best = math.inf
    for ds in (0, 1):
        for dt in (0, 1):
            ks, kt = math.floor(s) + ds, math.floor(t) + dt
            best = min(best, abs(complex(s - ks) + (t - kt) * tau))
    return best


@dataclass(frozen=True)
class ComplexTorusPoint:
    """A point of E_τ, held by its representative in {s + tτ : s, t ∈ [0, 1)}."""
    value: complex
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        check_upper(tau)
        s, t = _lattice_coords(complex(self.value), tau)
        s, t = s - math.floor(s), t - math.floor(t)
        if s >= 1.0:
            s -= 1.0
        if t >= 1.0:
            t -= 1.0
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "value", complex(s) + t * tau)

    @classmethod
    def zero(cls, tau: complex) -> "ComplexTorusPoint":
        return cls(0j, tau)

    def _check(self, other: "ComplexTorusPoint"):
        if abs(self.tau - other.tau) > 1e-15 * max(1.0, abs(self.tau)):
            raise DomainError(f"points on different curves: τ={self.tau} and τ={other.tau}")

    def __add__(self, other: "ComplexTorusPoint") -> "ComplexTorusPoint":
        self._check(other)
        return ComplexTorusPoint(self.value + other.value, self.tau)

    def __sub__(self, other: "ComplexTorusPoint") -> "ComplexTorusPoint":
        self._check(other)
        return ComplexTorusPoint(self.value - other.value, self.tau)

    def __neg__(self) -> "ComplexTorusPoint":
        return ComplexTorusPoint(-self.value, self.tau)

    def __rmul__(self, n: int) -> "ComplexTorusPoint":
        return torus_scale(self, n)

    def distance(self, other: "ComplexTorusPoint") -> float:
        self._check(other)
        return lattice_distance(self.value - other.value, self.tau)

    def close_to(self, other: "ComplexTorusPoint", tol: float = DEFAULT_TOL) -> bool:
        return self.distance(other) < tol


def torus_add(p: ComplexTorusPoint, q: ComplexTorusPoint) -> ComplexTorusPoint:
    return p + q


def torus_neg(p: ComplexTorusPoint) -> ComplexTorusPoint:
    return -p


def torus_scale(p: ComplexTorusPoint, n: int) -> ComplexTorusPoint:
    """n·p by double-and-add."""
    n = int(n)
    if n < 0:
        return torus_scale(-p, -n)
    result = ComplexTorusPoint.zero(p.tau)
    base = p
    while n:
        if n & 1:
            result = result + base
        base = base + base
        n >>= 1
    return result


def torus_sum(points: Sequence[ComplexTorusPoint], tau: complex) -> ComplexTorusPoint:
    total = ComplexTorusPoint.zero(tau)
    for p in points:
        total = total + p
    return total


def torus_divide(p: ComplexTorusPoint, n: int, branch: tuple[int, int] = (0, 0)) -> ComplexTorusPoint:
    """The preimage (p + k + lτ)/n of p under multiplication by n, branch = (k, l)."""
    if n < 1:
        raise DomainError(f"cannot divide by {n}")
    k, l = branch
    if not (0 <= k < n and 0 <= l < n):
        raise DomainError(f"branch {branch} out of range for n={n}")
    return ComplexTorusPoint((p.value + k + l * p.tau) / n, p.tau)


def as_point(value, tau: complex) -> ComplexTorusPoint:
    if isinstance(value, ComplexTorusPoint):
        if abs(value.tau - complex(tau)) > 1e-15 * max(1.0, abs(tau)):
            raise DomainError("ψ value lives on a different curve")
        return value
    return ComplexTorusPoint(complex(value), tau)


# -- ψ --------------------------------------------------------------------------------

def psi_of(tau: complex, z, gamma, lattice_name: str = "e8e8") -> ComplexTorusPoint:
    """ψ(γ) = (γ, z) mod Z + τZ; with z = z2 − τz1 this is (γ, z2) − τ(γ, z1)."""
    lattice = build_lattice(lattice_name)
    gamma = np.asarray(gamma, dtype=np.int64)
    return ComplexTorusPoint(complex(gamma @ lattice.gram @ np.asarray(z, dtype=complex)), tau)


def psi_values(lattice_name: str, tau: complex, z) -> list[ComplexTorusPoint]:
    """ψ on the sixteen simple roots, in the order a1..a8, b1..b8 or c1..c16."""
    roots = simple_roots(lattice_name)
    return [psi_of(tau, z, r.coords, lattice_name) for r in roots.roots]


# -- special families -----------------------------------------------------------------

@dataclass(frozen=True)
class SpecialFamily:
    """{3p0; p1..pt; 3q0; p_{t+1}..p18} on E_τ."""
    tau: complex
    p0: ComplexTorusPoint
    q0: ComplexTorusPoint
    points: tuple[ComplexTorusPoint, ...]
    t: int
    category: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise DomainError(f"unknown category {self.category!r}")
        if len(self.points) != POINT_COUNT:
            raise DomainError(f"a special family has {POINT_COUNT} points, got {len(self.points)}")
        if self.category == "a" and self.t != 9:
            raise DomainError("category (a) requires t = 9")
        if self.category == "b" and not 2 <= self.t <= 17:
            raise DomainError("category (b) requires 2 ≤ t ≤ 17")
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "points", tuple(self.points))

    def point(self, i: int) -> ComplexTorusPoint:
        """p_i, 1-based."""
        return self.points[i - 1]

    def perturbed(self, index: int, delta: complex) -> "SpecialFamily":
        points = list(self.points)
        points[index - 1] = ComplexTorusPoint(points[index - 1].value + delta, self.tau)
        return SpecialFamily(self.tau, self.p0, self.q0, tuple(points), self.t, self.category)

    def to_dict(self) -> dict:
        def enc(p: ComplexTorusPoint) -> list[float]:
            return [p.value.real, p.value.imag]
        return {"category": self.category, "t": self.t, "tau": [self.tau.real, self.tau.imag],
                "p0": enc(self.p0), "q0": enc(self.q0), "points": [enc(p) for p in self.points]}

    @classmethod
    def from_dict(cls, data: dict) -> "SpecialFamily":
        tau = complex(*data["tau"])

        def dec(v) -> ComplexTorusPoint:
            return ComplexTorusPoint(complex(*v), tau)
        return cls(tau, dec(data["p0"]), dec(data["q0"]), tuple(dec(v) for v in data["points"]),
                   int(data["t"]), data["category"])


@dataclass
class FamilyReport:
    category: str
    conditions: dict[str, float] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return all(err < self.tol for err in self.conditions.values())

    @property
    def max_error(self) -> float:
        return max(self.conditions.values(), default=0.0)

    def to_dict(self) -> dict:
        return {"category": self.category, "conditions": dict(self.conditions),
                "max_error": self.max_error, "pass": self.passed}


def verify_special_family(fam: SpecialFamily, tol: float = DEFAULT_TOL) -> FamilyReport:
    report = FamilyReport(fam.category, tol=tol)
    tau = fam.tau
    pts = fam.points
    if fam.category == "a":
        report.conditions["p9 = p18"] = fam.point(9).distance(fam.point(18))
        report.conditions["p1+…+p9 = 9p0"] = torus_sum(pts[:9], tau).distance(9 * fam.p0)
        report.conditions["p10+…+p18 = 9q0"] = torus_sum(pts[9:], tau).distance(9 * fam.q0)
    else:
        report.conditions["p1 = p2"] = fam.point(1).distance(fam.point(2))
        report.conditions["p1+…+p18 = 9p0+9q0"] = torus_sum(pts, tau).distance(9 * fam.p0 + 9 * fam.q0)
        lhs = 3 * fam.p0 - fam.point(1)
        rhs = 3 * fam.q0 - fam.point(fam.t + 1)
        report.conditions["3p0-p1 = 3q0-p(t+1)"] = lhs.distance(rhs)
    logger.debug("family (%s) max error %.3g", fam.category, report.max_error)
    return report


def _psi_list(tau: complex, psi: Sequence) -> list[ComplexTorusPoint]:
    if len(psi) != 16:
        raise DomainError(f"expected sixteen ψ values, got {len(psi)}")
    return [as_point(v, tau) for v in psi]


def construct_family_a(tau: complex, psi: Sequence, first_branch: tuple[int, int] = (0, 0),
                       q0_branch: tuple[int, int] = (0, 0)) -> SpecialFamily:
    """Category (a) from ψ(a1..a8), ψ(b1..b8): points x1..x9 then y1..y9, with p0 = 0."""
    tau = complex(tau)
    vals = _psi_list(tau, psi)
    a, b = vals[:8], vals[8:]
    x = [torus_divide(2 * a[0] + a[1] - a[7], 3, first_branch)]
    for l in range(2, 9):
        x.append(x[-1] - a[l - 2])
    x.append(-torus_sum(x, tau))
    weighted = torus_sum([(7 - k) * b[k] for k in range(7)], tau)
    head = 2 * b[0] + b[1] - b[7]
    y = [x[8] + weighted - 3 * head]
    for l in range(2, 9):
        y.append(y[-1] + b[l - 2])
    y.append(x[8])
    q0 = torus_divide(head + 3 * y[0], 3, q0_branch)
    return SpecialFamily(tau, ComplexTorusPoint.zero(tau), q0, tuple(x + y), 9, "a")


def construct_family_b(tau: complex, psi: Sequence, first_branch: tuple[int, int] = (0, 0),
                       q0_branch: tuple[int, int] = (0, 0)) -> SpecialFamily:
    """Category (b) from ψ(c1..c16): p1 = p2, the chain p3..p17, then q0 and p18 = p1 + 3q0."""
    tau = complex(tau)
    c = _psi_list(tau, psi)
    rhs = torus_sum([2 * v for v in c[:14]] + [c[14], c[15]], tau)
    p = [torus_divide(-rhs, 3, first_branch)]
    p.append(p[0])
    for l in range(3, 18):
        p.append(p[-1] - c[l - 3])
    q0 = torus_divide(p[0] + torus_sum(p[:17], tau), 6, q0_branch)
    p.append(p[0] + 3 * q0)
    return SpecialFamily(tau, ComplexTorusPoint.zero(tau), q0, tuple(p), 17, "b")


def root_periods(fam: SpecialFamily) -> dict[str, ComplexTorusPoint]:
    """ψ on the blowdown roots read off the points.

    Category (a): E_i ↦ x_i, H1 ↦ 3p0 on the first surface, the second with
    reversed sign and H2 ↦ 3q0. Category (b): the chain roots c2..c15 only.
    """
    pt = fam.point
    tau = fam.tau
    if fam.category == "a":
        out = {f"a{i}": pt(i) - pt(i + 1) for i in range(1, 8)}
        out["a8"] = 3 * fam.p0 - torus_sum([pt(1), pt(2), pt(3)], tau)
        out.update({f"b{i}": pt(10 + i) - pt(9 + i) for i in range(1, 8)})
        out["b8"] = torus_sum([pt(10), pt(11), pt(12)], tau) - 3 * fam.q0
        return out
    return {f"c{k}": pt(k + 1) - pt(k + 2) for k in range(2, 16)}


def check_root_periods(fam: SpecialFamily, psi: Sequence, tol: float = DEFAULT_TOL) -> float:
    """Largest torus distance between root_periods and the ψ values used to build fam."""
    labels = [f"a{i}" for i in range(1, 9)] + [f"b{i}" for i in range(1, 9)]
    if fam.category == "b":
        labels = [f"c{i}" for i in range(1, 17)]
    given = dict(zip(labels, _psi_list(fam.tau, psi)))
    read = root_periods(fam)
    return max(read[k].distance(given[k]) for k in read)


def random_psi(rng: np.random.Generator, tau: complex) -> list[ComplexTorusPoint]:
    s, t = rng.random(16), rng.random(16)
    return [ComplexTorusPoint(complex(si) + ti * tau, tau) for si, ti in zip(s, t)]
