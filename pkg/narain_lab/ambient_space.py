"""L_o = H ⊕ H ⊕ (−Λ) in triplet coordinates (x, y, z) and its complexification.

x holds the coefficients of A′, B′, y those of A, B and z lies in Λ.
The pairing is x·y′ + x′·y − (z, z′).
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .lattice_core import Lattice, LatticeVector, build_lattice


def _vec(values, length: int, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind not in "iufcO":
        arr = arr.astype(complex)
    arr = arr.reshape(-1)
    if arr.shape[0] != length:
        raise DomainError(f"{what} must have length {length}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class ComplexTriplet:
    """An element (a, b, c) of L_o ⊗ C; c is given against the Λ basis.

    Integer or Fraction (object) entries keep arithmetic exact.
    """
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a, 2, "a"))
        object.__setattr__(self, "b", _vec(self.b, 2, "b"))
        object.__setattr__(self, "c", _vec(self.c, self.lattice.rank, "c"))

    def _check(self, other: "ComplexTriplet"):
        if self.lattice != other.lattice:
            raise DomainError(
                f"triplets over {self.lattice.name!r} and {other.lattice.name!r} do not mix")

    def __add__(self, other: "ComplexTriplet") -> "ComplexTriplet":
        self._check(other)
        return ComplexTriplet(self.a + other.a, self.b + other.b, self.c + other.c, self.lattice)

    def __sub__(self, other: "ComplexTriplet") -> "ComplexTriplet":
        self._check(other)
        return ComplexTriplet(self.a - other.a, self.b - other.b, self.c - other.c, self.lattice)

    def __neg__(self) -> "ComplexTriplet":
        return ComplexTriplet(-self.a, -self.b, -self.c, self.lattice)

    def __rmul__(self, scalar) -> "ComplexTriplet":
        return ComplexTriplet(scalar * self.a, scalar * self.b, scalar * self.c, self.lattice)

    def conj(self) -> "ComplexTriplet":
        return ComplexTriplet(np.conj(self.a), np.conj(self.b), np.conj(self.c), self.lattice)

    def to_vector(self) -> np.ndarray:
        """The 4 + rank coordinates against {A′, B′, A, B, Λ-basis}."""
        return np.concatenate([self.a, self.b, self.c])

    @classmethod
    def from_vector(cls, lattice: Lattice, values: Sequence) -> "ComplexTriplet":
        values = np.asarray(values)
        return cls(values[:2], values[2:4], values[4:], lattice)

    @classmethod
    def zero(cls, lattice: Lattice) -> "ComplexTriplet":
        return cls(np.zeros(2, dtype=np.int64), np.zeros(2, dtype=np.int64),
                   np.zeros(lattice.rank, dtype=np.int64), lattice)

    def allclose(self, other: "ComplexTriplet", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        self._check(other)
        return bool(np.allclose(self.to_vector().astype(complex),
                                other.to_vector().astype(complex), atol=atol, rtol=rtol))


@dataclass(frozen=True, eq=False)
class TripletVector:
    """An integral element (x, y, z) of L_o."""
    x: tuple[int, int]
    y: tuple[int, int]
    z: LatticeVector

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        object.__setattr__(self, "y", tuple(int(v) for v in self.y))
        if len(self.x) != 2 or len(self.y) != 2:
            raise DomainError("x and y must be integer pairs")

    @property
    def lattice(self) -> Lattice:
        return self.z.lattice

    def complexify(self) -> ComplexTriplet:
        return ComplexTriplet(np.array(self.x, dtype=np.int64), np.array(self.y, dtype=np.int64),
                              self.z.coords, self.lattice)


def as_triplet(v) -> ComplexTriplet:
    return v.complexify() if isinstance(v, TripletVector) else v


def pair(u, v) -> complex:
    """Bilinear ambient pairing x·y′ + x′·y − (z, z′)."""
    u, v = as_triplet(u), as_triplet(v)
    u._check(v)
    value = u.a @ v.b + v.a @ u.b - u.c @ u.lattice.gram @ v.c
    return value.item() if hasattr(value, "item") else value


def apply_T(x: Sequence) -> np.ndarray:
    """T(x1, x2) = (x2, −x1)."""
    x = np.asarray(x)
    return np.array([x[1], -x[0]])


def apply_N(v) -> ComplexTriplet:
    """N(x, y, z) = (0, Tx, 0)."""
    v = as_triplet(v)
    zero2 = np.zeros(2, dtype=v.a.dtype)
    return ComplexTriplet(zero2, apply_T(v.a), np.zeros_like(v.c), v.lattice)


def exp_N(lam, v) -> ComplexTriplet:
    """exp(λN)·v = v + λ·N(v), exact since N² = 0."""
    v = as_triplet(v)
    return ComplexTriplet(v.a, v.b + lam * apply_T(v.a), v.c, v.lattice)


def isotropic_plane(lattice: Lattice) -> tuple[ComplexTriplet, ComplexTriplet]:
    """The basis A, B of the isotropic plane V."""
    zero = np.zeros(lattice.rank, dtype=np.int64)
    a = ComplexTriplet([0, 0], [1, 0], zero, lattice)
    b = ComplexTriplet([0, 0], [0, 1], zero, lattice)
    return a, b


def nilpotent_from_plane(v) -> ComplexTriplet:
    """N(x) = (x, B)·A − (x, A)·B, built from the isotropic basis of V."""
    v = as_triplet(v)
    a, b = isotropic_plane(v.lattice)
    return pair(v, b) * a - pair(v, a) * b


def ambient_basis(lattice: Lattice) -> list[ComplexTriplet]:
    """Integral basis {A′, B′, A, B, Λ-basis} of L_o."""
    n = 4 + lattice.rank
    eye = np.eye(n, dtype=np.int64)
    return [ComplexTriplet.from_vector(lattice, row) for row in eye]


def ambient_gram(lattice: Lattice) -> np.ndarray:
    """Gram matrix of `ambient_basis` under `pair`."""
    basis = ambient_basis(lattice)
    return np.array([[pair(u, v) for v in basis] for u in basis], dtype=np.int64)


def ambient_lattice(lattice: Lattice) -> Lattice:
    return build_lattice(f"lo_{lattice.name}")


def nilpotent_matrix(lattice: Lattice) -> np.ndarray:
    """Matrix of N on the coordinates of `ambient_basis`."""
    n = 4 + lattice.rank
    out = np.zeros((n, n), dtype=np.int64)
    out[2, 1] = 1
    out[3, 0] = -1
    return out
