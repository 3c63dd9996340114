"""The parabolic group Γ_F⁺ of matrices g(m, Q, R, f) and its image Π.

On triplets (x, y, z) the element g(m, Q, R, f) acts by the block matrix

    [ m     0   0  ]
    [ R     m̃   Qf ]
    [ Q*m   0   f  ]

with m̃ = (mᵀ)⁻¹ and Q* = G⁻¹Qᵀ the adjoint of Q: Λ → Z² for the Gram form G.
Q is stored pairing-contracted: Q(γ) = (−(γ, q2), (γ, q1)), so that the
translation part of α(g) is (q1, q2).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .ambient_space import ComplexTriplet, as_triplet
from .errors import ConventionError, DomainError
from .lattice_core import (
    Lattice,
    LatticeVector,
    build_lattice,
    integral_inverse,
    reflection_matrix,
    simple_roots,
)

logger = logging.getLogger(__name__)

I2 = np.eye(2, dtype=np.int64)
S_GEN = np.array([[0, -1], [1, 0]], dtype=np.int64)
T_GEN = np.array([[1, 1], [0, 1]], dtype=np.int64)


@lru_cache(maxsize=None)
def _gram_inverse(name: str) -> np.ndarray:
    return integral_inverse(build_lattice(name).gram)


def _int2(matrix) -> np.ndarray:
    out = np.array(matrix, dtype=np.int64)
    if out.shape != (2, 2):
        raise DomainError(f"expected a 2×2 matrix, got shape {out.shape}")
    return out


def sl2_inverse(m: np.ndarray) -> np.ndarray:
    (a, b), (c, d) = m
    return np.array([[d, -b], [-c, a]], dtype=np.int64)


def tilde(m: np.ndarray) -> np.ndarray:
    """m̃ = (mᵀ)⁻¹ for m ∈ SL2(Z)."""
    (a, b), (c, d) = m
    return np.array([[d, -c], [-b, a]], dtype=np.int64)


def det2(m: np.ndarray) -> int:
    return int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def adjoint(lattice: Lattice, q: np.ndarray) -> np.ndarray:
    """Q* = G⁻¹Qᵀ, the map Z² → Λ with (Q*u, γ) = u·Qγ."""
    return _gram_inverse(lattice.name) @ q.T


def isometry_inverse(lattice: Lattice, f: np.ndarray) -> np.ndarray:
    return _gram_inverse(lattice.name) @ f.T @ lattice.gram


@dataclass(frozen=True, eq=False)
class ParabolicElement:
    m: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    f: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        rank = self.lattice.rank
        object.__setattr__(self, "m", _int2(self.m))
        object.__setattr__(self, "R", _int2(self.R))
        q = np.array(self.Q, dtype=np.int64)
        f = np.array(self.f, dtype=np.int64)
        if q.shape != (2, rank) or f.shape != (rank, rank):
            raise DomainError(f"Q must be 2×{rank} and f {rank}×{rank}")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "f", f)
        if det2(self.m) != 1:
            raise DomainError(f"det(m) = {det2(self.m)}, expected 1")
        gram = self.lattice.gram
        if not np.array_equal(f.T @ gram @ f, gram):
            raise DomainError("f is not an isometry of Λ")
        if not self.satisfies_constraint():
            raise DomainError("R violates Rᵀm + mᵀR = mᵀQQ*m")

    def qq(self) -> np.ndarray:
        """QQ*, the 2×2 Gram matrix of the rows of Q."""
        return self.Q @ adjoint(self.lattice, self.Q)

    def satisfies_constraint(self) -> bool:
        m, r = self.m, self.R
        return bool(np.array_equal(r.T @ m + m.T @ r, m.T @ self.qq() @ m))

    def __eq__(self, other):
        if not isinstance(other, ParabolicElement):
            return NotImplemented
        return (self.lattice == other.lattice
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("m", "Q", "R", "f")))

    def __hash__(self):
        return hash(tuple(getattr(self, k).tobytes() for k in ("m", "Q", "R", "f")))

    def __mul__(self, other: "ParabolicElement") -> "ParabolicElement":
        return multiply(self, other)

    def __neg__(self) -> "ParabolicElement":
        return ParabolicElement(-self.m, self.Q, -self.R, -self.f, self.lattice)

    def to_matrix(self) -> np.ndarray:
        """The action on the coordinates (x, y, z) of L_o."""
        rank = self.lattice.rank
        out = np.zeros((4 + rank, 4 + rank), dtype=np.int64)
        out[:2, :2] = self.m
        out[2:4, :2] = self.R
        out[2:4, 2:4] = tilde(self.m)
        out[2:4, 4:] = self.Q @ self.f
        out[4:, :2] = adjoint(self.lattice, self.Q) @ self.m
        out[4:, 4:] = self.f
        return out

    def to_dict(self) -> dict:
        return {"lattice": self.lattice.name, "m": self.m.tolist(), "Q": self.Q.tolist(),
                "R": self.R.tolist(), "f": self.f.tolist()}

    @classmethod
    def from_dict(cls, data: dict, lattice: Lattice | None = None) -> "ParabolicElement":
        if lattice is None:
            lattice = build_lattice(data.get("lattice", "e8e8"))
        return cls(data["m"], data["Q"], data["R"], data["f"], lattice)


# -- constructors --------------------------------------------------------------

def identity(lattice: Lattice) -> ParabolicElement:
    rank = lattice.rank
    return ParabolicElement(I2, np.zeros((2, rank), dtype=np.int64), np.zeros((2, 2), dtype=np.int64),
                            np.eye(rank, dtype=np.int64), lattice)


def modular_element(lattice: Lattice, m) -> ParabolicElement:
    """g(m, 0, 0, I) ∈ S."""
    g = identity(lattice)
    return ParabolicElement(m, g.Q, g.R, g.f, lattice)


def isometry_element(lattice: Lattice, f) -> ParabolicElement:
    """g(I, 0, 0, f) ∈ W."""
    g = identity(lattice)
    return ParabolicElement(I2, g.Q, g.R, f, lattice)


def unipotent_element(lattice: Lattice, k: int) -> ParabolicElement:
    """g(I, 0, kT, I) ∈ U(N)_Z; acts as exp(kN)."""
    g = identity(lattice)
    return ParabolicElement(I2, g.Q, k * np.array([[0, 1], [-1, 0]]), g.f, lattice)


def translation_q(lattice: Lattice, q1, q2) -> np.ndarray:
    """Q with Q(γ) = (−(γ, q2), (γ, q1))."""
    gram = lattice.gram
    return np.array([-(gram @ np.asarray(q2, dtype=np.int64)),
                     gram @ np.asarray(q1, dtype=np.int64)], dtype=np.int64)


def complete_r(qq: np.ndarray) -> np.ndarray:
    """Integral R with R + Rᵀ = QQ*: [[½(q2,q2), −(q1,q2)], [0, ½(q1,q1)]]."""
    if qq[0, 0] % 2 or qq[1, 1] % 2:
        raise ConventionError("QQ* has odd diagonal; Λ is not even")
    return np.array([[qq[0, 0] // 2, qq[0, 1]], [0, qq[1, 1] // 2]], dtype=np.int64)


def translation_element(lattice: Lattice, q1, q2) -> ParabolicElement:
    """g(I, Q, R, I) ∈ T whose image in Π translates z by q1 + τq2."""
    if isinstance(q1, LatticeVector):
        q1 = q1.coords
    if isinstance(q2, LatticeVector):
        q2 = q2.coords
    q = translation_q(lattice, q1, q2)
    r = complete_r(q @ adjoint(lattice, q))
    return ParabolicElement(I2, q, r, np.eye(lattice.rank, dtype=np.int64), lattice)


def translation_vectors(g: ParabolicElement) -> tuple[np.ndarray, np.ndarray]:
    """(q1, q2) with Q(γ) = (−(γ, q2), (γ, q1))."""
    ginv = _gram_inverse(g.lattice.name)
    return ginv @ g.Q[1], -(ginv @ g.Q[0])


# -- group law -------------------------------------------------------------------

def multiply(g1: ParabolicElement, g2: ParabolicElement) -> ParabolicElement:
    if g1.lattice != g2.lattice:
        raise DomainError("elements over different lattices")
    lattice = g1.lattice
    m1t = tilde(g1.m)
    q = g1.Q + m1t @ g2.Q @ isometry_inverse(lattice, g1.f)
    r = g1.R @ g2.m + m1t @ g2.R + g1.Q @ g1.f @ adjoint(lattice, g2.Q) @ g2.m
    try:
        return ParabolicElement(g1.m @ g2.m, q, r, g1.f @ g2.f, lattice)
    except DomainError as exc:
        raise ConventionError(f"product left Γ_F⁺: {exc}") from exc


def inverse(g: ParabolicElement) -> ParabolicElement:
    """g(m⁻¹, −mᵀQf, Rᵀ, f⁻¹)."""
    return ParabolicElement(sl2_inverse(g.m), -(g.m.T @ g.Q @ g.f), g.R.T,
                            isometry_inverse(g.lattice, g.f), g.lattice)


def act_on_period(g: ParabolicElement, omega) -> ComplexTriplet:
    """[m·x, R·x + m̃·y + Q·f·z, Q*·m·x + f·z]."""
    omega = as_triplet(omega)
    if omega.lattice != g.lattice:
        raise DomainError("period and element over different lattices")
    a, b, c = omega.a, omega.b, omega.c
    return ComplexTriplet(
        g.m @ a,
        g.R @ a + tilde(g.m) @ b + g.Q @ (g.f @ c),
        adjoint(g.lattice, g.Q) @ (g.m @ a) + g.f @ c,
        g.lattice,
    )


@dataclass(frozen=True)
class Membership:
    in_UNZ: bool
    in_S: bool
    in_W: bool
    in_T: bool

    def to_dict(self) -> dict:
        return {"in_UNZ": self.in_UNZ, "in_S": self.in_S, "in_W": self.in_W, "in_T": self.in_T}


def subgroup_membership(g: ParabolicElement) -> Membership:
    eye = np.eye(g.lattice.rank, dtype=np.int64)
    m_is_i = np.array_equal(g.m, I2)
    f_is_i = np.array_equal(g.f, eye)
    q_zero = not g.Q.any()
    r_zero = not g.R.any()
    return Membership(
        in_UNZ=m_is_i and f_is_i and q_zero and not (g.R + g.R.T).any(),
        in_S=f_is_i and q_zero and r_zero,
        in_W=m_is_i and q_zero and r_zero,
        in_T=m_is_i and f_is_i and np.array_equal(g.R + g.R.T, g.qq()),
    )


def factorize(g: ParabolicElement) -> tuple[ParabolicElement, ParabolicElement, ParabolicElement]:
    """g = t·(w·s) with t = g(I, Q, Rm⁻¹, I) ∈ T, w = g(I,0,0,f) ∈ W, s = g(m,0,0,I) ∈ S."""
    lattice = g.lattice
    t = ParabolicElement(I2, g.Q, g.R @ sl2_inverse(g.m), np.eye(lattice.rank, dtype=np.int64), lattice)
    return t, isometry_element(lattice, g.f), modular_element(lattice, g.m)


# -- the modular group Π -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PiElement:
    """(τ, z) ↦ (Mτ, f(z)/(cτ+d) + q1 + Mτ·q2), with (M, f) ~ (−M, −f)."""
    mod: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    f: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        mod = _int2(self.mod)
        f = np.array(self.f, dtype=np.int64)
        if det2(mod) != 1:
            raise DomainError(f"det(mod) = {det2(mod)}, expected 1")
        lead = mod[1, 0] if mod[1, 0] != 0 else mod[1, 1]
        if lead < 0:
            mod, f = -mod, -f
        object.__setattr__(self, "mod", mod)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "q1", np.array(self.q1, dtype=np.int64).reshape(-1))
        object.__setattr__(self, "q2", np.array(self.q2, dtype=np.int64).reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, PiElement):
            return NotImplemented
        return (self.lattice == other.lattice
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("mod", "q1", "q2", "f")))

    def __hash__(self):
        return hash(tuple(getattr(self, k).tobytes() for k in ("mod", "q1", "q2", "f")))

    def __mul__(self, other: "PiElement") -> "PiElement":
        return pi_multiply(self, other)

    def is_identity(self) -> bool:
        return self == pi_identity(self.lattice)

    def to_dict(self) -> dict:
        return {"lattice": self.lattice.name, "mod": self.mod.tolist(), "q1": self.q1.tolist(),
                "q2": self.q2.tolist(), "f": self.f.tolist()}


def pi_identity(lattice: Lattice) -> PiElement:
    zero = np.zeros(lattice.rank, dtype=np.int64)
    return PiElement(I2, zero, zero, np.eye(lattice.rank, dtype=np.int64), lattice)


def pi_multiply(p1: PiElement, p2: PiElement) -> PiElement:
    """p1·p2, acting as p1 ∘ p2."""
    (a1, b1), (c1, d1) = p1.mod
    r1 = a1 * p2.q1 - b1 * p2.q2
    r2 = -c1 * p2.q1 + d1 * p2.q2
    return PiElement(p1.mod @ p2.mod, p1.q1 + p1.f @ r1, p1.q2 + p1.f @ r2,
                     p1.f @ p2.f, p1.lattice)


def alpha(g: ParabolicElement) -> PiElement:
    (a, b), (c, d) = g.m
    q1, q2 = translation_vectors(g)
    return PiElement(np.array([[a, -b], [-c, d]]), q1, q2, g.f, g.lattice)


def check_upper(tau: complex):
    if not complex(tau).imag > 0:
        raise DomainError(f"τ = {tau} is not in the upper half plane")


def pi_act(p: PiElement, tau: complex, z) -> tuple[complex, np.ndarray]:
    check_upper(tau)
    (a, b), (c, d) = p.mod
    j = c * tau + d
    tau_new = (a * tau + b) / j
    z_new = (p.f @ np.asarray(z, dtype=complex)) / j + p.q1 + tau_new * p.q2
    return complex(tau_new), z_new


# -- sampling --------------------------------------------------------------------

def random_sl2(rng: np.random.Generator, length: int = 4) -> np.ndarray:
    m = I2.copy()
    for _ in range(length):
        choice = rng.integers(3)
        if choice == 0:
            m = m @ S_GEN
        elif choice == 1:
            m = m @ T_GEN
        else:
            m = m @ sl2_inverse(T_GEN)
    return m


def random_isometry(rng: np.random.Generator, lattice: Lattice, length: int = 3) -> np.ndarray:
    roots = simple_roots(lattice.name).roots
    f = np.eye(lattice.rank, dtype=np.int64)
    for index in rng.integers(len(roots), size=length):
        f = f @ reflection_matrix(roots[index])
    if rng.integers(2):
        f = -f
    return f


def random_element(rng: np.random.Generator, lattice: Lattice,
                   density: float = 0.25) -> ParabolicElement:
    """t·w·s·u with small random factors; translations are sparse ±1 vectors."""
    q1 = rng.integers(-1, 2, size=lattice.rank) * (rng.random(lattice.rank) < density)
    q2 = rng.integers(-1, 2, size=lattice.rank) * (rng.random(lattice.rank) < density)
    t = translation_element(lattice, q1, q2)
    w = isometry_element(lattice, random_isometry(rng, lattice))
    s = modular_element(lattice, random_sl2(rng))
    u = unipotent_element(lattice, int(rng.integers(-2, 3)))
    return multiply(multiply(t, multiply(w, s)), u)


def generators(lattice: Lattice) -> list[ParabolicElement]:
    """S, T, simple reflections, −1 on Λ, unit translations and exp(N)."""
    out = [modular_element(lattice, S_GEN), modular_element(lattice, T_GEN),
           isometry_element(lattice, -np.eye(lattice.rank, dtype=np.int64)),
           unipotent_element(lattice, 1)]
    for root in simple_roots(lattice.name).roots:
        out.append(isometry_element(lattice, reflection_matrix(root)))
    zero = np.zeros(lattice.rank, dtype=np.int64)
    for k in range(lattice.rank):
        e = np.zeros(lattice.rank, dtype=np.int64)
        e[k] = 1
        out.append(translation_element(lattice, e, zero))
        out.append(translation_element(lattice, zero, e))
    return out


def word_element(lattice: Lattice, factors: Sequence[ParabolicElement]) -> ParabolicElement:
    g = identity(lattice)
    for factor in factors:
        g = multiply(g, factor)
    return g
