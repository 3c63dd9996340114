"""Heterotic moduli (A, g, B) on a two-torus and the Narain lattice of momenta.

Vectors of R^{2,18} are stored as (x, y, l) with x, y ∈ R² and l in
coordinates of the Λ basis; the inner product is x·x′ − y·y′ − (l, l′).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ambient_space import ComplexTriplet, ambient_gram, apply_T, pair
from .errors import DomainError
from .lattice_core import Lattice, build_lattice
from .period_domain import fiber_coordinate, narain_section

logger = logging.getLogger(__name__)


def _vector(x) -> np.ndarray:
    arr = np.asarray(x)
    return arr.astype(complex if np.iscomplexobj(arr) else float)


@dataclass(frozen=True, eq=False)
class HeteroticTriplet:
    """Metric g, B-field b and Wilson lines z_i = A(e_i) ∈ Λ_R."""
    metric: np.ndarray
    b_field: float
    z1: np.ndarray
    z2: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        g = np.asarray(self.metric, dtype=float).reshape(2, 2)
        if not np.allclose(g, g.T):
            raise DomainError("metric must be symmetric")
        if g[0, 0] <= 0 or np.linalg.det(g) <= 0:
            raise DomainError("metric must be positive definite")
        object.__setattr__(self, "metric", g)
        object.__setattr__(self, "b_field", float(self.b_field))
        for name in ("z1", "z2"):
            vec = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if vec.shape[0] != self.lattice.rank:
                raise DomainError(f"{name} must have length {self.lattice.rank}")
            object.__setattr__(self, name, vec)

    @property
    def wilson(self) -> np.ndarray:
        """The 16×2 matrix of A with columns A(e1), A(e2)."""
        return np.column_stack([self.z1, self.z2])

    def ata(self) -> np.ndarray:
        """AᵗA = [(z_i, z_j)]."""
        a = self.wilson
        return a.T @ self.lattice.gram @ a

    def at(self, l) -> np.ndarray:
        """Aᵗl = ((l, z1), (l, z2))."""
        return self.wilson.T @ self.lattice.gram @ _vector(l)

    def to_dict(self) -> dict:
        return {"lattice": self.lattice.name, "metric": self.metric.tolist(), "b": self.b_field,
                "z1": self.z1.tolist(), "z2": self.z2.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "HeteroticTriplet":
        lattice = build_lattice(data.get("lattice", "e8e8"))
        return cls(data["metric"], data.get("b", 0.0), data["z1"], data["z2"], lattice)


@dataclass(frozen=True)
class Moduli:
    v: float
    tau: complex
    z: np.ndarray
    u: complex


def derived_moduli(h: HeteroticTriplet) -> Moduli:
    """v = √det g, τ = (g12 + iv)/g11, z = z2 − τz1, u = bv + iv."""
    g = h.metric
    v = math.sqrt(g[0, 0] * g[1, 1] - g[0, 1] ** 2)
    tau = complex(g[0, 1], v) / g[0, 0]
    return Moduli(v, tau, h.z2 - tau * h.z1, complex(h.b_field * v, v))


def momenta_form(lattice: Lattice) -> np.ndarray:
    """diag(I2, −I2, −Gram_Λ)."""
    return scipy.linalg.block_diag(np.eye(2), -np.eye(2), -lattice.gram.astype(float))


def momenta_map(h: HeteroticTriplet, w, p, l) -> np.ndarray:
    """φ(w, p, l) = ½p − bTw − ¼AᵗAw − ½Aᵗl ± w in the two planes, Aw + l in Λ_R.

    Complex arguments give the complexified map.
    """
    w, p, l = _vector(w), _vector(p), _vector(l)
    common = 0.5 * p - h.b_field * apply_T(w) - 0.25 * h.ata() @ w - 0.5 * h.at(l)
    return np.concatenate([common - w, common + w, h.wilson @ w + l])


def _f_vector(h: HeteroticTriplet, i: int) -> np.ndarray:
    e = np.eye(2)[i]
    shift = h.b_field * apply_T(e) + 0.25 * h.ata() @ e
    return np.concatenate([shift + e, shift - e, -h.wilson @ e])


def momenta_basis(h: HeteroticTriplet) -> np.ndarray:
    """Columns F1, F2, F1*, F2*, L(γ_1), …, L(γ_n); also the F-coordinate transition matrix."""
    rank = h.lattice.rank
    cols = [_f_vector(h, 0), _f_vector(h, 1)]
    for i in range(2):
        e = np.eye(2)[i]
        cols.append(np.concatenate([0.5 * e, 0.5 * e, np.zeros(rank)]))
    for k in range(rank):
        l = np.eye(rank)[k]
        half = -0.5 * h.at(l)
        cols.append(np.concatenate([half, half, l]))
    return np.column_stack(cols)


def momenta_gram(h: HeteroticTriplet) -> np.ndarray:
    basis = momenta_basis(h)
    return basis.T @ momenta_form(h.lattice) @ basis


@dataclass
class GramReport:
    max_error: float
    passed: bool

    def to_dict(self) -> dict:
        return {"max_error": self.max_error, "pass": self.passed}


def verify_gram(h: HeteroticTriplet, tol: float = 1e-12) -> GramReport:
    """Gram of the momenta basis against H ⊕ H ⊕ (−Λ), entrywise."""
    target = ambient_gram(h.lattice).astype(float)
    error = float(np.max(np.abs(momenta_gram(h) - target)))
    scale = max(1.0, float(np.max(np.abs(momenta_basis(h)))) ** 2)
    return GramReport(error, error <= tol * scale)


def basis_coordinates(h: HeteroticTriplet, vector, tol: float = 1e-9) -> np.ndarray:
    """Integer coordinates of a lattice vector against `momenta_basis`."""
    coords = scipy.linalg.solve(momenta_basis(h), np.asarray(vector, dtype=float))
    rounded = np.rint(coords)
    if np.max(np.abs(coords - rounded), initial=0.0) > tol:
        raise DomainError("vector is not in the lattice of momenta")
    return rounded.astype(np.int64)


def period_line(h: HeteroticTriplet) -> ComplexTriplet:
    """ω = Σα_iF_i + Σβ_jF_j* + γ with α = (−τ, 1), γ = z, in F-coordinates.

    β1 = −2u + ((z,z) − (z,z̄))/(2(τ̄ − τ)),
    β2 = ((z,z) + τ·κ)/2 − 2uτ with κ = ((z,z) − (z,z̄))/(τ̄ − τ).
    """
    mod = derived_moduli(h)
    gram = h.lattice.gram
    zz = complex(mod.z @ gram @ mod.z)
    zzbar = float((mod.z @ gram @ mod.z.conj()).real)
    kappa = (zz - zzbar) / (mod.tau.conjugate() - mod.tau)
    beta = [-2 * mod.u + 0.5 * kappa, 0.5 * (zz + mod.tau * kappa) - 2 * mod.u * mod.tau]
    return ComplexTriplet([-mod.tau, 1.0], beta, mod.z, h.lattice)


def period_vector(h: HeteroticTriplet) -> np.ndarray:
    """The period line as a vector of (R^{2,18}) ⊗ C."""
    return momenta_basis(h) @ period_line(h).to_vector().astype(complex)


def direct_period_vector(h: HeteroticTriplet) -> np.ndarray:
    """φ_C(−α, β, z) with β read off exp(−2uN)[(−τ, 1), ½(κ, (τ̄(z,z) − τ(z,z̄))/(τ̄ − τ)), z].

    Built from the momenta map itself rather than from `momenta_basis`.
    """
    mod = derived_moduli(h)
    gram = h.lattice.gram
    zz = complex(mod.z @ gram @ mod.z)
    zzbar = float((mod.z @ gram @ mod.z.conj()).real)
    tau, tau_bar = mod.tau, mod.tau.conjugate()
    alpha = np.array([-tau, 1.0])
    beta = 0.5 * np.array([(zz - zzbar) / (tau_bar - tau), (tau_bar * zz - tau * zzbar) / (tau_bar - tau)])
    beta = beta - 2 * mod.u * apply_T(alpha)
    return momenta_map(h, -alpha, beta, mod.z)


@dataclass
class PeriodLineReport:
    isotropy: float
    norm: float
    fiber_lambda: complex
    deviation: float
    passed: bool

    def to_dict(self) -> dict:
        return {"isotropy": self.isotropy, "norm": self.norm, "deviation": self.deviation,
                "fiber_lambda": [self.fiber_lambda.real, self.fiber_lambda.imag], "pass": self.passed}


def verify_period_line(h: HeteroticTriplet, tol: float = 1e-12) -> PeriodLineReport:
    """ω·ω = 0 and ω·ω̄ > 0 under the momenta product.

    ω must also agree with the appendix σ_n in F-coordinates and with
    `direct_period_vector` in R^{2,18}.
    """
    form = momenta_form(h.lattice)
    vec = period_vector(h)
    scale = max(1.0, float(np.max(np.abs(vec)))) ** 2
    isotropy = abs(complex(vec @ form @ vec)) / scale
    norm = float((vec @ form @ vec.conj()).real)
    omega = period_line(h)
    mod = derived_moduli(h)
    section = narain_section(h.lattice, mod.tau, mod.z, mod.u, convention="appendix")
    lam, _ = fiber_coordinate(omega, section)
    direct = abs(complex(pair(omega, omega))) / scale
    deviation = float(np.max(np.abs(vec - direct_period_vector(h)))) / math.sqrt(scale)
    passed = max(isotropy, direct, deviation) <= tol and norm > 0 and abs(lam) <= 1e-9
    return PeriodLineReport(max(isotropy, direct), norm, lam, deviation, passed)


def random_triplet(rng: np.random.Generator, lattice: Lattice, wilson_scale: float = 0.3) -> HeteroticTriplet:
    m = rng.normal(size=(2, 2))
    metric = m @ m.T + 0.5 * np.eye(2)
    b = rng.uniform(-1.0, 1.0)
    z1 = wilson_scale * rng.normal(size=lattice.rank)
    z2 = wilson_scale * rng.normal(size=lattice.rank)
    return HeteroticTriplet(metric, b, z1, z2, lattice)
