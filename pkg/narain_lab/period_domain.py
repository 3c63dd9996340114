"""Periods in Ω⁺, the projection Θ̃ to H × Λ_C, sections and their automorphy factors."""

import cmath
import logging
from dataclasses import dataclass

import numpy as np

from .ambient_space import ComplexTriplet, apply_N, apply_T, as_triplet, exp_N, pair
from .errors import ConventionError, DomainError
from .lattice_core import Lattice
from .parabolic_group import (
    ParabolicElement,
    act_on_period,
    alpha,
    check_upper,
    isometry_element,
    modular_element,
    pi_act,
    translation_element,
)

logger = logging.getLogger(__name__)

CONVENTIONS = ("body", "appendix")


@dataclass(frozen=True)
class PeriodVector:
    """A representative of a point of P(L_o ⊗ C)."""
    v: ComplexTriplet

    def on_quadric(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.v.to_vector().astype(complex)))) ** 2)
        return abs(pair(self.v, self.v)) <= tol * scale

    def omega_plus(self) -> bool:
        return r_value(self.v) > 0 and pair(self.v, self.v.conj()).real > 0

    def normalized(self) -> ComplexTriplet:
        return normalize(self.v)


def _triplet(omega) -> ComplexTriplet:
    return omega.v if isinstance(omega, PeriodVector) else as_triplet(omega)


def r_value(omega, tol: float = 1e-12) -> float:
    """r(ω) = −i(Nω, ω̄) = 2 Im(conj(a1)·a2)."""
    omega = _triplet(omega)
    via_pairing = -1j * complex(pair(apply_N(omega), omega.conj()))
    a1, a2 = complex(omega.a[0]), complex(omega.a[1])
    closed = 2.0 * (a1.conjugate() * a2).imag
    scale = max(1.0, abs(a1) * abs(a2))
    if abs(via_pairing.imag) > tol * scale or abs(via_pairing.real - closed) > tol * scale:
        raise ConventionError(f"r formulas disagree: {via_pairing} vs {closed}")
    return closed


def normalize(omega) -> ComplexTriplet:
    """Projective representative with a2 = 1."""
    omega = _triplet(omega)
    a2 = complex(omega.a[1])
    if a2 == 0:
        raise DomainError("a2 = 0; no affine representative")
    return (1.0 / a2) * omega


def theta_tilde(omega) -> tuple[complex, np.ndarray]:
    """Θ̃[a, b, c] = (−a1/a2, c/a2)."""
    omega = _triplet(omega)
    if not r_value(omega) > 0:
        raise DomainError("r(ω) ≤ 0: period outside Ω⁺")
    a2 = complex(omega.a[1])
    return -complex(omega.a[0]) / a2, np.asarray(omega.c, dtype=complex) / a2


def _zz(lattice: Lattice, z) -> tuple[complex, float]:
    z = np.asarray(z, dtype=complex)
    return complex(z @ lattice.gram @ z), float((z @ lattice.gram @ z.conj()).real)


def fiber_scale(u: complex, convention: str = "body") -> complex:
    """The coefficient of N applied by σ_n: u (body) or −2u (appendix)."""
    if convention == "body":
        return u
    if convention == "appendix":
        return -2 * u
    raise DomainError(f"unknown convention {convention!r}")


def narain_section(lattice: Lattice, tau: complex, z, u: complex,
                   convention: str = "body") -> ComplexTriplet:
    """exp(λN)[(−τ, 1), ½(κ, (z,z) + τκ), z], κ = ((z,z) − (z,z̄))/(τ̄ − τ)."""
    check_upper(tau)
    tau = complex(tau)
    z = np.asarray(z, dtype=complex)
    zz, zzbar = _zz(lattice, z)
    kappa = (zz - zzbar) / (tau.conjugate() - tau)
    base = ComplexTriplet([-tau, 1.0], [0.5 * kappa, 0.5 * (zz + tau * kappa)], z, lattice)
    return exp_N(fiber_scale(u, convention), base)


def narain_norm(tau: complex, u: complex, convention: str = "body") -> float:
    """pair(σ_n, conj σ_n) in closed form: −4 Im(λ) Im(τ) for λ = fiber_scale(u)."""
    return -4.0 * fiber_scale(u, convention).imag * tau.imag


def perturbed_section(lattice: Lattice, tau: complex, z) -> ComplexTriplet:
    """σ(τ, z) = [(−τ, 1), ½(0, (z, z)), z]."""
    check_upper(tau)
    tau = complex(tau)
    z = np.asarray(z, dtype=complex)
    zz, _ = _zz(lattice, z)
    return ComplexTriplet([-tau, 1.0], [0.0, 0.5 * zz], z, lattice)


def fiber_coordinate(omega1, omega2, tol: float = 1e-9) -> tuple[complex, complex]:
    """(λ, μ) with ω1 = μ·exp(λN)·ω2."""
    w1, w2 = _triplet(omega1), _triplet(omega2)
    a1 = w1.a.astype(complex)
    a2 = w2.a.astype(complex)
    if abs(a2[1]) < 1e-300:
        raise DomainError("degenerate a2 in fiber_coordinate")
    mu = a1[1] / a2[1]
    size = max(1.0, float(np.max(np.abs(w1.to_vector().astype(complex)))))
    if (np.max(np.abs(a1 - mu * a2)) > tol * size
            or np.max(np.abs(w1.c - mu * w2.c), initial=0.0) > tol * size):
        raise DomainError("periods lie over different points of H × Λ_C")
    ta = apply_T(a2)
    delta = w1.b.astype(complex) / mu - w2.b.astype(complex)
    lam = complex(np.vdot(ta, delta) / np.vdot(ta, ta))
    if np.max(np.abs(delta - lam * ta)) > tol * max(1.0, float(np.max(np.abs(delta)))):
        raise DomainError("periods are not in one U(N)_C orbit")
    return lam, complex(mu)


@dataclass
class AutomorphyReport:
    identity: str
    lam: complex
    residue: complex
    mu: complex
    expected_mu: complex
    scale: complex
    error: float
    passed: bool

    def to_dict(self) -> dict:
        return {"identity": self.identity, "lambda": [self.lam.real, self.lam.imag],
                "residue": [self.residue.real, self.residue.imag],
                "mu": [self.mu.real, self.mu.imag],
                "expected_mu": [self.expected_mu.real, self.expected_mu.imag],
                "error": self.error, "pass": self.passed}


def _integer_gap(value: complex) -> float:
    return abs(value - round(value.real))


def _report(name: str, lam: complex, predicted: complex, scale: complex, tol: float) -> AutomorphyReport:
    residue = lam - predicted
    mu = cmath.exp(2j * cmath.pi * lam)
    expected = cmath.exp(2j * cmath.pi * predicted)
    rel = abs(mu - expected) / abs(expected) if expected != 0 else abs(mu)
    error = max(_integer_gap(residue), rel)
    return AutomorphyReport(name, lam, residue, mu, expected, scale, error, error <= tol)


def verify_translation_factor(lattice: Lattice, tau: complex, z, q1, q2,
                              tol: float = 1e-9) -> AutomorphyReport:
    """σ(τ, z + q1 + τq2) against g(I, Q, R, I)·σ(τ, z); factor e^{πi(2(q2,z) + τ(q2,q2))}."""
    tau = complex(tau)
    z = np.asarray(z, dtype=complex)
    q1 = np.asarray(q1, dtype=np.int64)
    q2 = np.asarray(q2, dtype=np.int64)
    lhs = perturbed_section(lattice, tau, z + q1 + tau * q2)
    g = translation_element(lattice, q1, q2)
    rhs = act_on_period(g, perturbed_section(lattice, tau, z))
    lam, scale = fiber_coordinate(lhs, rhs)
    predicted = complex(q2 @ lattice.gram @ z) + 0.5 * tau * int(q2 @ lattice.gram @ q2)
    return _report("translation", lam, predicted, scale, tol)


def verify_modular_factor(lattice: Lattice, tau: complex, z, m, tol: float = 1e-9) -> AutomorphyReport:
    """σ(mτ, z/(cτ+d)) against g(m̃, 0, 0, I)·σ(τ, z), m̃ = [[a,−b],[−c,d]]; factor e^{−πic(z,z)/(cτ+d)}."""
    (a, b), (c, d) = np.asarray(m, dtype=np.int64)
    check_upper(tau)
    tau = complex(tau)
    j = c * tau + d
    if j == 0:
        raise DomainError("cτ + d = 0")
    z = np.asarray(z, dtype=complex)
    lhs = perturbed_section(lattice, (a * tau + b) / j, z / j)
    g = modular_element(lattice, [[a, -b], [-c, d]])
    rhs = act_on_period(g, perturbed_section(lattice, tau, z))
    lam, scale = fiber_coordinate(lhs, rhs)
    predicted = -0.5 * c * complex(z @ lattice.gram @ z) / j
    return _report("modular", lam, predicted, scale, tol)


def verify_isometry_factor(lattice: Lattice, tau: complex, z, f, tol: float = 1e-12) -> AutomorphyReport:
    """σ(τ, f z) against g(I, 0, 0, f)·σ(τ, z); the factor is 1."""
    z = np.asarray(z, dtype=complex)
    g = isometry_element(lattice, f)
    lhs = perturbed_section(lattice, tau, g.f @ z)
    rhs = act_on_period(g, perturbed_section(lattice, tau, z))
    lam, scale = fiber_coordinate(lhs, rhs)
    return _report("isometry", lam, 0j, scale, tol)


def automorphy_factor(g: ParabolicElement, tau: complex, z) -> tuple[complex, complex]:
    """(φ_g(τ, z), λ) with σ(α(g)(τ, z)) = e^{2πiλ}·g·σ(τ, z) and φ_g = e^{−2πiλ}."""
    tau_new, z_new = pi_act(alpha(g), tau, z)
    lhs = perturbed_section(g.lattice, tau_new, z_new)
    rhs = act_on_period(g, perturbed_section(g.lattice, tau, z))
    lam, _ = fiber_coordinate(lhs, rhs)
    return cmath.exp(-2j * cmath.pi * lam), lam
