"""Dedekind eta, lattice theta functions and the characters B_Λ = Θ_Λ/η¹⁶."""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BudgetError, DomainError
from .lattice_core import build_lattice, cached_shells, enumerate_by_norm, frame_matrix
from .parabolic_group import PiElement, check_upper, pi_act

logger = logging.getLogger(__name__)

THETA_LABELS = ("e8", "e8e8", "gamma16")
ETA_POWER = 16
# (coefficient, exponent) in count(norm 2k) <= C·k^p, from the Eisenstein series.
_SHELL_GROWTH = {8: (240 * 1.2021, 3), 16: (480 * 1.0084, 7)}
TAIL_TOL = 1e-12


# -- q-series ---------------------------------------------------------------------

@dataclass(frozen=True)
class QExpansion:
    """Σ value·q^exponent, known for exponents ≤ offset + truncation_order."""
    coefficients: tuple[tuple[Fraction, object], ...]
    truncation_order: int

    def __post_init__(self):
        exps = [e for e, _ in self.coefficients]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise DomainError("q-expansion exponents must be strictly increasing")

    @property
    def values(self) -> list:
        return [v for _, v in self.coefficients]

    def evaluate(self, tau: complex) -> complex:
        return sum(v * cmath.exp(2j * cmath.pi * float(e) * tau) for e, v in self.coefficients)


def series_mul(a: list[int], b: list[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                out[i + j] += x * y
    return out


def series_pow(a: list[int], power: int, order: int) -> list[int]:
    out = [1] + [0] * order
    for _ in range(power):
        out = series_mul(out, a, order)
    return out


def series_inverse(a: list[int], order: int) -> list[int]:
    """1/a for a power series with constant term ±1, over the integers."""
    if a[0] not in (1, -1):
        raise DomainError("series is not invertible over Z")
    inv = [0] * (order + 1)
    inv[0] = a[0]
    for n in range(1, order + 1):
        acc = sum(a[k] * inv[n - k] for k in range(1, min(n, len(a) - 1) + 1))
        inv[n] = -acc * a[0]
    return inv


def euler_product(order: int) -> list[int]:
    """∏(1 − q^n) by the pentagonal number theorem."""
    out = [0] * (order + 1)
    k = 0
    while True:
        done = True
        for kk in (k, -k) if k else (0,):
            pent = kk * (3 * kk - 1) // 2
            if pent <= order:
                out[pent] = -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    return out


# -- eta ------------------------------------------------------------------------------

def eta(tau: complex) -> complex:
    """e^{πiτ/12}·∏(1 − q^m), truncated where |q|^m < 1e−18."""
    check_upper(tau)
    tau = complex(tau)
    q = cmath.exp(2j * cmath.pi * tau)
    terms = max(1, math.ceil(18 * math.log(10) / (2 * math.pi * tau.imag)))
    powers = q ** np.arange(1, terms + 1)
    return complex(cmath.exp(1j * cmath.pi * tau / 12) * np.prod(1 - powers))


def _normalize_sign(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    if c < 0 or (c == 0 and d < 0):
        return -a, -b, -c, -d
    return a, b, c, d


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) = Σ_{r=1}^{k−1} (r/k)((hr/k))."""
    total = Fraction(0)
    for r in range(1, k):
        x = Fraction(h * r, k)
        if x.denominator != 1:
            total += Fraction(r, k) * (x - math.floor(x) - Fraction(1, 2))
    return total


def eta_multiplier_phase(m) -> Fraction:
    """φ with η(Mτ) = e^{πiφ}·(−i(cτ+d))^{1/2}·η(τ), φ taken mod 2."""
    a, b, c, d = (int(x) for x in np.asarray(m).reshape(-1))
    if a * d - b * c != 1:
        raise DomainError("matrix is not in SL2(Z)")
    a, b, c, d = _normalize_sign(a, b, c, d)
    if c == 0:
        phase = Fraction(b, 12)
    else:
        phase = Fraction(a + d, 12 * c) - dedekind_sum(d, c)
    return phase % 2


def eta_multiplier16(m) -> complex:
    """ε(M)^16, so that η¹⁶(Mτ) = ε(M)^16·(cτ+d)^8·η¹⁶(τ)."""
    phase = (ETA_POWER * eta_multiplier_phase(m)) % 2
    return cmath.exp(1j * cmath.pi * float(phase))


# -- theta ----------------------------------------------------------------------------

def _lattice(label: str):
    if label not in THETA_LABELS:
        raise DomainError(f"no theta function for {label!r}")
    return build_lattice(label)


def _log_jacobi(tau: complex, w: np.ndarray, half: bool) -> tuple[np.ndarray, np.ndarray]:
    """Per coordinate: (log-scale, scaled value) of θ3(w|τ) or θ2(w|τ) (half=True)."""
    y = tau.imag
    centers = -w.imag / y
    width = math.ceil(math.sqrt(90.0 / (math.pi * y))) + 2
    lo = int(np.floor(centers.min())) - width
    hi = int(np.ceil(centers.max())) + width
    n = np.arange(lo, hi + 1, dtype=float)
    if half:
        n = n + 0.5
    expo = 1j * math.pi * tau * n[None, :] ** 2 + 2j * math.pi * n[None, :] * w[:, None]
    scale = expo.real.max(axis=1)
    return scale, np.exp(expo - scale[:, None]).sum(axis=1)


def _theta_dn_plus(tau: complex, w: np.ndarray) -> complex:
    """Θ of D_n⁺ (n ≡ 0 mod 8) at ε-coordinates w: ½Σ over the four Jacobi products."""
    parts = [_log_jacobi(tau, w, False), _log_jacobi(tau, w + 0.5, False),
             _log_jacobi(tau, w, True), _log_jacobi(tau, w + 0.5, True)]
    logs = [scale.sum() for scale, _ in parts]
    top = max(logs)
    total = sum(cmath.exp(lg - top) * np.prod(vals) for lg, (_, vals) in zip(logs, parts))
    return 0.5 * complex(total) * math.exp(top)


def theta_jacobi(label: str, tau: complex, z) -> complex:
    check_upper(tau)
    tau = complex(tau)
    _lattice(label)
    w = frame_matrix(label).T @ np.asarray(z, dtype=complex)
    if label == "e8e8":
        return _theta_dn_plus(tau, w[:8]) * _theta_dn_plus(tau, w[8:])
    return _theta_dn_plus(tau, w)


def required_norm(rank: int, tau: complex, z_im_norm: float, tol: float = TAIL_TOL) -> int:
    """Smallest even N with the tail Σ_{(γ,γ) > N} |e^{πi(2(z,γ)+τ(γ,γ))}| below tol."""
    coeff, power = _SHELL_GROWTH[rank]
    y = tau.imag
    bounds = []
    k = 1
    while True:
        term = coeff * k ** power * math.exp(-2 * math.pi * y * k + 2 * math.pi * z_im_norm * math.sqrt(2 * k))
        bounds.append(term)
        if k > 8 and term < tol * 1e-6 and k * y > z_im_norm * math.sqrt(2 / k) + 1:
            break
        k += 1
    tail = 0.0
    for idx in range(len(bounds) - 1, -1, -1):
        tail += bounds[idx]
        if tail >= tol:
            return 2 * (idx + 1)
    return 2


def theta_enumerated(label: str, tau: complex, z, max_norm: int = 8) -> complex:
    """Θ_Λ by direct summation over enumerated vectors."""
    check_upper(tau)
    tau = complex(tau)
    lattice = _lattice(label)
    z = np.asarray(z, dtype=complex)
    im = z.imag
    z_im_norm = math.sqrt(max(float(im @ lattice.gram @ im), 0.0))
    needed = required_norm(lattice.rank, tau, z_im_norm)
    if needed > max_norm:
        raise BudgetError(
            f"Θ_{label} at τ={tau} needs vectors up to norm {needed}, budget is {max_norm}",
            required=needed)
    shells = cached_shells(label, needed, True)
    terms = [np.ones(1, dtype=complex)]
    gz = lattice.gram @ z
    for norm, shell in sorted(shells.items()):
        terms.append(np.exp(1j * math.pi * (2 * (shell.vectors @ gz) + tau * norm)))
    logger.debug("Θ_%s at τ=%s summed up to norm %d", label, tau, needed)
    return complex(np.sum(np.concatenate(terms)))


def theta_lattice(label: str, tau: complex, z, method: str = "jacobi", max_norm: int = 8) -> complex:
    """Θ_Λ(τ, z) = Σ_γ e^{πi(2(z,γ) + τ(γ,γ))}."""
    if method == "jacobi":
        return theta_jacobi(label, tau, z)
    if method == "enumeration":
        return theta_enumerated(label, tau, z, max_norm)
    raise DomainError(f"unknown theta method {method!r}")


def character(label: str, tau: complex, z, method: str = "jacobi", max_norm: int = 8) -> complex:
    """B_Λ(τ, z) = Θ_Λ(τ, z)/η(τ)^16."""
    return theta_lattice(label, tau, z, method, max_norm) / eta(tau) ** ETA_POWER


# -- transformation law --------------------------------------------------------------

def kac_factor(p: PiElement, tau: complex, z) -> complex:
    """φ^ch_p(τ, z) for p = t·(w·s): e^{πic(z,z)/(cτ+d)}·e^{−πi(2(q2,z″) + τ′(q2,q2))}, z″ = f(z)/(cτ+d)."""
    check_upper(tau)
    tau = complex(tau)
    gram = p.lattice.gram
    z = np.asarray(z, dtype=complex)
    (a, b), (c, d) = p.mod
    j = c * tau + d
    tau_new = (a * tau + b) / j
    z_mid = (p.f @ z) / j
    modular = cmath.exp(1j * math.pi * c * complex(z @ gram @ z) / j)
    shift = cmath.exp(-1j * math.pi * (2 * complex(p.q2 @ gram @ z_mid)
                                       + tau_new * int(p.q2 @ gram @ p.q2)))
    return modular * shift


@dataclass
class CharacterReport:
    ratio: complex
    kac: complex
    multiplier: complex
    error: float
    passed: bool

    def to_dict(self) -> dict:
        return {"ratio": [self.ratio.real, self.ratio.imag], "kac": [self.kac.real, self.kac.imag],
                "multiplier": [self.multiplier.real, self.multiplier.imag],
                "error": self.error, "pass": self.passed}


def verify_character_transform(label: str, tau: complex, z, p: PiElement,
                               tol: float = 1e-8, method: str = "jacobi") -> CharacterReport:
    """B(p·(τ, z))/B(τ, z) against φ^ch_p·ε(M)^−16."""
    tau = complex(tau)
    tau_new, z_new = pi_act(p, tau, z)
    ratio = character(label, tau_new, z_new, method) / character(label, tau, z, method)
    kac = kac_factor(p, tau, z)
    multiplier = 1 / eta_multiplier16(p.mod)
    expected = kac * multiplier
    error = abs(ratio - expected) / abs(expected)
    return CharacterReport(ratio, kac, multiplier, error, error <= tol)


# -- exact expansions ------------------------------------------------------------------

@lru_cache(maxsize=16)
def theta_counts(label: str, max_order: int, budget_norm: int = 8) -> tuple[int, ...]:
    """Number of vectors of norm 2k, k = 0..max_order, by enumeration."""
    lattice = _lattice(label)
    if 2 * max_order > budget_norm:
        raise BudgetError(f"order {max_order} needs norm {2 * max_order}, budget is {budget_norm}",
                          required=2 * max_order)
    if max_order == 0:
        return (1,)
    shells = enumerate_by_norm(lattice, 2 * max_order, keep_vectors=False)
    return (1,) + tuple(shells[2 * k].count if 2 * k in shells else 0 for k in range(1, max_order + 1))


def q_expansion(label: str, max_order: int, kind: str = "theta", budget_norm: int = 8) -> QExpansion:
    """Exact q-expansion of Θ_Λ(τ, 0) or of B_Λ(τ, 0) = q^{−2/3}·Θ/∏(1 − q^n)^16."""
    counts = list(theta_counts(label, max_order, budget_norm))
    if kind == "theta":
        return QExpansion(tuple((Fraction(k), c) for k, c in enumerate(counts)), max_order)
    if kind == "character":
        denom = series_pow(euler_product(max_order), ETA_POWER, max_order)
        coeffs = series_mul(counts, series_inverse(denom, max_order), max_order)
        offset = Fraction(-ETA_POWER, 24)
        return QExpansion(tuple((offset + k, c) for k, c in enumerate(coeffs)), max_order)
    raise DomainError(f"unknown expansion kind {kind!r}")


def theta_series_from_frame(label: str, max_order: int) -> list[int]:
    """Θ_Λ(τ, 0) coefficients from ½(θ3^n + θ4^n + θ2^n) per D_n⁺ block, in powers of q."""
    degree = 8 * max_order
    theta3 = [0] * (degree + 1)
    theta4 = [0] * (degree + 1)
    theta2 = [0] * (degree + 1)
    n = 0
    while 4 * n * n <= degree:
        for k in {n, -n}:
            theta3[4 * k * k] += 1
            theta4[4 * k * k] += -1 if k % 2 else 1
        n += 1
    n = 0
    while 4 * n * n + 4 * n + 1 <= degree:
        theta2[4 * n * n + 4 * n + 1] += 2
        n += 1

    def block(rank: int) -> list[int]:
        total = [x + y + z for x, y, z in zip(series_pow(theta3, rank, degree),
                                               series_pow(theta4, rank, degree),
                                               series_pow(theta2, rank, degree))]
        return [v // 2 for v in total]

    if label == "e8":
        series = block(8)
    elif label == "e8e8":
        series = series_mul(block(8), block(8), degree)
    elif label == "gamma16":
        series = block(16)
    else:
        raise DomainError(f"no ε-frame theta for {label!r}")
    if any(series[i] for i in range(degree + 1) if i % 8):
        raise DomainError("theta product has fractional q-powers")
    return series[::8]


def fit_theta_coefficients(label: str, max_order: int, y: float = 0.5, samples: int = 32) -> list[int]:
    """Recover Θ_Λ(τ, 0) coefficients by Fourier extraction along Im τ = y."""
    rank = _lattice(label).rank
    zero = np.zeros(rank)
    xs = np.arange(samples) / samples
    if samples <= max_order:
        raise DomainError(f"need more than {max_order} samples, got {samples}")
    values = np.array([theta_jacobi(label, complex(x, y), zero) for x in xs])
    spectrum = np.fft.fft(values) / samples
    k = np.arange(max_order + 1)
    coeffs = spectrum[: max_order + 1].real * np.exp(2 * math.pi * k * y)
    return [int(c) for c in np.rint(coeffs)]
