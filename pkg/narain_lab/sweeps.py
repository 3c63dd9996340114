"""Randomized and exhaustive verification suites behind `narain-lab verify-all`."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ambient_space import pair
from .config import LATTICES, RunConfig
from .errors import BudgetError, DomainError, NarainLabError
from .lattice_core import build_lattice, classify
from .narain_momenta import basis_coordinates, momenta_map, random_triplet, verify_gram, verify_period_line
from .parabolic_group import (
    alpha,
    factorize,
    generators,
    identity,
    inverse,
    multiply,
    pi_act,
    pi_multiply,
    random_element,
    random_isometry,
    random_sl2,
    subgroup_membership,
)
from .period_domain import (
    automorphy_factor,
    narain_norm,
    narain_section,
    r_value,
    theta_tilde,
    verify_isometry_factor,
    verify_modular_factor,
    verify_translation_factor,
)
from .platform_utils import thread_budget
from .stable_family import (
    check_root_periods,
    construct_family_a,
    construct_family_b,
    random_psi,
    verify_special_family,
)
from .theta_characters import (
    character,
    eta,
    eta_multiplier16,
    fit_theta_coefficients,
    kac_factor,
    theta_counts,
    theta_enumerated,
    theta_jacobi,
    theta_series_from_frame,
    verify_character_transform,
)

logger = logging.getLogger(__name__)

ETA_AT_I = math.gamma(0.25) / (2 * math.pi ** 0.75)


@dataclass
class SuiteResult:
    name: str
    samples: int
    max_error: float
    passed: bool
    failures: int = 0
    lattice: str | None = None

    def to_dict(self) -> dict:
        data = {"name": self.name, "samples": self.samples, "max_error": self.max_error,
                "failures": self.failures, "pass": self.passed}
        if self.lattice is not None:
            data["lattice"] = self.lattice
        return data


def _rng(cfg: RunConfig, suite: str, index: int) -> np.random.Generator:
    key = sum(ord(ch) * 131 ** k for k, ch in enumerate(suite)) % (1 << 31)
    return np.random.default_rng([cfg.seed, key, index])


def random_tau(rng: np.random.Generator, lo: float = 0.3, hi: float = 3.0) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(lo, hi))


def random_z(rng: np.random.Generator, rank: int, radius: float = 2.0) -> np.ndarray:
    v = rng.normal(size=rank) + 1j * rng.normal(size=rank)
    return v * (radius * rng.random() / np.linalg.norm(v))


def _sampled(name: str, cfg: RunConfig, samples: int, tol: float,
             check: Callable[[np.random.Generator], float]) -> SuiteResult:
    """Run `check` on independently seeded generators; each returns an error."""
    def one(index: int) -> float:
        try:
            return float(check(_rng(cfg, name, index)))
        except NarainLabError as exc:
            logger.warning("%s sample %d raised %s: %s", name, index, type(exc).__name__, exc)
            return math.inf

    workers = thread_budget(cfg.threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        errors = list(pool.map(one, range(samples)))
    failures = sum(1 for e in errors if not e <= tol)
    return SuiteResult(name, samples, max(errors, default=0.0), failures == 0, failures)


# -- suites ----------------------------------------------------------------------------

def suite_lattices(cfg: RunConfig) -> SuiteResult:
    expected = {"e8e8": (16, 0), "gamma16": (16, 0), "lo_e8e8": (2, 18), "lo_gamma16": (2, 18)}
    bad = 0
    for name, signature in expected.items():
        c = classify(build_lattice(name))
        if not (c.even and c.unimodular and c.signature == signature):
            logger.warning("%s classified as %s", name, c)
            bad += 1
    return SuiteResult("lattice_classification", len(expected), float(bad), bad == 0, bad)


def suite_theta_coincidence(cfg: RunConfig) -> SuiteResult:
    order = cfg.theta_max_norm // 2
    sigma7 = [1] + [480 * sum(d ** 7 for d in range(1, k + 1) if k % d == 0) for k in range(1, order + 1)]
    series = [
        list(theta_counts("e8e8", order, cfg.theta_max_norm)),
        list(theta_counts("gamma16", order, cfg.theta_max_norm)),
        theta_series_from_frame("e8e8", order),
        theta_series_from_frame("gamma16", order),
    ]
    bad = sum(1 for s in series for a, b in zip(s, sigma7) if a != b)
    fitted = fit_theta_coefficients("gamma16", order)
    bad += sum(1 for a, b in zip(fitted, sigma7) if a != b)
    return SuiteResult("theta_coincidence", order + 1, float(bad), bad == 0, bad)


def suite_theta_methods(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        tau = random_tau(rng, 2.0, 3.0)
        z = random_z(rng, lattice.rank, 0.3)
        a = theta_jacobi(cfg.lattice, tau, z)
        b = theta_enumerated(cfg.lattice, tau, z, cfg.theta_max_norm)
        return abs(a - b) / abs(b)
    return _sampled("theta_methods", cfg, max(1, cfg.samples // 10), cfg.character_tol, check)


def suite_eta(cfg: RunConfig) -> SuiteResult:
    error = abs(eta(1j) - ETA_AT_I)
    return SuiteResult("eta_anchor", 1, error, error <= cfg.structural_tol)


def suite_group(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)
    one = identity(lattice)

    def check(rng):
        g1, g2, g3 = (random_element(rng, lattice) for _ in range(3))
        ok = multiply(multiply(g1, g2), g3) == multiply(g1, multiply(g2, g3))
        ok &= multiply(g1, inverse(g1)) == one and multiply(inverse(g1), g1) == one
        t, w, s = factorize(g1)
        ok &= multiply(t, multiply(w, s)) == g1
        ms = subgroup_membership(t), subgroup_membership(w), subgroup_membership(s)
        ok &= ms[0].in_T and ms[1].in_W and ms[2].in_S
        ok &= alpha(multiply(g1, g2)) == pi_multiply(alpha(g1), alpha(g2))
        kernel = subgroup_membership(g1).in_UNZ or subgroup_membership(-g1).in_UNZ
        ok &= kernel == alpha(g1).is_identity()
        return 0.0 if ok else 1.0

    result = _sampled("group_algebra", cfg, cfg.samples, 0.0, check)
    bad = 0
    for g in generators(lattice):
        kernel = subgroup_membership(g).in_UNZ or subgroup_membership(-g).in_UNZ
        bad += kernel != alpha(g).is_identity()
        bad += multiply(g, inverse(g)) != one
    result.samples += len(generators(lattice))
    result.failures += bad
    result.max_error = max(result.max_error, float(bad > 0))
    result.passed = result.failures == 0
    return result


def suite_translation(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        q1 = rng.integers(-2, 3, size=lattice.rank)
        q2 = rng.integers(-1, 2, size=lattice.rank) * (rng.random(lattice.rank) < 0.25)
        return verify_translation_factor(lattice, random_tau(rng), random_z(rng, lattice.rank),
                                        q1, q2, cfg.automorphy_tol).error
    return _sampled("translation_factor", cfg, cfg.samples, cfg.automorphy_tol, check)


def suite_modular(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        return verify_modular_factor(lattice, random_tau(rng), random_z(rng, lattice.rank),
                                    random_sl2(rng), cfg.automorphy_tol).error
    return _sampled("modular_factor", cfg, cfg.samples, cfg.automorphy_tol, check)


def suite_isometry(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        return verify_isometry_factor(lattice, random_tau(rng), random_z(rng, lattice.rank),
                                      random_isometry(rng, lattice), cfg.structural_tol).error
    return _sampled("isometry_factor", cfg, cfg.samples, cfg.structural_tol, check)


def suite_sections(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)
    sign = -1.0 if cfg.convention == "body" else 1.0

    def check(rng):
        tau = random_tau(rng)
        z = random_z(rng, lattice.rank)
        u = complex(rng.normal(), sign * rng.uniform(0.2, 2.0))
        omega = narain_section(lattice, tau, z, u, cfg.convention)
        tau_back, z_back = theta_tilde(omega)
        err = max(abs(tau_back - tau), float(np.max(np.abs(z_back - z))))
        err = max(err, abs(r_value(omega) - 2 * tau.imag))
        expected = narain_norm(tau, u, cfg.convention)
        norm = pair(omega, omega.conj()).real
        return max(err, abs(norm - expected) / max(1.0, abs(expected)))
    return _sampled("sections", cfg, cfg.samples, cfg.structural_tol * 10, check)


def admissible_sample(rng: np.random.Generator, lattice, min_im: float, max_attempts: int = 100):
    """A random (g, τ, z) whose image under α(g) keeps Im τ′ ≥ min_im."""
    for _ in range(max_attempts):
        g = random_element(rng, lattice)
        tau = random_tau(rng)
        z = random_z(rng, lattice.rank)
        tau_new, _ = pi_act(alpha(g), tau, z)
        if tau_new.imag >= min_im:
            return g, tau, z
    raise BudgetError(f"no admissible sample with Im τ′ >= {min_im} in {max_attempts} draws",
                      required=max_attempts)


def suite_character(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        g, tau, z = admissible_sample(rng, lattice, cfg.theta_min_im_tau)
        return verify_character_transform(cfg.lattice, tau, z, alpha(g), cfg.character_tol).error
    return _sampled("character_transform", cfg, cfg.samples, cfg.character_tol, check)


def suite_automorphy_equality(cfg: RunConfig) -> SuiteResult:
    """Period-side φ_g against the character-side ratio, both with the η multiplier removed."""
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        g, tau, z = admissible_sample(rng, lattice, cfg.theta_min_im_tau)
        p = alpha(g)
        phi_period, _ = automorphy_factor(g, tau, z)
        tau_new, z_new = pi_act(p, tau, z)
        ratio = character(cfg.lattice, tau_new, z_new) / character(cfg.lattice, tau, z)
        phi_char = ratio * eta_multiplier16(p.mod)
        kac = kac_factor(p, tau, z)
        return max(abs(phi_period - phi_char) / abs(phi_char), abs(phi_period - kac) / abs(kac))
    return _sampled("automorphy_equality", cfg, cfg.samples, cfg.equality_tol, check)


def suite_narain(cfg: RunConfig) -> SuiteResult:
    lattice = build_lattice(cfg.lattice)

    def check(rng):
        h = random_triplet(rng, lattice)
        gram = verify_gram(h, cfg.structural_tol)
        line = verify_period_line(h, cfg.structural_tol)
        w, p = rng.integers(-3, 4, size=2), rng.integers(-3, 4, size=2)
        l = rng.integers(-2, 3, size=lattice.rank)
        coords = basis_coordinates(h, momenta_map(h, w, p, l))
        exact = np.array_equal(coords, np.concatenate([-w, p, l]))
        if not (gram.passed and line.passed and exact):
            return math.inf
        return max(gram.max_error, line.isotropy)
    return _sampled("narain_gram", cfg, cfg.samples, cfg.structural_tol * 100, check)


def suite_families(cfg: RunConfig) -> SuiteResult:
    tol = cfg.family_tol

    def check(rng):
        tau = random_tau(rng, 0.5, 2.0)
        psi = random_psi(rng, tau)
        worst = 0.0
        for build in (construct_family_a, construct_family_b):
            fam = build(tau, psi)
            report = verify_special_family(fam, tol)
            if not report.passed or verify_special_family(fam.perturbed(3, 0.1), tol).passed:
                return math.inf
            worst = max(worst, report.max_error, check_root_periods(fam, psi))
        branch = (int(rng.integers(3)), int(rng.integers(3)))
        worst = max(worst, verify_special_family(construct_family_a(tau, psi, branch), tol).max_error)
        return worst
    return _sampled("special_families", cfg, cfg.samples, tol, check)


SUITES: dict[str, Callable[[RunConfig], SuiteResult]] = {
    "lattice_classification": suite_lattices,
    "eta_anchor": suite_eta,
    "theta_coincidence": suite_theta_coincidence,
    "theta_methods": suite_theta_methods,
    "group_algebra": suite_group,
    "translation_factor": suite_translation,
    "modular_factor": suite_modular,
    "isometry_factor": suite_isometry,
    "sections": suite_sections,
    "character_transform": suite_character,
    "automorphy_equality": suite_automorphy_equality,
    "narain_gram": suite_narain,
    "special_families": suite_families,
}


PER_LATTICE = frozenset({
    "theta_methods", "group_algebra", "translation_factor", "modular_factor", "isometry_factor",
    "sections", "character_transform", "automorphy_equality", "narain_gram",
})


def run_suites(cfg: RunConfig, names: list[str] | None = None,
               lattices: list[str] | None = None) -> list[SuiteResult]:
    """Run `names` (default: all); suites in PER_LATTICE run once per entry of `lattices`."""
    lattices = list(lattices or LATTICES)
    for label in lattices:
        if label not in LATTICES:
            raise DomainError(f"unknown lattice {label!r}")
    results = []
    for name in names or list(SUITES):
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}")
        if name in PER_LATTICE:
            runs = [(label, cfg.override(lattice=label)) for label in lattices]
        else:
            runs = [(None, cfg)]
        for label, run_cfg in runs:
            logger.info("Running %s%s", name, f" on {label}" if label else "")
            result = SUITES[name](run_cfg)
            result.lattice = label
            logger.info("%s: %s (max error %.3g over %d samples)",
                        name, "PASS" if result.passed else "FAIL", result.max_error, result.samples)
            results.append(result)
    return results
