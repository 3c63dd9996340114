import numpy as np
import pytest

from narain_lab.ambient_space import ComplexTriplet, exp_N, pair
from narain_lab.errors import DomainError
from narain_lab.parabolic_group import act_on_period, alpha, pi_act, random_element, random_isometry, random_sl2
from narain_lab.period_domain import (
    PeriodVector,
    fiber_coordinate,
    fiber_scale,
    narain_norm,
    narain_section,
    normalize,
    perturbed_section,
    r_value,
    theta_tilde,
    verify_isometry_factor,
    verify_modular_factor,
    verify_translation_factor,
)
from tests.conftest import random_tau, random_z


def test_r_at_tau_i(e8e8):
    omega = narain_section(e8e8, 1j, np.zeros(16), -1j)
    assert r_value(omega) == pytest.approx(2.0)


@pytest.mark.parametrize("convention, sign", [("body", -1.0), ("appendix", 1.0)])
def test_section_contracts(rng, lattice, convention, sign):
    for _ in range(20):
        tau = random_tau(rng)
        z = random_z(rng, lattice.rank)
        u = complex(rng.normal(), sign * rng.uniform(0.2, 2.0))
        omega = narain_section(lattice, tau, z, u, convention)
        tau_back, z_back = theta_tilde(omega)
        assert tau_back == pytest.approx(tau, abs=1e-12)
        assert np.allclose(z_back, z, atol=1e-12)
        assert r_value(omega) == pytest.approx(2 * tau.imag, abs=1e-12)
        assert abs(pair(omega, omega)) < 1e-10
        norm = pair(omega, omega.conj()).real
        assert norm == pytest.approx(narain_norm(tau, u, convention), rel=1e-11)
        assert PeriodVector(omega).omega_plus()


def test_theta_tilde_rejects_negative_r(e8e8):
    omega = ComplexTriplet([1j, 1.0], [0, 0], np.zeros(16), e8e8)
    with pytest.raises(DomainError):
        theta_tilde(omega)


def test_normalize(e8e8):
    omega = (2.0 + 1j) * narain_section(e8e8, 0.3 + 1.1j, np.ones(16) * 0.1, -1j)
    assert complex(normalize(omega).a[1]) == pytest.approx(1.0)


def test_perturbed_section_is_isotropic(rng, lattice):
    tau = random_tau(rng)
    z = random_z(rng, lattice.rank)
    sigma = perturbed_section(lattice, tau, z)
    assert abs(pair(sigma, sigma)) < 1e-12
    assert PeriodVector(sigma).on_quadric()


def test_fiber_coordinate_recovers_lambda(rng, e8e8):
    tau = random_tau(rng)
    z = random_z(rng, 16)
    base = perturbed_section(e8e8, tau, z)
    target = 3.0 * exp_N(0.25 - 0.5j, base)
    lam, mu = fiber_coordinate(target, base)
    assert lam == pytest.approx(0.25 - 0.5j)
    assert mu == pytest.approx(3.0)


def test_fiber_coordinate_rejects_different_points(e8e8):
    a = perturbed_section(e8e8, 1j, np.zeros(16))
    b = perturbed_section(e8e8, 2j, np.zeros(16))
    with pytest.raises(DomainError):
        fiber_coordinate(a, b)


def test_translation_factor(rng, lattice):
    for _ in range(30):
        q1 = rng.integers(-2, 3, size=lattice.rank)
        q2 = rng.integers(-1, 2, size=lattice.rank) * (rng.random(lattice.rank) < 0.25)
        report = verify_translation_factor(lattice, random_tau(rng), random_z(rng, lattice.rank), q1, q2)
        assert report.passed, report.to_dict()


def test_modular_factor(rng, lattice):
    for _ in range(30):
        report = verify_modular_factor(lattice, random_tau(rng), random_z(rng, lattice.rank), random_sl2(rng))
        assert report.passed, report.to_dict()


def test_isometry_factor_is_one(rng, lattice):
    for _ in range(10):
        report = verify_isometry_factor(lattice, random_tau(rng), random_z(rng, lattice.rank),
                                        random_isometry(rng, lattice))
        assert report.passed
        assert abs(report.lam) < 1e-12


def test_unknown_convention(e8e8):
    with pytest.raises(DomainError):
        narain_section(e8e8, 1j, np.zeros(16), 1j, convention="other")


def test_theta_tilde_is_equivariant(rng, lattice):
    for _ in range(10):
        g = random_element(rng, lattice)
        tau, z = random_tau(rng), random_z(rng, lattice.rank)
        image = act_on_period(g, perturbed_section(lattice, tau, z))
        tau_img, z_img = theta_tilde(image)
        tau_exp, z_exp = pi_act(alpha(g), tau, z)
        assert tau_img == pytest.approx(tau_exp, rel=1e-10, abs=1e-10)
        assert np.allclose(z_img, z_exp, rtol=1e-9, atol=1e-9)


def test_exp_N_group_law_and_invariants(rng, lattice):
    tau, z = random_tau(rng), random_z(rng, lattice.rank)
    omega = perturbed_section(lattice, tau, z)
    a, b = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
    assert exp_N(a, exp_N(b, omega)).allclose(exp_N(a + b, omega))
    moved = exp_N(a, omega)
    assert r_value(moved) == pytest.approx(r_value(omega), rel=1e-12)
    tau_back, z_back = theta_tilde(moved)
    assert tau_back == pytest.approx(tau, abs=1e-12)
    assert np.allclose(z_back, z, atol=1e-12)


@pytest.mark.parametrize("convention", ["body", "appendix"])
def test_section_offset_is_half_kappa(rng, lattice, convention):
    tau, z = random_tau(rng), random_z(rng, lattice.rank)
    zz = complex(z @ lattice.gram @ z)
    zzbar = float((z @ lattice.gram @ z.conj()).real)
    kappa = (zz - zzbar) / (tau.conjugate() - tau)
    base = perturbed_section(lattice, tau, z)
    lam, mu = fiber_coordinate(narain_section(lattice, tau, z, 0.0, convention), base)
    assert lam == pytest.approx(kappa / 2, abs=1e-12)
    assert mu == pytest.approx(1.0)
    u = 0.3 - 0.7j
    lam, _ = fiber_coordinate(narain_section(lattice, tau, z, u, convention), base)
    assert lam == pytest.approx(kappa / 2 + fiber_scale(u, convention), abs=1e-12)


def test_fiber_coordinate_of_rescaled_period(rng, e8e8):
    omega = perturbed_section(e8e8, random_tau(rng), random_z(rng, 16))
    lam, mu = fiber_coordinate(5.0 * omega, omega)
    assert lam == pytest.approx(0.0, abs=1e-12)
    assert mu == pytest.approx(5.0)


def test_factor_report_reads_mu_from_lambda(rng, lattice):
    tau, z = random_tau(rng), random_z(rng, lattice.rank)
    q2 = np.zeros(lattice.rank, dtype=np.int64)
    q2[0] = 1
    report = verify_translation_factor(lattice, tau, z, np.zeros(lattice.rank, dtype=np.int64), q2)
    assert report.mu == pytest.approx(np.exp(2j * np.pi * report.lam))
    # a translation fixes (−τ, 1), so the projective scale is 1 and the factor sits in mu
    assert report.scale == pytest.approx(1.0)
    expected = np.exp(2j * np.pi * (complex(q2 @ lattice.gram @ z) + 0.5 * tau * lattice.gram[0, 0]))
    assert report.mu == pytest.approx(expected, rel=1e-9)
    assert report.passed
