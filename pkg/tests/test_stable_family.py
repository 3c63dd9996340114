import itertools

import numpy as np
import pytest

from narain_lab.errors import DomainError
from narain_lab.lattice_core import reflection_matrix, simple_roots
from narain_lab.stable_family import (
    ComplexTorusPoint,
    SpecialFamily,
    check_root_periods,
    construct_family_a,
    construct_family_b,
    lattice_distance,
    psi_of,
    psi_values,
    random_psi,
    root_periods,
    torus_divide,
    torus_scale,
    torus_sum,
    verify_special_family,
)
from tests.conftest import random_tau, random_z

CONSTRUCT = {"a": construct_family_a, "b": construct_family_b}
FAMILY_LATTICE = {"a": "e8e8", "b": "gamma16"}


def _point(rng, tau):
    return ComplexTorusPoint(complex(rng.normal(), rng.normal()) * 3, tau)


def test_reduction_is_idempotent(rng):
    tau = random_tau(rng)
    for _ in range(20):
        p = _point(rng, tau)
        again = ComplexTorusPoint(p.value, tau)
        assert again.value == pytest.approx(p.value, abs=1e-14)
        shifted = ComplexTorusPoint(p.value + 3 - 2 * tau, tau)
        assert shifted.close_to(p, 1e-12)


def test_group_axioms(rng):
    tau = random_tau(rng)
    zero = ComplexTorusPoint.zero(tau)
    for _ in range(10):
        p, q, r = _point(rng, tau), _point(rng, tau), _point(rng, tau)
        assert (p + q).close_to(q + p)
        assert ((p + q) + r).close_to(p + (q + r))
        assert (p + zero).close_to(p)
        assert (p + (-p)).close_to(zero)
        assert (p - q).close_to(p + (-q))


def test_scale_matches_repeated_addition(rng):
    tau = random_tau(rng)
    p = _point(rng, tau)
    total = ComplexTorusPoint.zero(tau)
    for n in range(1, 12):
        total = total + p
        assert torus_scale(p, n).close_to(total)
        assert (n * p).close_to(total)
    assert torus_scale(p, -3).close_to(-(3 * p))
    assert torus_scale(p, 0).close_to(ComplexTorusPoint.zero(tau))


def test_division_branches(rng):
    tau = random_tau(rng)
    p = _point(rng, tau)
    roots = [torus_divide(p, 3, (k, l)) for k in range(3) for l in range(3)]
    for r in roots:
        assert (3 * r).close_to(p)
    for a, b in itertools.combinations(roots, 2):
        assert not a.close_to(b, 1e-6)
    with pytest.raises(DomainError):
        torus_divide(p, 3, (3, 0))
    with pytest.raises(DomainError):
        torus_divide(p, 0)


def test_points_on_different_curves(rng):
    p = ComplexTorusPoint(0.1, 1j)
    q = ComplexTorusPoint(0.1, 1.1j)
    with pytest.raises(DomainError):
        p + q


def test_lower_half_plane_rejected():
    with pytest.raises(DomainError):
        ComplexTorusPoint(0.1, -1j)


def test_lattice_distance():
    tau = 0.3 + 1.2j
    assert lattice_distance(2 + 3 * tau, tau) == pytest.approx(0.0, abs=1e-12)
    assert lattice_distance(0.25, tau) == pytest.approx(0.25)


@pytest.mark.parametrize("name", ["e8e8", "gamma16"])
def test_psi_is_additive(rng, name):
    lattice_rank = 16
    tau = random_tau(rng)
    z = random_z(rng, lattice_rank)
    g1 = rng.integers(-3, 4, size=lattice_rank)
    g2 = rng.integers(-3, 4, size=lattice_rank)
    lhs = psi_of(tau, z, g1 + g2, name)
    rhs = psi_of(tau, z, g1, name) + psi_of(tau, z, g2, name)
    assert lhs.close_to(rhs)


@pytest.mark.parametrize("category", ["a", "b"])
def test_constructions_verify(rng, category):
    for _ in range(10):
        tau = random_tau(rng)
        fam = CONSTRUCT[category](tau, random_psi(rng, tau))
        report = verify_special_family(fam)
        assert report.passed, report.to_dict()
        assert fam.p0.close_to(ComplexTorusPoint.zero(tau))


@pytest.mark.parametrize("category", ["a", "b"])
def test_perturbation_breaks_family(rng, category):
    tau = random_tau(rng)
    fam = CONSTRUCT[category](tau, random_psi(rng, tau))
    broken = fam.perturbed(4, 0.1)
    report = verify_special_family(broken)
    assert not report.passed
    assert report.max_error > 0.05


@pytest.mark.parametrize("category", ["a", "b"])
def test_all_division_branches_verify(rng, category):
    tau = random_tau(rng)
    psi = random_psi(rng, tau)
    branches = list(itertools.product(range(3), repeat=2))
    q0_branches = branches if category == "a" else list(itertools.product(range(6), repeat=2))
    for first in branches:
        assert verify_special_family(CONSTRUCT[category](tau, psi, first_branch=first)).passed
    for q0 in q0_branches:
        assert verify_special_family(CONSTRUCT[category](tau, psi, q0_branch=q0)).passed


@pytest.mark.parametrize("category", ["a", "b"])
def test_root_periods_recover_psi(rng, category):
    for _ in range(5):
        tau = random_tau(rng)
        psi = random_psi(rng, tau)
        fam = CONSTRUCT[category](tau, psi)
        assert check_root_periods(fam, psi) < 1e-9


def test_root_period_labels(rng):
    tau = random_tau(rng)
    fam_a = construct_family_a(tau, random_psi(rng, tau))
    fam_b = construct_family_b(tau, random_psi(rng, tau))
    assert set(root_periods(fam_a)) == {f"a{i}" for i in range(1, 9)} | {f"b{i}" for i in range(1, 9)}
    assert set(root_periods(fam_b)) == {f"c{k}" for k in range(2, 16)}


@pytest.mark.parametrize("category", ["a", "b"])
def test_families_from_wilson_lines(rng, category):
    name = FAMILY_LATTICE[category]
    tau = random_tau(rng)
    z = random_z(rng, 16)
    psi = psi_values(name, tau, z)
    fam = CONSTRUCT[category](tau, psi)
    assert verify_special_family(fam).passed
    assert check_root_periods(fam, psi) < 1e-9


def test_weyl_reflected_wilson_lines_verify(rng):
    tau = random_tau(rng)
    z = random_z(rng, 16)
    roots = simple_roots("e8e8")
    reflected = reflection_matrix(roots.roots[2]) @ z
    fam = construct_family_a(tau, psi_values("e8e8", tau, reflected))
    assert verify_special_family(fam).passed


@pytest.mark.parametrize("category", ["a", "b"])
def test_zero_psi_gives_trivial_sums(category):
    tau = 0.1 + 1.4j
    zero = [0j] * 16
    fam = CONSTRUCT[category](tau, zero)
    assert verify_special_family(fam).passed
    total = torus_sum(fam.points, tau)
    assert total.close_to(9 * fam.q0)


@pytest.mark.parametrize("category", ["a", "b"])
def test_family_dict_round_trip(rng, category):
    tau = random_tau(rng)
    fam = CONSTRUCT[category](tau, random_psi(rng, tau))
    back = SpecialFamily.from_dict(fam.to_dict())
    assert back.t == fam.t and back.category == fam.category
    for p, q in zip(back.points, fam.points):
        assert p.close_to(q, 1e-12)
    assert verify_special_family(back).passed


def test_family_shape_checked():
    tau = 1j
    zero = ComplexTorusPoint.zero(tau)
    with pytest.raises(DomainError):
        SpecialFamily(tau, zero, zero, (zero,) * 17, 9, "a")
    with pytest.raises(DomainError):
        SpecialFamily(tau, zero, zero, (zero,) * 18, 8, "a")
    with pytest.raises(DomainError):
        SpecialFamily(tau, zero, zero, (zero,) * 18, 9, "c")


def test_wrong_psi_count():
    with pytest.raises(DomainError):
        construct_family_a(1j, [0j] * 15)
