import numpy as np
import pytest

from narain_lab.config import RunConfig
from narain_lab.errors import BudgetError, DomainError
from narain_lab.lattice_core import build_lattice
from narain_lab.parabolic_group import alpha, pi_act
from narain_lab.sweeps import PER_LATTICE, SUITES, SuiteResult, admissible_sample, run_suites


@pytest.fixture
def cfg(tmp_path):
    return RunConfig.load(tmp_path / "config.json").override(samples=4, seed=11)


def test_default_sample_size():
    assert RunConfig().samples >= 1000


def test_per_lattice_suites_are_known():
    assert PER_LATTICE <= set(SUITES)


def test_run_suites_sweeps_every_lattice(cfg):
    results = run_suites(cfg, ["group_algebra", "eta_anchor"])
    assert [(r.name, r.lattice) for r in results] == [
        ("group_algebra", "e8e8"), ("group_algebra", "gamma16"), ("eta_anchor", None)]
    assert all(r.passed for r in results)
    assert "lattice" not in results[-1].to_dict()


def test_run_suites_restricted_to_one_lattice(cfg):
    results = run_suites(cfg, ["sections"], ["gamma16"])
    assert len(results) == 1
    assert results[0].lattice == "gamma16"
    assert results[0].to_dict()["lattice"] == "gamma16"


@pytest.mark.parametrize("name", ["character_transform", "automorphy_equality"])
def test_full_sample_size(cfg, name):
    result, = run_suites(cfg, [name], ["e8e8"])
    assert result.samples == cfg.samples
    assert result.passed, result.to_dict()


def test_run_suites_rejects_unknown_names(cfg):
    with pytest.raises(DomainError):
        run_suites(cfg, ["no_such_suite"])
    with pytest.raises(DomainError):
        run_suites(cfg, ["sections"], ["leech"])


def test_admissible_sample_keeps_im_tau(rng, lattice):
    g, tau, z = admissible_sample(rng, lattice, 0.05)
    assert pi_act(alpha(g), tau, z)[0].imag >= 0.05


def test_admissible_sample_gives_up(rng):
    with pytest.raises(BudgetError) as info:
        admissible_sample(rng, build_lattice("e8e8"), 1e6, max_attempts=5)
    assert info.value.required == 5


def test_suite_result_failure_counts():
    result = SuiteResult("x", 3, np.inf, False, 2)
    assert result.to_dict() == {"name": "x", "samples": 3, "max_error": np.inf, "failures": 2, "pass": False}
