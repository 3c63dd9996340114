import numpy as np
import pytest

from narain_lab.lattice_core import build_lattice


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(params=["e8e8", "gamma16"])
def lattice(request):
    return build_lattice(request.param)


@pytest.fixture
def e8e8():
    return build_lattice("e8e8")


@pytest.fixture
def gamma16():
    return build_lattice("gamma16")


def random_tau(rng, lo=0.3, hi=3.0):
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(lo, hi))


def random_z(rng, rank, radius=2.0):
    v = rng.normal(size=rank) + 1j * rng.normal(size=rank)
    return v * (radius * rng.random() / np.linalg.norm(v))
