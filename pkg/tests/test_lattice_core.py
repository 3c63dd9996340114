import itertools
from fractions import Fraction

import numpy as np
import pytest

from narain_lab.errors import DomainError
from narain_lab.lattice_core import (
    Lattice,
    SignedPermutation,
    apply_signed_permutation,
    blowdown_epsilon,
    blowdown_roots,
    BLOWDOWN_FORM,
    build_lattice,
    classify,
    enumerate_by_norm,
    exact_determinant,
    exact_inverse,
    inertia,
    inner_product,
    integral_inverse,
    lattice_frame,
    reflection_matrix,
    simple_roots,
    weyl_reflect,
    weyl_word,
    weyl_word_matrix,
)


@pytest.mark.parametrize("name, signature", [
    ("e8", (8, 0)), ("e8e8", (16, 0)), ("gamma16", (16, 0)),
    ("lo_e8e8", (2, 18)), ("lo_gamma16", (2, 18)),
])
def test_classify_even_unimodular(name, signature):
    c = classify(build_lattice(name))
    assert c.even and c.unimodular
    assert c.signature == signature


def test_classify_hyperbolic_plane():
    c = classify(build_lattice("hyperbolic"))
    assert c.even and c.unimodular
    assert c.signature == (1, 1)


def test_unknown_label():
    with pytest.raises(DomainError):
        build_lattice("leech")


def test_gamma16_gram_diagonal():
    gram = build_lattice("gamma16").gram
    assert gram[0, 0] == 4
    assert all(gram[k, k] == 2 for k in range(1, 16))


def test_exact_determinant_and_inverse():
    assert exact_determinant([[2, -1], [-1, 2]]) == 3
    assert exact_determinant([[0, 1], [1, 0]]) == -1
    inv = exact_inverse([[2, -1], [-1, 2]])
    assert inv == [[Fraction(2, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(2, 3)]]
    gram = build_lattice("e8").gram
    assert np.array_equal(integral_inverse(gram) @ gram, np.eye(8, dtype=np.int64))


def test_exact_helpers_reject_bad_input():
    with pytest.raises(DomainError):
        exact_inverse([[1, 2], [2, 4]])
    with pytest.raises(DomainError):
        integral_inverse([[2, 0], [0, 1]])


@pytest.mark.parametrize("gram, expected", [
    ([[2, -1], [-1, 2]], (2, 0)),
    ([[0, 1], [1, 0]], (1, 1)),
    ([[-2, 0, 0], [0, 0, 0], [0, 0, 3]], (1, 1)),
    ([[1, 2], [2, 1]], (1, 1)),
])
def test_inertia(gram, expected):
    assert inertia(gram) == expected


def test_e8_shells():
    shells = enumerate_by_norm(build_lattice("e8"), 8)
    assert [shells[n].count for n in (2, 4, 6, 8)] == [240, 2160, 6720, 17520]
    assert set(shells) == {2, 4, 6, 8}


@pytest.mark.parametrize("name", ["e8e8", "gamma16"])
def test_rank16_shells_low(name):
    shells = enumerate_by_norm(build_lattice(name), 4, keep_vectors=False)
    assert shells[2].count == 480
    assert shells[4].count == 61920
    assert shells[2].vectors is None


@pytest.mark.slow
@pytest.mark.parametrize("name", ["e8e8", "gamma16"])
def test_rank16_shells_to_norm_eight(name):
    shells = enumerate_by_norm(build_lattice(name), 8, keep_vectors=False)
    assert [shells[n].count for n in (2, 4, 6, 8)] == [480, 61920, 1050240, 7926240]


def test_enumeration_matches_box_search():
    a2 = Lattice("a2", [[2, -1], [-1, 2]])
    shells = enumerate_by_norm(a2, 14)
    box = np.array(list(itertools.product(range(-6, 7), repeat=2)))
    norms = np.einsum("ij,jk,ik->i", box, a2.gram, box)
    for norm in range(1, 15):
        expected = int(np.sum(norms == norm))
        got = shells[norm].count if norm in shells else 0
        assert got == expected


def test_enumerated_vectors_sorted_with_exact_norms():
    lattice = build_lattice("e8")
    shells = enumerate_by_norm(lattice, 4)
    for norm, shell in shells.items():
        vecs = shell.vectors.astype(np.int64)
        assert np.all(np.einsum("ij,jk,ik->i", vecs, lattice.gram, vecs) == norm)
        keys = [tuple(v) for v in vecs]
        assert keys == sorted(keys)


def test_enumeration_rejects_indefinite():
    with pytest.raises(DomainError):
        enumerate_by_norm(build_lattice("hyperbolic"), 2)


def test_lattice_frames_reproduce_gram():
    for name in ("e8", "e8e8", "gamma16"):
        frame = lattice_frame(name)
        gram = build_lattice(name).gram
        n = len(frame)
        for i in range(n):
            for j in range(n):
                assert sum(a * b for a, b in zip(frame[i], frame[j])) == gram[i, j]


def test_e8e8_dynkin_edges():
    roots = simple_roots("e8e8")
    edges = {(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 8)}
    edges |= {(i + 8, j + 8) for i, j in edges}
    assert roots.edges() == edges
    assert roots.labels[0] == "a1" and roots.labels[8] == "b1"


def test_d16_fork():
    roots = simple_roots("gamma16")
    edges = roots.edges()
    assert {(14, 15), (14, 16)} <= edges
    assert (15, 16) not in edges
    assert len(edges) == 15


def test_blowdown_cartan_matches_gram(lattice):
    roots = simple_roots(lattice.name)
    blow = blowdown_roots(lattice.name)
    assert np.array_equal(-(blow @ BLOWDOWN_FORM @ blow.T), roots.cartan)
    assert np.array_equal(roots.matrix() @ lattice.gram @ roots.matrix().T, roots.cartan)


def test_blowdown_epsilon_orthonormal():
    eps = blowdown_epsilon()
    form = BLOWDOWN_FORM
    for i, u in enumerate(eps):
        for j, v in enumerate(eps):
            value = sum(u[k] * form[k, k] * v[k] for k in range(len(u)))
            assert value == (-1 if i == j else 0)


def test_reflection(lattice):
    roots = simple_roots(lattice.name)
    a = roots.roots[0]
    assert weyl_reflect(a, a) == -a
    r = reflection_matrix(a)
    assert np.array_equal(r.T @ lattice.gram @ r, lattice.gram)
    assert np.array_equal(r @ r, np.eye(lattice.rank, dtype=np.int64))


def test_weyl_word_matches_matrix(rng, lattice):
    roots = simple_roots(lattice.name)
    word = [int(i) for i in rng.integers(1, 17, size=6)]
    v = lattice.vector(rng.integers(-3, 4, size=lattice.rank))
    assert np.array_equal(weyl_word(roots, word, v).coords, weyl_word_matrix(roots, word) @ v.coords)
    assert weyl_word(roots, word, v).norm() == v.norm()


def test_reflection_rejects_non_root():
    lattice = build_lattice("e8")
    v = lattice.basis_vector(0) + lattice.basis_vector(2)
    assert inner_product(v, v) == 4
    with pytest.raises(DomainError):
        reflection_matrix(v)


def test_signed_permutation_rules():
    with pytest.raises(DomainError):
        SignedPermutation(tuple(range(16)), (-1,) + (1,) * 15)
    t = SignedPermutation.sign_pair(1, 2)
    s = SignedPermutation.transposition(3, 7)
    w = t.compose(s)
    assert w.compose(w.inverse()) == SignedPermutation.identity()
    assert np.array_equal(w.as_matrix(), t.as_matrix() @ s.as_matrix())
    assert apply_signed_permutation(t, list(range(1, 17)))[:3] == [-1, -2, 3]


def _random_signed_permutation(rng, length=5):
    w = SignedPermutation.identity()
    for _ in range(length):
        i, j = (int(k) for k in rng.choice(np.arange(1, 17), size=2, replace=False))
        step = SignedPermutation.transposition(i, j) if rng.random() < 0.5 else SignedPermutation.sign_pair(i, j)
        w = w.compose(step)
    return w


def test_signed_permutation_group_laws(rng):
    one = SignedPermutation.identity()
    for _ in range(20):
        a, b, c = (_random_signed_permutation(rng) for _ in range(3))
        assert a.compose(b).compose(c) == a.compose(b.compose(c))
        assert a.compose(a.inverse()) == one
        assert a.inverse().compose(a) == one
        assert a.compose(one) == a and one.compose(a) == a
        assert a.compose(b).inverse() == b.inverse().compose(a.inverse())


@pytest.mark.parametrize("name", ["e8e8", "gamma16"])
def test_signed_permutation_isometries(name):
    lattice = build_lattice(name)
    for w in (SignedPermutation.transposition(1, 2), SignedPermutation.sign_pair(1, 2)):
        f = w.as_isometry(lattice)
        assert np.array_equal(f.T @ lattice.gram @ f, lattice.gram)


def test_cross_block_transposition_leaves_e8e8():
    with pytest.raises(DomainError):
        SignedPermutation.transposition(1, 9).as_isometry(build_lattice("e8e8"))
