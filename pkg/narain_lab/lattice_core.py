"""Integral lattices: Gram matrices, classification, short vectors, root data.

All Gram matrices are stored positive definite for the rank-8 and rank-16
root lattices; the minus sign of Λ inside L_o is applied only when the
ambient lattices ``lo_*`` are assembled.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy
from scipy import linalg

from .errors import DomainError

logger = logging.getLogger(__name__)

LABELS = ("e8", "e8e8", "gamma16", "hyperbolic", "lo_e8e8", "lo_gamma16")
ROOT_LABELS = ("e8e8", "gamma16")

# Dynkin edges of E8, 1-based: a chain 1..7 with node 8 attached to node 3.
E8_EDGES = ((1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 8))

# Doubled ε-coordinates of the E8 simple roots in the even model
# (integer or all half-integer entries, even coordinate sum).
_E8_FRAME2 = (
    (1, -1, -1, -1, -1, -1, -1, 1),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
    (2, 2, 0, 0, 0, 0, 0, 0),
)

# Max nodes expanded at once by the enumerator before splitting.
_CHUNK = 1 << 17


# -- exact integer helpers ---------------------------------------------------

def _exact(matrix) -> sympy.Matrix:
    return sympy.Matrix([[int(x) for x in row] for row in np.asarray(matrix)])


def exact_determinant(matrix) -> int:
    """Determinant over the integers (sympy Bareiss)."""
    m = _exact(matrix)
    if m.rows == 0:
        return 1
    return int(m.det(method="bareiss"))


def exact_inverse(matrix) -> list[list[Fraction]]:
    """Inverse over the rationals."""
    m = _exact(matrix)
    if m.det(method="bareiss") == 0:
        raise DomainError("matrix is singular")
    inv = m.inv()
    return [[Fraction(int(x.p), int(x.q)) for x in inv.row(r)] for r in range(inv.rows)]


def integral_inverse(matrix) -> np.ndarray:
    """Inverse of a unimodular integer matrix, as int64."""
    inv = exact_inverse(matrix)
    if any(x.denominator != 1 for row in inv for x in row):
        raise DomainError("matrix is not unimodular")
    return np.array([[int(x) for x in row] for row in inv], dtype=np.int64)


def _sign_changes(coeffs: Sequence[int]) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia(gram) -> tuple[int, int]:
    """(positive, negative) index of a symmetric integer matrix.

    The characteristic polynomial of a symmetric matrix is real-rooted, so
    Descartes' rule counts its positive and negative roots exactly.
    """
    m = _exact(gram)
    if m.rows == 0:
        return 0, 0
    if m != m.T:
        raise DomainError("Gram matrix must be symmetric")
    coeffs = [int(c) for c in m.charpoly().all_coeffs()]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    degree = len(coeffs) - 1
    mirrored = [c if (degree - i) % 2 == 0 else -c for i, c in enumerate(coeffs)]
    return _sign_changes(coeffs), _sign_changes(mirrored)


# -- lattices and vectors ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Lattice:
    name: str
    gram: np.ndarray

    def __post_init__(self):
        gram = np.array(self.gram, dtype=np.int64)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] == 0:
            raise DomainError(f"Gram matrix of {self.name!r} must be square and nonempty")
        if not np.array_equal(gram, gram.T):
            raise DomainError(f"Gram matrix of {self.name!r} is not symmetric")
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash((self.name, self.gram.tobytes()))

    def vector(self, coords: Iterable[int]) -> "LatticeVector":
        return LatticeVector(np.asarray(list(coords), dtype=np.int64), self)

    def zero(self) -> "LatticeVector":
        return self.vector([0] * self.rank)

    def basis_vector(self, index: int) -> "LatticeVector":
        coords = [0] * self.rank
        coords[index] = 1
        return self.vector(coords)

    def form(self, u, v):
        """Gram pairing of raw coordinate arrays (any dtype, broadcasting on rows)."""
        return np.asarray(u) @ self.gram @ np.asarray(v)

    def to_json(self) -> list[list[int]]:
        return self.gram.tolist()


@dataclass(frozen=True, eq=False)
class LatticeVector:
    coords: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.int64).reshape(-1)
        if coords.shape[0] != self.lattice.rank:
            raise DomainError(
                f"vector of length {coords.shape[0]} in rank-{self.lattice.rank} lattice")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def _check(self, other: "LatticeVector"):
        if self.lattice != other.lattice:
            raise DomainError(
                f"vectors of {self.lattice.name!r} and {other.lattice.name!r} do not mix")

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(self.coords + other.coords, self.lattice)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(self.coords - other.coords, self.lattice)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.coords, self.lattice)

    def __rmul__(self, k: int) -> "LatticeVector":
        return LatticeVector(int(k) * self.coords, self.lattice)

    def __eq__(self, other):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.lattice == other.lattice and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.lattice.name, self.coords.tobytes()))

    def norm(self) -> int:
        return inner_product(self, self)


def inner_product(u: LatticeVector, v: LatticeVector) -> int:
    u._check(v)
    return int(u.coords @ u.lattice.gram @ v.coords)


@dataclass(frozen=True)
class Classification:
    even: bool
    unimodular: bool
    signature: tuple[int, int]

    def to_dict(self) -> dict:
        return {"even": self.even, "unimodular": self.unimodular,
                "signature": list(self.signature)}


def classify(lattice: Lattice) -> Classification:
    gram = lattice.gram
    return Classification(
        even=bool(np.all(np.diag(gram) % 2 == 0)),
        unimodular=abs(exact_determinant(gram)) == 1,
        signature=inertia(gram),
    )


def is_positive_definite(lattice: Lattice) -> bool:
    return inertia(lattice.gram) == (lattice.rank, 0)


# -- construction ------------------------------------------------------------

def _e8_gram() -> np.ndarray:
    gram = 2 * np.eye(8, dtype=np.int64)
    for i, j in E8_EDGES:
        gram[i - 1, j - 1] = gram[j - 1, i - 1] = -1
    return gram


def _gamma16_frame2() -> np.ndarray:
    """Doubled ε-coordinates of the D16⁺ basis: glue, ε_k − ε_{k+1} (k=2..15), ε15 + ε16."""
    rows = [np.ones(16, dtype=np.int64)]
    for k in range(1, 15):
        row = np.zeros(16, dtype=np.int64)
        row[k], row[k + 1] = 2, -2
        rows.append(row)
    last = np.zeros(16, dtype=np.int64)
    last[14] = last[15] = 2
    rows.append(last)
    return np.array(rows)


def _frame2(name: str) -> np.ndarray | None:
    if name == "e8":
        return np.array(_E8_FRAME2, dtype=np.int64)
    if name == "e8e8":
        return linalg.block_diag(_frame2("e8"), _frame2("e8")).astype(np.int64)
    if name == "gamma16":
        return _gamma16_frame2()
    return None


def lattice_frame(name: str) -> list[list[Fraction]]:
    """Rows: the internal basis of `name` in orthonormal ε-coordinates."""
    frame2 = _frame2(name)
    if frame2 is None:
        raise DomainError(f"lattice {name!r} has no ε-frame")
    return [[Fraction(int(x), 2) for x in row] for row in frame2]


def frame_matrix(name: str) -> np.ndarray:
    """Float copy of `lattice_frame`, for evaluation code."""
    frame2 = _frame2(name)
    if frame2 is None:
        raise DomainError(f"lattice {name!r} has no ε-frame")
    return frame2 / 2.0


def _ambient_gram(inner: np.ndarray) -> np.ndarray:
    rank = inner.shape[0]
    hyperbolic_pair = np.block([
        [np.zeros((2, 2), dtype=np.int64), np.eye(2, dtype=np.int64)],
        [np.eye(2, dtype=np.int64), np.zeros((2, 2), dtype=np.int64)],
    ])
    gram = np.zeros((4 + rank, 4 + rank), dtype=np.int64)
    gram[:4, :4] = hyperbolic_pair
    gram[4:, 4:] = -inner
    return gram


@lru_cache(maxsize=None)
def build_lattice(name: str) -> Lattice:
    if name == "e8":
        return Lattice(name, _e8_gram())
    if name == "e8e8":
        return Lattice(name, linalg.block_diag(_e8_gram(), _e8_gram()).astype(np.int64))
    if name == "gamma16":
        frame2 = _gamma16_frame2()
        return Lattice(name, frame2 @ frame2.T // 4)
    if name == "hyperbolic":
        return Lattice(name, [[0, 1], [1, -2]])
    if name in ("lo_e8e8", "lo_gamma16"):
        return Lattice(name, _ambient_gram(build_lattice(name[3:]).gram))
    raise DomainError(f"unknown lattice label {name!r}; expected one of {', '.join(LABELS)}")


# -- short vectors -----------------------------------------------------------

@dataclass
class Shell:
    norm: int
    count: int
    vectors: np.ndarray | None = field(default=None, repr=False)


class _ShellCollector:
    def __init__(self, max_norm: int, keep_vectors: bool):
        self.counts = np.zeros(max_norm + 1, dtype=np.int64)
        self.keep_vectors = keep_vectors
        self.vectors: list[np.ndarray] = []
        self.norms: list[np.ndarray] = []

    def add(self, norms: np.ndarray, coords: np.ndarray | None):
        self.counts += np.bincount(norms, minlength=self.counts.shape[0])
        if self.keep_vectors:
            self.vectors.append(coords)
            self.norms.append(norms)


def _expand(level, partial, exact, centers, pairings, coords, ctx, sink):
    """One Fincke-Pohst level over a batch of partial vectors.

    `centers[:, k]` holds Σ_j mu_kj x_j and `pairings[:, k]` the exact
    Σ_j G_kj x_j over the coordinates fixed so far, for k ≤ level.
    """
    gram, mu, diag, bound = ctx
    if level < 0:
        keep = (exact > 0) & (exact <= bound)
        sink.add(exact[keep], None if coords is None else coords[keep])
        return
    if partial.shape[0] > _CHUNK:
        for start in range(0, partial.shape[0], _CHUNK):
            piece = slice(start, start + _CHUNK)
            _expand(level, partial[piece], exact[piece], centers[piece], pairings[piece],
                    None if coords is None else coords[piece], ctx, sink)
        return

    center = -centers[:, level]
    radius = np.sqrt(np.maximum(bound - partial, 0.0) / diag[level])
    slack = 1e-9 * (1.0 + bound)
    lo = np.ceil(center - radius - slack).astype(np.int64)
    hi = np.floor(center + radius + slack).astype(np.int64)
    counts = np.maximum(hi - lo + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return
    parent = np.repeat(np.arange(counts.shape[0]), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    x = lo[parent] + offsets

    new_partial = partial[parent] + diag[level] * (x - center[parent]) ** 2
    new_exact = exact[parent] + gram[level, level] * x * x + 2 * x * pairings[parent, level]
    new_centers = centers[parent, :level] + np.outer(x, mu[:level, level])
    new_pairings = pairings[parent, :level] + np.outer(x, gram[:level, level])
    new_coords = None
    if coords is not None:
        new_coords = coords[parent].copy()
        new_coords[:, level] = x
    logger.debug("level %d: %d partial vectors", level, total)
    _expand(level - 1, new_partial, new_exact, new_centers, new_pairings, new_coords, ctx, sink)


def enumerate_by_norm(lattice: Lattice, max_norm: int,
                      keep_vectors: bool = True) -> dict[int, Shell]:
    """All v with 0 < (v, v) ≤ max_norm, grouped by norm.

    Norms are exact integers; vector lists (when kept) are in lexicographic
    coordinate order.
    """
    if max_norm < 1:
        raise DomainError("max_norm must be positive")
    if not is_positive_definite(lattice):
        raise DomainError(f"lattice {lattice.name!r} is not positive definite")
    gram = lattice.gram
    n = lattice.rank
    upper = linalg.cholesky(gram.astype(float), lower=False)
    diag = np.diag(upper) ** 2
    mu = upper / np.diag(upper)[:, None]

    sink = _ShellCollector(max_norm, keep_vectors)
    ctx = (gram, mu, diag, max_norm)
    _expand(n - 1, np.zeros(1), np.zeros(1, dtype=np.int64), np.zeros((1, n)),
            np.zeros((1, n), dtype=np.int64),
            np.zeros((1, n), dtype=np.int16) if keep_vectors else None, ctx, sink)

    shells: dict[int, Shell] = {}
    if keep_vectors and sink.vectors:
        vectors = np.concatenate(sink.vectors)
        norms = np.concatenate(sink.norms)
        order = np.lexsort(vectors.T[::-1])
        vectors, norms = vectors[order], norms[order]
    for norm in np.nonzero(sink.counts)[0]:
        norm = int(norm)
        vecs = vectors[norms == norm] if keep_vectors else None
        shells[norm] = Shell(norm, int(sink.counts[norm]), vecs)
    logger.info("Enumerated %s up to norm %d: %d vectors",
                lattice.name, max_norm, int(sink.counts.sum()))
    return shells


@lru_cache(maxsize=8)
def cached_shells(name: str, max_norm: int, keep_vectors: bool = True) -> dict[int, Shell]:
    return enumerate_by_norm(build_lattice(name), max_norm, keep_vectors)


# -- root systems ------------------------------------------------------------

# Blowdown frame: H1, H2 (square +1) then E1..E18 (square -1).
BLOWDOWN_RANK = 20
BLOWDOWN_FORM = np.diag([1, 1] + [-1] * 18).astype(np.int64)


def _blow(h1=0, h2=0, **e) -> np.ndarray:
    v = np.zeros(BLOWDOWN_RANK, dtype=np.int64)
    v[0], v[1] = h1, h2
    for key, coeff in e.items():
        v[1 + int(key[1:])] += coeff
    return v


def _e_diff(i: int, j: int) -> np.ndarray:
    return _blow(**{f"E{i}": 1}) - _blow(**{f"E{j}": 1})


def blowdown_roots(name: str) -> np.ndarray:
    """Rows: the sixteen simple roots in the blowdown frame, in listed order."""
    if name == "e8e8":
        alphas = [_e_diff(i, i + 1) for i in range(1, 8)]
        alphas.append(_blow(h1=1, E1=-1, E2=-1, E3=-1))
        betas = [_e_diff(9 + i, 10 + i) for i in range(1, 8)]
        betas.append(_blow(h2=1, E10=-1, E11=-1, E12=-1))
        return np.array(alphas + betas)
    if name == "gamma16":
        gammas = [_blow(h1=1, E1=-1, E2=-1, E3=-1)]
        gammas += [_e_diff(k + 1, k + 2) for k in range(2, 16)]
        gammas.append(_blow(h2=1, E18=-1, E16=1, E17=1))
        return np.array(gammas)
    raise DomainError(f"no simple roots for {name!r}")


def blowdown_epsilon() -> list[list[Fraction]]:
    """ε1..ε16 in the blowdown frame: ε1 = ½(H2−E18) + H1 − E1 − E2, ε_l = ½(H2−E18) + E_{l+1}."""
    half = [Fraction(0)] * BLOWDOWN_RANK
    half[1] = Fraction(1, 2)
    half[1 + 18] = Fraction(-1, 2)
    rows = []
    first = list(half)
    first[0] += 1
    first[1 + 1] -= 1
    first[1 + 2] -= 1
    rows.append(first)
    for l in range(2, 17):
        row = list(half)
        row[1 + l + 1] += 1
        rows.append(row)
    return rows


def _epsilon_roots_d16() -> list[list[Fraction]]:
    """D16 simple roots in ε-coordinates: ε_l − ε_{l+1}, then ε15 + ε16."""
    rows = []
    for l in range(15):
        row = [Fraction(0)] * 16
        row[l], row[l + 1] = Fraction(1), Fraction(-1)
        rows.append(row)
    last = [Fraction(0)] * 16
    last[14] = last[15] = Fraction(1)
    rows.append(last)
    return rows


def frame_to_internal(name: str, epsilon_rows: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Internal-basis coordinates of vectors given in ε-coordinates (must be integral)."""
    frame = lattice_frame(name)
    inv_t = exact_inverse([list(col) for col in zip(*frame)])
    out = []
    for vec in epsilon_rows:
        coords = [sum((row[k] * vec[k] for k in range(len(vec))), Fraction(0)) for row in inv_t]
        if any(c.denominator != 1 for c in coords):
            raise DomainError(f"vector {list(map(str, vec))} is not in {name!r}")
        out.append([int(c) for c in coords])
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RootSystemBasis:
    lattice: Lattice
    roots: tuple[LatticeVector, ...]
    cartan: np.ndarray
    labels: tuple[str, ...]
    blowdown: np.ndarray = field(repr=False)

    def matrix(self) -> np.ndarray:
        return np.array([r.coords for r in self.roots])

    def edges(self) -> set[tuple[int, int]]:
        n = len(self.roots)
        return {(i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if self.cartan[i, j] != 0}


@lru_cache(maxsize=None)
def simple_roots(name: str) -> RootSystemBasis:
    lattice = build_lattice(name)
    blow = blowdown_roots(name)
    cartan = -(blow @ BLOWDOWN_FORM @ blow.T)
    if name == "e8e8":
        internal = np.eye(16, dtype=np.int64)
        labels = tuple(f"a{i}" for i in range(1, 9)) + tuple(f"b{i}" for i in range(1, 9))
    else:
        internal = frame_to_internal(name, _epsilon_roots_d16())
        labels = tuple(f"c{i}" for i in range(1, 17))
    if not np.array_equal(internal @ lattice.gram @ internal.T, cartan):
        raise DomainError(f"root data of {name!r} does not match its Gram matrix")
    cartan.setflags(write=False)
    roots = tuple(lattice.vector(row) for row in internal)
    return RootSystemBasis(lattice, roots, cartan, labels, blow)


def weyl_reflect(root: LatticeVector, v: LatticeVector) -> LatticeVector:
    norm = inner_product(root, root)
    if norm not in (2, -2):
        raise DomainError(f"reflector has square {norm}, expected ±2")
    k = 2 * inner_product(v, root) // norm
    return v - k * root


def reflection_matrix(root: LatticeVector) -> np.ndarray:
    """Matrix of `weyl_reflect(root, ·)` acting on coordinate columns."""
    norm = root.norm()
    if norm not in (2, -2):
        raise DomainError(f"reflector has square {norm}, expected ±2")
    r = root.coords
    return np.eye(root.lattice.rank, dtype=np.int64) - (2 // norm) * np.outer(r, root.lattice.gram @ r)


def weyl_word(roots: RootSystemBasis, word: Sequence[int], v: LatticeVector) -> LatticeVector:
    """Apply s_{word[0]} ∘ s_{word[1]} ∘ ... to v (indices 1-based, rightmost first)."""
    for index in reversed(word):
        v = weyl_reflect(roots.roots[index - 1], v)
    return v


def weyl_word_matrix(roots: RootSystemBasis, word: Sequence[int]) -> np.ndarray:
    out = np.eye(roots.lattice.rank, dtype=np.int64)
    for index in word:
        out = out @ reflection_matrix(roots.roots[index - 1])
    return out


# -- signed permutations -----------------------------------------------------

@dataclass(frozen=True)
class SignedPermutation:
    """ε_i ↦ signs[perm[i]]·ε_{perm[i]}; 0-based, even number of sign flips."""
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        if sorted(perm) != list(range(len(perm))):
            raise DomainError(f"{perm} is not a permutation")
        if len(signs) != len(perm) or any(s not in (1, -1) for s in signs):
            raise DomainError("signs must be ±1, one per coordinate")
        if int(np.prod(signs)) != 1:
            raise DomainError("odd number of sign changes")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, n: int = 16) -> "SignedPermutation":
        return cls(tuple(range(n)), (1,) * n)

    @classmethod
    def transposition(cls, i: int, j: int, n: int = 16) -> "SignedPermutation":
        """Swap ε_i and ε_j (1-based)."""
        perm = list(range(n))
        perm[i - 1], perm[j - 1] = j - 1, i - 1
        return cls(tuple(perm), (1,) * n)

    @classmethod
    def sign_pair(cls, i: int, j: int, n: int = 16) -> "SignedPermutation":
        """t_ij: ε_i, ε_j ↦ −ε_i, −ε_j (1-based)."""
        signs = [1] * n
        signs[i - 1] = signs[j - 1] = -1
        return cls(tuple(range(n)), tuple(signs))

    def __len__(self):
        return len(self.perm)

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self ∘ other."""
        n = len(self)
        if len(other) != n:
            raise DomainError("signed permutations of different degree")
        perm = tuple(self.perm[other.perm[i]] for i in range(n))
        inv = [0] * n
        for i, p in enumerate(self.perm):
            inv[p] = i
        signs = tuple(self.signs[k] * other.signs[inv[k]] for k in range(n))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        n = len(self)
        perm = [0] * n
        for i, p in enumerate(self.perm):
            perm[p] = i
        return SignedPermutation(tuple(perm), tuple(self.signs[self.perm[i]] for i in range(n)))

    def as_matrix(self) -> np.ndarray:
        n = len(self)
        out = np.zeros((n, n), dtype=np.int64)
        for i, p in enumerate(self.perm):
            out[p, i] = self.signs[p]
        return out

    def as_isometry(self, lattice: Lattice) -> np.ndarray:
        """The action on internal coordinates of `lattice`; must preserve it."""
        frame = lattice_frame(lattice.name)
        if len(frame[0]) != len(self):
            raise DomainError("degree does not match the lattice frame")
        images = [apply_signed_permutation(self, row) for row in frame]
        # Column k of the result holds the internal coordinates of w(b_k).
        matrix = frame_to_internal(lattice.name, images).T
        if not np.array_equal(matrix.T @ lattice.gram @ matrix, lattice.gram):
            raise DomainError("signed permutation does not preserve the Gram form")
        return matrix


def apply_signed_permutation(w: SignedPermutation, coords: Sequence) -> list:
    """Permute, then sign: out[perm[i]] = signs[perm[i]]·coords[i]."""
    if len(coords) != len(w):
        raise DomainError("vector length does not match the permutation degree")
    out = [None] * len(w)
    for i, p in enumerate(w.perm):
        out[p] = w.signs[p] * coords[i]
    return out
