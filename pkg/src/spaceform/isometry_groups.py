"""Isometries of the model spaces and finitely generated discrete groups.

Every isometry is stored as an (n+1) x (n+1) matrix acting on Weierstrass
coordinates.  Curved isometries satisfy ``A.T @ J @ A == J`` for the Gram
matrix J of the form.  Flat isometries are affine and stored homogeneously::

    [[1, 0],
     [b, R]]      (1, x) -> (1, R x + b)

so composition is matrix multiplication in all three geometries.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import quaternion as quat
from .errors import DimensionMismatchError, GroupNotClosedError, UnsupportedError
from .model_spaces import HYPERBOLIC, SPHERICAL, ModelSpace, bilinear_form

DEDUP_TOL = 1e-8
FIXED_POINT_TOL = 1e-8
DEFAULT_FINITE_CUTOFF = 20

S3 = ModelSpace.spherical(3, 1.0)


@dataclass(frozen=True, eq=False)
class Isometry:
    space: ModelSpace
    matrix: np.ndarray
    word: tuple = None

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        if A.shape != (self.space.n + 1, self.space.n + 1):
            raise DimensionMismatchError(
                f"matrix shape {A.shape} does not match dimension {self.space.n}"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        if self.word is not None:
            object.__setattr__(self, "word", tuple(int(w) for w in self.word))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"Isometry({self.space.kind}, word={self.word})"

    @property
    def linear(self):
        """Linear part; for flat isometries the n x n rotation block."""
        return self.matrix[1:, 1:] if self.space.is_flat else self.matrix

    @property
    def translation(self):
        """Translation vector b of a flat isometry (zero for curved ones)."""
        if self.space.is_flat:
            return self.matrix[1:, 0].copy()
        return np.zeros(self.space.n)

    @property
    def orientation(self):
        return 1 if np.linalg.det(self.linear) > 0 else -1

    @property
    def is_identity(self):
        return bool(np.max(np.abs(self.matrix - np.eye(self.space.n + 1))) <= DEDUP_TOL)

    def inverse(self):
        A = self.matrix
        if self.space.is_flat:
            R = A[1:, 1:]
            inv = np.eye(self.space.n + 1)
            inv[1:, 1:] = R.T
            inv[1:, 0] = -R.T @ A[1:, 0]
        else:
            J = self.space.form_matrix
            Jinv = np.diag(1.0 / np.diag(J))
            inv = Jinv @ A.T @ J
        return Isometry(self.space, inv)

    def with_word(self, word):
        return Isometry(self.space, self.matrix, tuple(word))

    def preserves_form(self, rng=None, samples=100, tol=1e-9):
        """Sampled check that the isometry preserves a (or the flat structure)."""
        rng = np.random.default_rng(0) if rng is None else rng
        n1 = self.space.n + 1
        if self.space.is_flat:
            A = self.matrix
            R = A[1:, 1:]
            return bool(
                np.allclose(A[0], np.eye(n1)[0], atol=0.0)
                and np.max(np.abs(R.T @ R - np.eye(n1 - 1))) <= tol
            )
        x = rng.standard_normal((samples, n1))
        y = rng.standard_normal((samples, n1))
        before = bilinear_form(self.space, x, y)
        after = bilinear_form(self.space, self(x), self(y))
        scale = np.maximum(1.0, np.abs(before))
        return bool(np.max(np.abs(after - before) / scale) <= tol)


def identity(space):
    return Isometry(space, np.eye(space.n + 1), ())


def compose(f, g):
    """f o g; the word of the result is the concatenation when both are known."""
    if f.space != g.space:
        raise DimensionMismatchError("cannot compose isometries of different spaces")
    word = None
    if f.word is not None and g.word is not None:
        word = f.word + g.word
    return Isometry(f.space, f.matrix @ g.matrix, word)


def translation(space, b):
    if not space.is_flat:
        raise UnsupportedError("translations exist in flat space only")
    b = np.asarray(b, dtype=float)
    if b.shape != (space.n,):
        raise DimensionMismatchError(f"translation must have length {space.n}")
    A = np.eye(space.n + 1)
    A[1:, 0] = b
    return Isometry(space, A)


def affine(space, R, b):
    """Flat isometry x -> R x + b."""
    if not space.is_flat:
        raise UnsupportedError("affine isometries exist in flat space only")
    A = np.eye(space.n + 1)
    A[1:, 1:] = np.asarray(R, dtype=float)
    A[1:, 0] = np.asarray(b, dtype=float)
    return Isometry(space, A)


def orthogonal(space, O):
    """Isometry of a curved space given by a matrix in orthonormal coordinates.

    For the sphere, O is orthogonal; for hyperbolic space, a Lorentz matrix.
    """
    D = space.scale_matrix
    Dinv = np.diag(1.0 / np.diag(D))
    return Isometry(space, Dinv @ np.asarray(O, dtype=float) @ D)


def to_orthonormal(iso):
    D = iso.space.scale_matrix
    Dinv = np.diag(1.0 / np.diag(D))
    return D @ iso.matrix @ Dinv


def _twist_space(space):
    space = S3 if space is None else space
    if space.n != 3 or space.curv_sign != SPHERICAL:
        raise UnsupportedError("quaternion twists act on the 3-sphere only")
    return space


def left_twist(q, space=None):
    """Isometry x -> q x of the 3-sphere (q is normalized first)."""
    space = _twist_space(space)
    q = quat.qnormalize(q)
    return orthogonal(space, quat.left_matrix(q))


def right_twist(q, space=None):
    """Isometry x -> x q of the 3-sphere (q is normalized first)."""
    space = _twist_space(space)
    q = quat.qnormalize(q)
    return orthogonal(space, quat.right_matrix(q))


def as_quaternion(iso):
    """Quaternion of a left twist: the image of 1."""
    return to_orthonormal(iso)[:, 0]


def rotation(space, plane, angle):
    """Rotation by ``angle`` in the coordinate plane (i, j) of a spherical model."""
    i, j = plane
    O = np.eye(space.n + 1)
    c, s = math.cos(angle), math.sin(angle)
    O[i, i] = c
    O[j, j] = c
    O[i, j] = -s
    O[j, i] = s
    return orthogonal(space, O)


def minimal_displacement(iso, space=None):
    """Infimum over points x of d(x, iso(x)).

    Closed forms: on the sphere ``k arccos(lambda_max)`` with lambda_max the
    top eigenvalue of the symmetric part of the orthogonal matrix; in flat
    space the length of the translation component along the fixed subspace of
    the rotation; in hyperbolic space ``k log(spectral radius)``.
    """
    space = iso.space if space is None else space
    if space != iso.space:
        raise DimensionMismatchError("isometry belongs to another space")
    if space.is_flat:
        R = iso.linear
        b = iso.translation
        # orthogonal projection of b onto ker(R - I)
        u, sv, vt = np.linalg.svd(R - np.eye(space.n))
        null = vt[sv <= FIXED_POINT_TOL]
        return float(np.linalg.norm(null @ b))
    O = to_orthonormal(iso)
    if space.curv_sign == SPHERICAL:
        lam = np.linalg.eigvalsh(0.5 * (O + O.T))[-1]
        return float(space.k * math.acos(min(1.0, max(-1.0, lam))))
    rho = float(np.max(np.abs(np.linalg.eigvals(O))))
    return float(space.k * math.log(max(rho, 1.0)))


def sampled_displacements(iso, points):
    from .model_spaces import distance

    return distance(iso.space, points, iso(points))


def fixed_point(iso, space=None):
    """A fixed point of the isometry on the model, or None.

    Sphere: unit vector in ker(O - I).  Hyperbolic: timelike vector in that
    kernel.  Flat: a solution of (R - I) x = -b.  The returned point is made
    deterministic by picking the lexicographically largest sign.
    """
    space = iso.space if space is None else space
    n1 = space.n + 1
    if space.is_flat:
        R = iso.linear
        b = iso.translation
        x, *_ = np.linalg.lstsq(R - np.eye(space.n), -b, rcond=None)
        if np.linalg.norm((R - np.eye(space.n)) @ x + b) > FIXED_POINT_TOL:
            return None
        return np.concatenate([[1.0], x])
    O = to_orthonormal(iso)
    u, sv, vt = np.linalg.svd(O - np.eye(n1))
    null = vt[sv <= FIXED_POINT_TOL]
    if len(null) == 0:
        return None
    D = space.scale_matrix
    if space.curv_sign == SPHERICAL:
        y = null[0]
        y = y / np.linalg.norm(y)
        if tuple(-y) > tuple(y):
            y = -y
        x = np.linalg.solve(D, space.k * y)
        return x
    # hyperbolic: need a vector of negative Minkowski norm in the kernel
    eta = np.diag([-1.0] + [1.0] * space.n)
    G = null @ eta @ null.T
    w, V = np.linalg.eigh(G)
    if w[0] >= -FIXED_POINT_TOL:
        return None
    y = V[:, 0] @ null
    y = y / math.sqrt(-(y @ eta @ y))
    if y[0] < 0:
        y = -y
    return np.linalg.solve(D, space.k * y)


def has_fixed_point(iso, space=None):
    return fixed_point(iso, space) is not None


class _MatrixIndex:
    """Hash lookup of matrices up to an entrywise tolerance.

    Keys are entries rounded to a grid much coarser than the tolerance; an
    entry close to a rounding boundary also probes the neighbouring cell.
    """

    GRID = 1e-6

    def __init__(self, tol=DEDUP_TOL):
        self.tol = tol
        self._table = {}

    def _keys(self, M):
        scaled = M.ravel() / self.GRID
        base = np.round(scaled)
        frac = scaled - base
        near = np.abs(np.abs(frac) - 0.5) < 2 * self.tol / self.GRID
        keys = [tuple(base.astype(np.int64))]
        for idx in np.flatnonzero(near):
            alt = []
            for key in keys:
                key = list(key)
                key[idx] += 1 if frac[idx] > 0 else -1
                alt.append(tuple(key))
            keys.extend(alt)
        return keys

    def find(self, M):
        for key in self._keys(M):
            for j, other in self._table.get(key, ()):
                if np.max(np.abs(other - M)) <= self.tol:
                    return j
        return None

    def add(self, M, j):
        key = tuple(np.round(M.ravel() / self.GRID).astype(np.int64))
        self._table.setdefault(key, []).append((j, M))


def _renormalize(space, A):
    """Project A back onto the isometry group to stop drift in long products."""
    if space.is_flat:
        R = A[1:, 1:]
        u, _, vt = np.linalg.svd(R)
        out = A.copy()
        out[1:, 1:] = u @ vt
        out[0] = 0.0
        out[0, 0] = 1.0
        return out
    if space.curv_sign == SPHERICAL:
        D = space.scale_matrix
        Dinv = np.diag(1.0 / np.diag(D))
        u, _, vt = np.linalg.svd(D @ A @ Dinv)
        return Dinv @ (u @ vt) @ D
    return A


FINITE = "finite"
LATTICE = "lattice"
AFFINE_FLAT = "affine-flat"
KINDS = (FINITE, LATTICE, AFFINE_FLAT)


@dataclass(eq=False)
class DiscreteGroup:
    """Group generated by ``generators``; elements enumerated breadth first.

    Inverses of generators are appended automatically (unless already
    present), so words are tuples of indices into ``extended_generators``.
    """

    space: ModelSpace
    generators: list
    kind: str = FINITE
    max_word_length: int = None
    name: str = None
    _elements: list = field(default=None, init=False, repr=False)
    _extended: list = field(default=None, init=False, repr=False)
    _inverse_index: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        for g in self.generators:
            if g.space != self.space:
                raise DimensionMismatchError("generator belongs to another space")
        if self.max_word_length is None:
            if self.kind != FINITE:
                raise ValueError("max_word_length must be given for infinite groups")
            self.max_word_length = DEFAULT_FINITE_CUTOFF
        if self.kind == LATTICE:
            if not self.space.is_flat:
                raise ValueError("lattice groups live in flat space")
            for g in self.generators:
                if np.max(np.abs(g.linear - np.eye(self.space.n))) > DEDUP_TOL:
                    raise ValueError("lattice generators must be pure translations")
        self._build_extended()

    def _build_extended(self):
        ext = [Isometry(self.space, g.matrix, (i,)) for i, g in enumerate(self.generators)]
        index = _MatrixIndex()
        for i, g in enumerate(ext):
            index.add(g.matrix, i)
        inv_of = [None] * len(ext)
        for i, g in enumerate(list(ext)):
            ginv = g.inverse().matrix
            j = index.find(ginv)
            if j is None:
                j = len(ext)
                ext.append(Isometry(self.space, ginv, (j,)))
                index.add(ginv, j)
                inv_of.append(i)
            inv_of[i] = j
        self._extended = ext
        self._inverse_index = inv_of

    @property
    def extended_generators(self):
        return list(self._extended)

    def inverse_word(self, word):
        return tuple(self._inverse_index[w] for w in reversed(word))

    @property
    def lattice_basis(self):
        """Columns are the translation vectors of the generators (lattice kind)."""
        if self.kind != LATTICE:
            raise UnsupportedError("only lattice groups have a lattice basis")
        return np.array([g.translation for g in self.generators]).T

    def lattice_word(self, m):
        """Word for the lattice element sum_i m_i g_i."""
        word = []
        for i, mi in enumerate(np.asarray(m, dtype=int)):
            letter = i if mi > 0 else self._inverse_index[i]
            word.extend([letter] * abs(int(mi)))
        return tuple(sorted(word))

    def lattice_element(self, m):
        B = self.lattice_basis
        t = translation(self.space, B @ np.asarray(m, dtype=float))
        return t.with_word(self.lattice_word(m))

    def elements(self):
        if self._elements is None:
            self._elements = enumerate_group(self)
        return list(self._elements)

    @property
    def order(self):
        if self.kind != FINITE:
            return math.inf
        return len(self.elements())

    def to_json(self):
        from .io import group_to_json

        return group_to_json(self)


def enumerate_group(group):
    """Breadth-first closure of the group by word length.

    Elements are ordered by (word length, word); each keeps the first
    (shortest, lexicographically smallest) word found.  For the finite kind
    the closure must stabilize within ``max_word_length`` steps.
    """
    space = group.space
    gens = group.extended_generators
    ident = identity(space)
    elements = [ident]
    index = _MatrixIndex()
    index.add(ident.matrix, 0)
    frontier = [ident]
    length = 0
    while frontier:
        if length == group.max_word_length and group.kind != FINITE:
            break
        nxt = []
        for el in frontier:
            for j, g in enumerate(gens):
                M = _renormalize(space, el.matrix @ g.matrix)
                if index.find(M) is not None:
                    continue
                if length == group.max_word_length:
                    raise GroupNotClosedError(
                        f"group not closed at cutoff {group.max_word_length}",
                        cutoff=group.max_word_length,
                        found=len(elements),
                    )
                new = Isometry(space, M, el.word + (j,))
                index.add(M, len(elements))
                elements.append(new)
                nxt.append(new)
        frontier = nxt
        length += 1
    return elements


def cyclic(generator, max_word_length=None):
    return DiscreteGroup(generator.space, [generator], FINITE, max_word_length)


_PHI = (1.0 + math.sqrt(5.0)) / 2.0

_FAMILY_ALIASES = {
    "cyclic": "cyclic",
    "c": "cyclic",
    "z": "cyclic",
    "binary_dihedral": "binary_dihedral",
    "2d": "binary_dihedral",
    "dic": "binary_dihedral",
    "binary_tetrahedral": "binary_tetrahedral",
    "2t": "binary_tetrahedral",
    "binary_octahedral": "binary_octahedral",
    "2o": "binary_octahedral",
    "binary_icosahedral": "binary_icosahedral",
    "2i": "binary_icosahedral",
}


def parse_group_kind(text):
    """Split names like ``"2I"``, ``"cyclic:8"``, ``"C8"`` or ``"2D3"`` into (family, m)."""
    raw = text.strip()
    low = raw.lower()
    if ":" in low:
        fam, m = low.split(":", 1)
        m = int(m)
    else:
        fam, m = low, None
        for prefix in sorted(_FAMILY_ALIASES, key=len, reverse=True):
            if low.startswith(prefix) and low[len(prefix):].isdigit():
                fam, m = prefix, int(low[len(prefix):])
                break
    if fam not in _FAMILY_ALIASES:
        raise ValueError(f"unknown finite group {text!r}")
    return _FAMILY_ALIASES[fam], m


def finite_spherical_group(kind, m=None, space=None, max_word_length=None):
    """Finite subgroup of the unit quaternions acting on S^3 by left twists.

    Orders: cyclic m -> m, binary_dihedral m -> 4m, binary_tetrahedral -> 24,
    binary_octahedral -> 48, binary_icosahedral -> 120.
    """
    if m is None and (":" in kind or any(ch.isdigit() for ch in kind)):
        kind, m = parse_group_kind(kind)
    else:
        kind = _FAMILY_ALIASES.get(kind.lower(), kind)
    space = _twist_space(space)
    if kind == "cyclic":
        if m is None or m < 1:
            raise ValueError("cyclic group needs m >= 1")
        qs = [quat.unit_exp(quat.I, 2.0 * math.pi / m)]
    elif kind == "binary_dihedral":
        if m is None or m < 1:
            raise ValueError("binary dihedral group needs m >= 1")
        qs = [quat.unit_exp(quat.I, math.pi / m), quat.J]
    elif kind == "binary_tetrahedral":
        qs = [[0.5, 0.5, 0.5, 0.5], quat.I]
    elif kind == "binary_octahedral":
        qs = [[0.5, 0.5, 0.5, 0.5], quat.I, [1 / math.sqrt(2), 1 / math.sqrt(2), 0.0, 0.0]]
    elif kind == "binary_icosahedral":
        qs = [[_PHI / 2, 1 / (2 * _PHI), 0.5, 0.0], quat.I]
    else:
        raise ValueError(f"unknown finite group {kind!r}")
    gens = [left_twist(_clean(q), space) for q in qs]
    label = kind if m is None else f"{kind}:{m}"
    return DiscreteGroup(space, gens, FINITE, max_word_length, name=label)


def _clean(q):
    q = np.asarray(q, dtype=float)
    q = np.where(np.abs(q) < 1e-15, 0.0, q)
    return q


def lattice_group(space, basis, max_word_length=6):
    """Translation lattice with the given basis vectors (rows)."""
    gens = [translation(space, b) for b in np.atleast_2d(basis)]
    return DiscreteGroup(space, gens, LATTICE, max_word_length, name="lattice")


def cubic_lattice(n=3, spacing=1.0, max_word_length=6):
    space = ModelSpace.flat(n)
    return lattice_group(space, spacing * np.eye(n), max_word_length)


def antipodal_group(space):
    """{I, -I}: elliptic space when space is S^3."""
    if space.curv_sign != SPHERICAL:
        raise UnsupportedError("the antipodal map needs a spherical model")
    return DiscreteGroup(space, [Isometry(space, -np.eye(space.n + 1))], FINITE, name="antipodal")


def minimal_group_displacement(group, elements=None):
    """Smallest minimal displacement over the non-identity elements."""
    elements = group.elements() if elements is None else elements
    best = math.inf
    for el in elements:
        if el.is_identity:
            continue
        best = min(best, minimal_displacement(el))
    return best
