"""Space forms X/Gamma: verification, quotient metric, Dirichlet reduction, covering maps.

Lattice groups are searched exactly: every candidate translate is found by an
integer box search over the bounding box of the relevant ball, so no
enumeration cutoff is involved.  Finite groups use their full element list.
Other infinite groups (affine crystallographic, hyperbolic) use the enumerated
word ball and raise WindowInsufficientError when a minimizer sits on its
boundary.
"""

from dataclasses import dataclass
import itertools
import math
import warnings

import numpy as np

from .errors import (
    AmbiguousLiftError,
    InfiniteVolumeError,
    SpaceFormViolation,
    UnsupportedError,
    WindowInsufficientError,
)
from .isometry_groups import (
    FINITE,
    LATTICE,
    fixed_point,
    identity,
    minimal_displacement,
)
from .model_spaces import EPS, SPHERICAL, check_point, distance

TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpaceForm:
    space: object
    group: object
    r: float
    base: np.ndarray = None

    def __post_init__(self):
        base = self.space.base_point if self.base is None else check_point(self.space, self.base)
        base = np.array(base, dtype=float)
        base.setflags(write=False)
        object.__setattr__(self, "base", base)


@dataclass(frozen=True)
class QuotientPoint:
    """Canonical representative of an orbit: the point of the Dirichlet domain."""

    rep: np.ndarray


def _rep(x):
    return x.rep if isinstance(x, QuotientPoint) else np.asarray(x, dtype=float)


# -- lattice search ---------------------------------------------------------------


def _lattice_box(group, offset, radius):
    """Integer vectors m with |offset + B m| <= radius (+ tolerance)."""
    B = group.lattice_basis
    pinv = np.linalg.pinv(B)
    centre = -pinv @ offset
    half = radius * np.linalg.norm(pinv, axis=1) + 1e-9
    lo = np.ceil(centre - half - 1e-12).astype(int)
    hi = np.floor(centre + half + 1e-12).astype(int)
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    ms = np.array(list(itertools.product(*ranges)), dtype=float).reshape(-1, B.shape[1])
    if len(ms) == 0:
        return ms.astype(int), np.zeros(0)
    d = np.linalg.norm(offset + ms @ B.T, axis=1)
    keep = d <= radius + TIE_TOL
    return ms[keep].astype(int), d[keep]


def lattice_images(group, y, centre, radius):
    """Lattice translates of y within ``radius`` of ``centre``: (m vectors, points, distances)."""
    B = group.lattice_basis
    ms, d = _lattice_box(group, y[1:] - centre[1:], radius)
    pts = np.repeat(y[None, :], len(ms), axis=0)
    pts[:, 1:] += ms @ B.T
    return ms, pts, d


def _nearest_lattice(group, x, y):
    B = group.lattice_basis
    pinv = np.linalg.pinv(B)
    m0 = np.round(pinv @ (x[1:] - y[1:]))
    y0 = y.copy()
    y0[1:] = y[1:] + B @ m0
    rho = float(np.linalg.norm(x[1:] - y0[1:]))
    ms, pts, d = lattice_images(group, y, x, rho)
    return ms, pts, d


# -- generic candidate sets --------------------------------------------------------


def _candidates(form, x, y):
    """Images gamma y relevant for minimizing d(x, gamma y).

    Returns (elements or None, m vectors or None, points, distances).
    """
    group = form.group
    space = form.space
    if group.kind == LATTICE:
        ms, pts, d = _nearest_lattice(group, x, y)
        return None, ms, pts, d
    els = group.elements()
    pts = np.array([g(y) for g in els])
    d = distance(space, x, pts)
    return els, None, pts, d


def _element(form, els, ms, i):
    if els is not None:
        return els[i]
    return form.group.lattice_element(ms[i])


def _check_window(form, els, i):
    if els is None or form.group.kind == FINITE:
        return
    if len(els[i].word) >= form.group.max_word_length:
        raise WindowInsufficientError(
            "minimizing element lies on the enumeration boundary; raise max_word_length",
            cutoff=form.group.max_word_length,
        )


def nearest_image(form, x, y):
    """(distance, element, point) for the image gamma y closest to x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    els, ms, pts, d = _candidates(form, x, y)
    i = int(np.argmin(d))
    _check_window(form, els, i)
    return float(d[i]), _element(form, els, ms, i), pts[i]


# -- operations --------------------------------------------------------------------


def find_violation(space, group, r, base=None):
    """First violation of the free, discontinuous action test, or None.

    Checks every non-identity element considered (all elements of a finite
    group; for a lattice, every translate within 3r of the base) for fixed
    points and for minimal displacement below r, then checks that orbit points
    of the base within a ball of radius 3r are pairwise at least r apart.
    """
    base = space.base_point if base is None else np.asarray(base, dtype=float)
    tol = EPS * max(1.0, r)
    if group.kind == LATTICE:
        ms, orbit, _ = lattice_images(group, base, base, 3.0 * r)
        elements = [group.lattice_element(m) for m in ms]
    else:
        elements = group.elements()
        orbit = np.array([g(base) for g in elements])
    for el in elements:
        if el.is_identity:
            continue
        p = fixed_point(el, space)
        if p is not None:
            return SpaceFormViolation(
                f"element {el.word} has a fixed point", "fixed_point", element=el, point=p
            )
        disp = minimal_displacement(el, space)
        if disp < r - tol:
            return SpaceFormViolation(
                f"element {el.word} displaces points by {disp:.17g} < r",
                "displacement",
                element=el,
                displacement=disp,
            )
    near = orbit[distance(space, base, orbit) <= 3.0 * r + tol]
    for a, b in itertools.combinations(range(len(near)), 2):
        dab = float(distance(space, near[a], near[b]))
        if dab < r - tol:
            return SpaceFormViolation(
                "orbit points closer than r", "orbit_accumulation", displacement=dab,
                point=near[a],
            )
    return None


def verify_space_form(space, group, r, base=None):
    """Return a SpaceForm, or raise SpaceFormViolation naming the offending element."""
    if group.space != space:
        raise ValueError("group acts on a different space")
    if not r > 0:
        raise ValueError("displacement bound r must be positive")
    violation = find_violation(space, group, r, base)
    if violation is not None:
        raise violation
    return SpaceForm(space, group, float(r), base)


def suggest_r(group, base=None):
    """Smallest displacement found among the considered non-identity elements."""
    space = group.space
    if group.kind == LATTICE:
        B = group.lattice_basis
        shortest = float(np.min(np.linalg.norm(B, axis=0)))
        base = space.base_point
        ms, _, d = lattice_images(group, base, base, shortest)
        return float(np.min(d[np.any(ms != 0, axis=1)]))
    best = math.inf
    for el in group.elements():
        if not el.is_identity:
            best = min(best, minimal_displacement(el, space))
    return best


def quotient_distance(form, x, y):
    """min over gamma of d(x, gamma y)."""
    return nearest_image(form, _rep(x), _rep(y))[0]


def _lex_largest(points):
    best = 0
    for i in range(1, len(points)):
        if tuple(points[i]) > tuple(points[best]):
            best = i
    return best


def reduce(form, x):
    """Canonical representative of the orbit of x in the Dirichlet domain of form.base.

    Boundary ties (distances within 1e-9) go to the lexicographically
    largest coordinate vector.
    """
    x = check_point(form.space, _rep(x))
    els, ms, pts, d = _candidates(form, form.base, x)
    dmin = float(np.min(d))
    tied = np.flatnonzero(d <= dmin + TIE_TOL)
    i = int(tied[_lex_largest(pts[tied])])
    _check_window(form, els, i)
    rep = np.array(pts[i])
    if form.space.is_flat:
        rep[0] = 1.0
    return QuotientPoint(rep)


def project(form, x):
    return reduce(form, x)


def lift_path(form, path, start):
    """Lift a path of quotient points to the cover, starting at ``start``.

    Each step takes the image of the next point nearest the previous lift;
    steps must be shorter than r/2 so that image is unique.
    """
    start = check_point(form.space, np.asarray(start, dtype=float))
    reps = [_rep(p) for p in path]
    if not reps:
        return []
    first = reduce(form, start).rep
    if float(distance(form.space, first, reduce(form, reps[0]).rep)) > 1e-8 * max(1.0, form.r):
        raise ValueError("start does not project to the first path point")
    lifted = [start]
    for i, p in enumerate(reps[1:], start=1):
        d, _, q = nearest_image(form, lifted[-1], p)
        if d >= form.r / 2:
            raise AmbiguousLiftError(
                f"path step {i} has length {d:.17g} >= r/2", step=i, length=d
            )
        lifted.append(np.array(q))
    return lifted


def deck_transformation(form, x, y, tol=1e-9):
    """The group element gamma with gamma x == y (within tol), or None."""
    x = np.asarray(_rep(x), dtype=float)
    y = np.asarray(_rep(y), dtype=float)
    if float(distance(form.space, x, y)) <= tol:
        return identity(form.space)
    d, g, _ = nearest_image(form, y, x)
    if d <= tol * max(1.0, form.space.k):
        return g
    return None


def volume(form):
    """Riemannian volume of the quotient (flat lattices and spherical 3-forms)."""
    space = form.space
    group = form.group
    if space.is_flat:
        if group.kind != LATTICE:
            raise UnsupportedError("flat volumes are implemented for lattice groups")
        B = group.lattice_basis
        if B.shape[1] != space.n or np.linalg.matrix_rank(B) < space.n:
            raise InfiniteVolumeError("lattice rank is below the dimension; volume is infinite")
        return float(abs(np.linalg.det(B)))
    if space.curv_sign == SPHERICAL:
        if space.n != 3:
            raise UnsupportedError("spherical volumes are implemented for n = 3 only")
        return 2.0 * math.pi**2 * space.k**3 / group.order
    raise UnsupportedError("hyperbolic quotient volumes are not supported")


def _sphere_samples(space, count, seed, method):
    if method == "sobol":
        from scipy.stats import qmc

        with warnings.catch_warnings():
            # balance warning for non power-of-two counts
            warnings.simplefilter("ignore", UserWarning)
            u = qmc.Sobol(d=3, scramble=True, seed=seed).random(count)
    else:
        u = np.random.default_rng(seed).random((count, 3))
    # uniform unit quaternions from three uniforms
    a = np.sqrt(1.0 - u[:, 0])
    b = np.sqrt(u[:, 0])
    t1 = 2.0 * math.pi * u[:, 1]
    t2 = 2.0 * math.pi * u[:, 2]
    y = np.stack([a * np.cos(t1), a * np.sin(t1), b * np.cos(t2), b * np.sin(t2)], axis=1)
    x = y.copy()
    x[:, 1:] *= space.k
    return x


def monte_carlo_volume(form, samples=1_000_000, seed=0, method="sobol", chunk=200_000):
    """Dirichlet-domain fraction of S^3 times its total volume.

    ``method`` is ``"sobol"`` (scrambled Sobol points) or ``"uniform"``
    (pseudo-random).
    """
    space = form.space
    if space.curv_sign != SPHERICAL or space.n != 3:
        raise UnsupportedError("Monte Carlo volume is implemented for spherical 3-forms")
    orbit = np.array([g(form.base) for g in form.group.elements()])
    J = space.form_matrix
    ref = J @ form.base
    gram = orbit @ J
    inside = 0
    pts = _sphere_samples(space, samples, seed, method)
    for start in range(0, samples, chunk):
        block = pts[start : start + chunk]
        # d(base, x) <= d(gamma base, x)  <=>  a(base, x) >= a(gamma base, x)
        own = block @ ref
        other = np.max(block @ gram.T, axis=1)
        inside += int(np.count_nonzero(own >= other - 1e-12))
    return 2.0 * math.pi**2 * space.k**3 * inside / samples
