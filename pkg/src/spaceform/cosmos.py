"""Observable consequences of a multiply connected universe.

Ghost images of a star catalogue, the volume criterion (the space must hold
the visible star system), curvature-radius bounds from parallaxes, and the
Newtonian force of a body summed over its images.

Photometry and gravity are deliberately minimal: flux is luminosity divided
by the area of the geodesic sphere through the observer, and gravity is the
inverse-square sum over images with G = 1.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateError, UnsupportedError, WindowInsufficientError
from .isometry_groups import FINITE, LATTICE
from .model_spaces import (
    EPS,
    HYPERBOLIC,
    SPHERICAL,
    ball_volume,
    bilinear_form,
    check_point,
    distance,
    initial_direction,
    parallax_floor,
    sphere_area,
    tangent_frame,
)
from .quotients import lattice_images, reduce, volume


@dataclass(frozen=True)
class Star:
    id: str
    pos: np.ndarray
    lum: float


@dataclass(frozen=True)
class StarCatalog:
    stars: tuple

    def __post_init__(self):
        stars = tuple(self.stars)
        ids = [s.id for s in stars]
        if len(set(ids)) != len(ids):
            raise ValueError("star ids must be unique")
        for s in stars:
            if not s.lum > 0:
                raise ValueError(f"star {s.id!r} needs a positive luminosity")
        object.__setattr__(self, "stars", stars)

    @classmethod
    def from_json(cls, obj, space):
        from .io import parse_point

        return cls(
            tuple(
                Star(str(s["id"]), parse_point(space, s["pos"]), float(s.get("lum", 1.0)))
                for s in obj["stars"]
            )
        )

    def to_json(self):
        return {
            "stars": [
                {"id": s.id, "pos": [float(v) for v in s.pos], "lum": float(s.lum)}
                for s in self.stars
            ]
        }


@dataclass(frozen=True)
class GhostImage:
    source_id: str
    word: tuple
    direction: Optional[tuple]
    dist: float
    flux: float
    point: tuple
    flagged: bool = False

    def to_json(self):
        return {
            "source_id": self.source_id,
            "word": list(self.word),
            "direction": None if self.direction is None else list(self.direction),
            "dist": self.dist,
            "flux": self.flux,
            "point": list(self.point),
            "flagged": self.flagged,
        }


def _images_within(form, p, centre, radius):
    """Images gamma p with d(centre, gamma p) <= radius: list of (word, point, dist)."""
    group = form.group
    space = form.space
    if group.kind == LATTICE:
        ms, pts, d = lattice_images(group, p, centre, radius)
        return [(group.lattice_word(m), pts[i], float(d[i])) for i, m in enumerate(ms)]
    els = group.elements()
    pts = np.array([g(p) for g in els])
    d = distance(space, centre, pts)
    out = []
    for i in np.flatnonzero(d <= radius + EPS):
        if group.kind != FINITE and len(els[i].word) >= group.max_word_length:
            raise WindowInsufficientError(
                "an image within the horizon lies on the enumeration boundary",
                cutoff=group.max_word_length,
            )
        out.append((els[i].word, pts[i], float(d[i])))
    return out


def _frame_components(space, frame, v):
    return tuple(float(c) for c in bilinear_form(space, frame, v))


def enumerate_images(form, observer, catalog, horizon, require_canonical=True, workers=1):
    """All images of catalogue stars within ``horizon`` of ``observer``.

    Sorted by distance, then source id, then word.  Images coinciding with the
    observer (or antipodal to it on the sphere) have no direction; they are
    kept with ``flagged=True``.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    space = form.space
    if space.curv_sign == HYPERBOLIC:
        raise UnsupportedError("ghost images are not supported for hyperbolic forms")
    observer = check_point(space, observer, "observer")
    frame = tangent_frame(space, observer)
    if require_canonical:
        for s in catalog.stars:
            rep = reduce(form, s.pos).rep
            if float(distance(space, rep, s.pos)) > 1e-8:
                raise ValueError(f"star {s.id!r} is not in the fundamental domain")

    def per_star(star):
        out = []
        for word, pt, d in _images_within(form, star.pos, observer, horizon):
            try:
                direction = _frame_components(space, frame, initial_direction(space, observer, pt))
                area = sphere_area(space, d)
                flux = star.lum / area if area > 0 else math.inf
                flagged = area <= 0
            except DegenerateError:
                direction, flux, flagged = None, math.inf, True
            out.append(
                GhostImage(star.id, tuple(word), direction, d, flux, tuple(float(v) for v in pt), flagged)
            )
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(per_star, catalog.stars))
    else:
        chunks = [per_star(s) for s in catalog.stars]
    images = [im for chunk in chunks for im in chunk]
    images.sort(key=lambda im: (round(im.dist, 12), im.source_id, im.word))
    return images


def volume_bound_check(form, system_radius):
    """Does the space hold a ball of the visible star system?  Returns (pass, ratio)."""
    v = volume(form)
    ball = ball_volume(form.space, system_radius)
    margin = v / ball if ball > 0 else math.inf
    return v > ball, margin


class GravityResult(NamedTuple):
    force: np.ndarray
    trace: list


def gravitational_field(form, source, mass, test, cutoff):
    """Inverse-square force at ``test`` summed over images of ``source``.

    Images are added in order of distance.  The force is given in the
    orthonormal tangent frame at ``test``; ``trace`` holds (shell radius,
    partial sum) after each distinct image distance.  Lattice sums converge
    only conditionally, so the trace is the honest output.
    """
    space = form.space
    if space.curv_sign not in (0, SPHERICAL):
        raise UnsupportedError("gravity sums need a flat or spherical form")
    source = check_point(space, source, "source")
    test = check_point(space, test, "test")
    frame = tangent_frame(space, test)
    found = _images_within(form, source, test, cutoff)
    found.sort(key=lambda item: (round(item[2], 12), item[0]))
    total = np.zeros(space.n)
    trace = []
    for word, pt, d in found:
        if d <= EPS:
            raise DegenerateError("test point lies in the orbit of the source")
        direction = np.array(_frame_components(space, frame, initial_direction(space, test, pt)))
        total = total + (mass / d**2) * direction
        if trace and abs(trace[-1][0] - d) <= 1e-12:
            trace[-1] = (trace[-1][0], total.copy())
        else:
            trace.append((d, total.copy()))
    return GravityResult(total, trace)


def curvature_radius_bound(p_min, baseline):
    """Lower bounds on the curvature radius implied by a smallest observed parallax.

    Hyperbolic: every parallax exceeds the floor ``arctan(sinh(b/k))``, so an
    observed ``p_min`` needs ``floor(k) <= p_min``, i.e. ``k >= b / asinh(tan p_min)``.

    Elliptic: a positive parallax needs the star closer than ``pi k / 2``;
    the star with parallax ``p_min`` sits at (Euclidean estimate)
    ``b / tan p_min``, giving ``k >= 2 b / (pi tan p_min)``.
    """
    if not 0 < p_min < math.pi / 2:
        raise ValueError("p_min must lie in (0, pi/2)")
    if not baseline > 0:
        raise ValueError("baseline must be positive")
    tp = math.tan(p_min)
    hyperbolic = baseline / math.asinh(tp)
    elliptic = 2.0 * baseline / (math.pi * tp)
    return elliptic, hyperbolic


__all__ = [
    "GhostImage",
    "GravityResult",
    "Star",
    "StarCatalog",
    "curvature_radius_bound",
    "enumerate_images",
    "gravitational_field",
    "parallax_floor",
    "volume_bound_check",
]
