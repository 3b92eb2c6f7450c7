"""Spherical, flat and hyperbolic space in Weierstrass coordinates.

Points of an n-dimensional model live in R^{n+1}.  For curvature sign
``s = +1`` or ``-1`` they satisfy ``a(x, x) = s k^2`` where

    a(x, y) = s k^2 x0 y0 + x1 y1 + ... + xn yn,

(with ``x0 > 0`` on the hyperbolic sheet).  Flat points sit on the hyperplane
``x0 = 1`` and the form reduces to the dot product of coordinates 1..n.
In every case the base point is ``(1, 0, ..., 0)``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateError, DimensionMismatchError, OffQuadricError, UnsupportedError

EPS = 1e-9

SPHERICAL = 1
FLAT = 0
HYPERBOLIC = -1

_KIND_NAMES = {SPHERICAL: "spherical", FLAT: "flat", HYPERBOLIC: "hyperbolic"}
_KIND_SIGNS = {v: k for k, v in _KIND_NAMES.items()}


@dataclass(frozen=True)
class ModelSpace:
    """Simply connected n-dimensional geometry of curvature ``curv_sign / k**2``."""

    n: int
    curv_sign: int
    k: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        if self.curv_sign not in (SPHERICAL, FLAT, HYPERBOLIC):
            raise ValueError(f"curv_sign must be -1, 0 or 1, got {self.curv_sign}")
        if self.curv_sign != FLAT and not self.k > 0:
            raise ValueError("radius of curvature k must be positive")
        object.__setattr__(self, "k", float(self.k))

    @classmethod
    def spherical(cls, n=3, k=1.0):
        return cls(n, SPHERICAL, k)

    @classmethod
    def flat(cls, n=3):
        return cls(n, FLAT, 1.0)

    @classmethod
    def hyperbolic(cls, n=3, k=1.0):
        return cls(n, HYPERBOLIC, k)

    @property
    def kind(self):
        return _KIND_NAMES[self.curv_sign]

    @property
    def curvature(self):
        return self.curv_sign / self.k**2

    @property
    def is_flat(self):
        return self.curv_sign == FLAT

    @property
    def base_point(self):
        p = np.zeros(self.n + 1)
        p[0] = 1.0
        return p

    @property
    def form_matrix(self):
        """Gram matrix J of the bilinear form, ``a(x, y) = x @ J @ y``."""
        diag = np.ones(self.n + 1)
        diag[0] = self.curv_sign * self.k**2
        return np.diag(diag)

    @property
    def scale_matrix(self):
        """D = diag(k, 1, ..., 1); D x is the point in orthonormal coordinates."""
        diag = np.ones(self.n + 1)
        if not self.is_flat:
            diag[0] = self.k
        return np.diag(diag)

    @property
    def tol(self):
        # invariant checks scale with the size of a(x, x)
        return EPS * max(1.0, self.k**2)

    def to_json(self):
        return {"kind": self.kind, "dim": self.n, "k": self.k}

    @classmethod
    def from_json(cls, obj):
        try:
            sign = _KIND_SIGNS[obj["kind"]]
        except KeyError as exc:
            raise ValueError(f"unknown space kind in {obj!r}") from exc
        return cls(int(obj["dim"]), sign, float(obj.get("k", 1.0)))


def _vec(space, x, name="vector"):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.n + 1:
        raise DimensionMismatchError(
            f"{name} has length {x.shape[-1]}, expected {space.n + 1}",
            expected=space.n + 1,
            got=int(x.shape[-1]),
        )
    return x


def bilinear_form(space, x, y):
    """Evaluate a(x, y); broadcasts over leading axes."""
    x = _vec(space, x)
    y = _vec(space, y)
    if space.is_flat:
        return np.sum(x[..., 1:] * y[..., 1:], axis=-1)
    return space.curv_sign * space.k**2 * (x[..., 0] * y[..., 0]) + np.sum(
        x[..., 1:] * y[..., 1:], axis=-1
    )


def is_point(space, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.n + 1:
        return False
    if space.is_flat:
        return bool(np.all(x[..., 0] == 1.0))
    # relative to the ambient size so that far hyperbolic points are not rejected
    scale = np.maximum(1.0, space.k**2 * x[..., 0] ** 2 + np.sum(x[..., 1:] ** 2, axis=-1))
    ok = np.abs(bilinear_form(space, x, x) - space.curv_sign * space.k**2) <= EPS * scale
    if space.curv_sign == HYPERBOLIC:
        ok &= x[..., 0] > 0
    return bool(np.all(ok))


def check_point(space, x, name="point"):
    x = _vec(space, x, name)
    if not is_point(space, x):
        raise OffQuadricError(f"{name} does not lie on the {space.kind} model", point=x)
    return x


def make_point(space, coords):
    """Build an ambient point from ambient coordinates or, for flat space, n coordinates."""
    coords = np.asarray(coords, dtype=float)
    if space.is_flat and coords.shape[-1] == space.n:
        coords = np.concatenate([np.ones(coords.shape[:-1] + (1,)), coords], axis=-1)
    return check_point(space, coords)


def project_to_model(space, x):
    """Rescale (curved) or re-pin (flat) x onto the model; removes rounding drift."""
    x = np.array(x, dtype=float)
    if space.is_flat:
        x[..., 0] = 1.0
        return x
    if space.curv_sign == HYPERBOLIC:
        # re-pin x0 from the spatial part; rescaling would cancel badly far out
        if np.any(x[..., 0] <= 0):
            raise OffQuadricError("cannot place a point of the lower sheet on the model", point=x)
        x[..., 0] = np.sqrt(space.k**2 + np.sum(x[..., 1:] ** 2, axis=-1)) / space.k
        return x
    q = bilinear_form(space, x, x) / (space.curv_sign * space.k**2)
    if np.any(q <= 0):
        raise OffQuadricError("cannot rescale onto the model", point=x)
    return x / np.sqrt(q)[..., None] if x.ndim > 1 else x / math.sqrt(q)


def _clamped(value, lo, hi, what):
    if np.any(value < lo - EPS) or np.any(value > hi + EPS):
        raise OffQuadricError(f"{what} argument out of range; points are not valid")
    return np.clip(value, lo, hi)


def distance(space, x, y):
    """Geodesic distance; broadcasts over leading axes."""
    x = _vec(space, x)
    y = _vec(space, y)
    if space.is_flat:
        return np.linalg.norm(x[..., 1:] - y[..., 1:], axis=-1)
    k2 = space.k**2
    if not (is_point(space, x) and is_point(space, y)):
        raise OffQuadricError(f"input does not lie on the {space.kind} model")
    c = bilinear_form(space, x, y) / (space.curv_sign * k2)
    if space.curv_sign == SPHERICAL:
        return space.k * np.arccos(_clamped(c, -1.0, 1.0, "arccos"))
    return space.k * np.arccosh(_clamped(c, 1.0, np.inf, "arccosh"))


def tangent_project(space, p, v):
    """Component of v tangent to the model at p."""
    p = _vec(space, p)
    v = np.array(_vec(space, v), dtype=float)
    if space.is_flat:
        v[..., 0] = 0.0
        return v
    return v - (bilinear_form(space, p, v) / bilinear_form(space, p, p))[..., None] * p


def tangent_norm(space, v):
    n2 = bilinear_form(space, v, v)
    return np.sqrt(np.maximum(n2, 0.0))


def geodesic_point(space, p, v, t):
    """Point at arclength t along the geodesic leaving p in direction v.

    ``v`` is rescaled to unit speed; it must be tangent at ``p``.
    """
    p = check_point(space, p)
    v = _vec(space, v, "tangent")
    if space.is_flat:
        if abs(v[0]) > EPS:
            raise DegenerateError("flat tangent vectors must have v0 = 0")
    elif abs(bilinear_form(space, p, v)) > space.tol * max(1.0, np.linalg.norm(p)) * max(1.0, np.linalg.norm(v)):
        raise DegenerateError("vector is not tangent at p")
    norm = float(tangent_norm(space, v))
    if norm == 0.0:
        raise DegenerateError("zero tangent vector")
    v = v / norm
    k = space.k
    if space.is_flat:
        return p + t * v
    if space.curv_sign == SPHERICAL:
        out = math.cos(t / k) * p + k * math.sin(t / k) * v
    else:
        out = math.cosh(t / k) * p + k * math.sinh(t / k) * v
    return project_to_model(space, out)


def initial_direction(space, p, q):
    """Unit tangent at p of the minimizing geodesic towards q.

    Raises DegenerateError when the direction is undefined (q == p, or q
    antipodal to p on the sphere).
    """
    p = _vec(space, p)
    q = _vec(space, q)
    w = tangent_project(space, p, q) if not space.is_flat else np.concatenate([[0.0], q[1:] - p[1:]])
    n = float(tangent_norm(space, w))
    if n <= EPS * max(1.0, space.k):
        raise DegenerateError("direction undefined: coincident or antipodal points")
    return w / n


def tangent_frame(space, p):
    """Orthonormal basis (rows) of the tangent space at p.

    Gram-Schmidt under the form, fed with the coordinate axes e1..en, e0 in
    that order and projected to the tangent space.
    """
    p = check_point(space, p)
    frame = []
    order = list(range(1, space.n + 1)) + [0]
    for idx in order:
        e = np.zeros(space.n + 1)
        e[idx] = 1.0
        v = tangent_project(space, p, e)
        for f in frame:
            v = v - bilinear_form(space, v, f) * f
        n = float(tangent_norm(space, v))
        if n > 1e-6:
            frame.append(v / n)
        if len(frame) == space.n:
            break
    return np.array(frame)


def weierstrass_chart(space, P):
    """Form-preserving transformation taking P to the base point.

    Curved spaces get a rotation (boost, for hyperbolic space) in the plane of
    P and the base point, so the result is orientation preserving.
    """
    from .isometry_groups import Isometry

    P = check_point(space, P)
    n1 = space.n + 1
    if space.is_flat:
        A = np.eye(n1)
        A[1:, 0] = -P[1:]
        return Isometry(space, A)
    D = space.scale_matrix
    Dinv = np.diag(1.0 / np.diag(D))
    y = D @ P / space.k  # unit vector (sphere) or unit timelike vector
    e0 = np.zeros(n1)
    e0[0] = 1.0
    rest = y[1:]
    rn = np.linalg.norm(rest)
    if rn < 1e-15:
        if y[0] > 0:
            return Isometry(space, np.eye(n1))
        # antipode of the base: rotate by pi in the (e0, e1) plane
        u = np.zeros(n1)
        u[1] = 1.0
        c, s = -1.0, 0.0
    else:
        u = np.concatenate([[0.0], rest / rn])
        c, s = y[0], rn
    # R maps c e0 + s u  ->  e0
    R = np.eye(n1)
    E = np.outer(e0, e0) + np.outer(u, u)
    if space.curv_sign == SPHERICAL:
        R = R + (c - 1.0) * E + s * (np.outer(e0, u) - np.outer(u, e0))
    else:
        # boost with cosh = c, sinh = s
        R = R + (c - 1.0) * E - s * (np.outer(e0, u) + np.outer(u, e0))
    return Isometry(space, Dinv @ R @ D)


def ball_volume(space, r):
    """Volume of a geodesic ball of radius r (three-dimensional models only)."""
    if space.n != 3:
        raise UnsupportedError("ball volumes are implemented for n = 3 only", dim=space.n)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    k = space.k
    if space.is_flat:
        return 4.0 / 3.0 * math.pi * r**3
    if space.curv_sign == SPHERICAL:
        if r > math.pi * k + EPS:
            raise ValueError("radius exceeds the diameter of the sphere")
        r = min(r, math.pi * k)
        return 2.0 * math.pi * k**2 * r - math.pi * k**3 * math.sin(2.0 * r / k)
    return math.pi * k**3 * math.sinh(2.0 * r / k) - 2.0 * math.pi * k**2 * r


def sphere_area(space, d):
    """Area of the geodesic sphere of radius d (an (n-1)-sphere)."""
    n = space.n
    omega = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    k = space.k
    if space.is_flat:
        rho = d
    elif space.curv_sign == SPHERICAL:
        rho = k * math.sin(d / k)
    else:
        rho = k * math.sinh(d / k)
    return omega * rho ** (n - 1)


def parallax(space, b, d):
    """Observed parallax of a star at distance d seen across a baseline b.

    The baseline leaves the observer perpendicular to the line of sight.  The
    parallax is what an astronomer infers from the two sight lines, namely
    ``pi - A - B`` with A = pi/2 the angle at the observer and B the angle at
    the far end of the baseline.  In flat space this is the angle subtended
    at the star; hyperbolic space adds the angle defect, so the parallax of
    arbitrarily distant stars stays above ``arctan(sinh(b/k))``.
    """
    if not 0 < b < d:
        raise DegenerateError("parallax needs 0 < baseline < distance")
    k = space.k
    if space.is_flat:
        return math.atan2(b, d)
    if space.curv_sign == SPHERICAL:
        if d >= math.pi * k / 2:
            raise DegenerateError("spherical parallax needs d < pi k / 2")
        return math.atan2(math.sin(b / k) * math.cos(d / k), math.sin(d / k))
    return math.atan2(math.sinh(b / k), math.tanh(d / k))


def star_angle(space, b, d):
    """Angle subtended by the baseline at the star (same right triangle)."""
    if not 0 < b < d:
        raise DegenerateError("needs 0 < baseline < distance")
    k = space.k
    if space.is_flat:
        return math.atan2(b, d)
    if space.curv_sign == SPHERICAL:
        return math.atan2(math.tan(b / k), math.sin(d / k))
    return math.atan2(math.tanh(b / k), math.sinh(d / k))


def parallax_floor(b, k):
    """Limit of the hyperbolic parallax as the star recedes to infinity."""
    return math.atan(math.sinh(b / k))
