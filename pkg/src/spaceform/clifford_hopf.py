"""Clifford parallels, the flat Clifford torus and the Hopf fibration of S^3.

Points of S^3 are unit quaternions ``[w, x, y, z]``; the ambient metric is the
Euclidean one of R^4 (the unit sphere, k = 1).
"""

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np

from . import quaternion as quat
from .errors import DegenerateError, NonIntersectingLinesError

EPS = 1e-9


@dataclass(frozen=True)
class GeodesicLine:
    """Great circle ``cos(s) point + sin(s) direction``."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        p = quat.qnormalize(self.point)
        d = np.asarray(self.direction, dtype=float)
        d = d - np.dot(d, p) * p
        if np.linalg.norm(d) < EPS:
            raise DegenerateError("direction must not be parallel to the point")
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "direction", d / np.linalg.norm(d))

    def at(self, s):
        s = np.asarray(s, dtype=float)
        return np.cos(s)[..., None] * self.point + np.sin(s)[..., None] * self.direction


def distance_to_line(x, line):
    """Spherical distance from x to the great circle ``line``."""
    x = np.asarray(x, dtype=float)
    c = np.hypot(x @ line.point, x @ line.direction)
    return np.arccos(np.clip(c, -1.0, 1.0))


@dataclass(frozen=True)
class ParallelFamily:
    """One-parameter twist group exp(s u) x (left) or x exp(s u) (right)."""

    side: str
    generator: np.ndarray

    def apply(self, s, x):
        e = quat.unit_exp(self.generator, s)
        return quat.qmul(e, x) if self.side == "left" else quat.qmul(x, e)

    def orbit(self, x, samples=64):
        s = 2.0 * math.pi * np.arange(samples) / samples
        return self.apply(s, np.broadcast_to(x, (samples, 4)))

    def line_through(self, x):
        """The invariant great circle (Clifford parallel) through x."""
        x = quat.qnormalize(x)
        tangent = quat.qmul(self.generator, x) if self.side == "left" else quat.qmul(x, self.generator)
        return GeodesicLine(x, tangent)


def clifford_parallel_family(line, side="left"):
    """Twist family having ``line`` as an invariant line.

    The left generator is ``direction * conj(point)``, the right generator
    ``conj(point) * direction``; both are unit imaginary quaternions.
    """
    if side == "left":
        u = quat.qmul(line.direction, quat.qconj(line.point))
    elif side == "right":
        u = quat.qmul(quat.qconj(line.point), line.direction)
    else:
        raise ValueError("side must be 'left' or 'right'")
    u = np.array(u)
    u[0] = 0.0
    return ParallelFamily(side, u / np.linalg.norm(u))


@dataclass(frozen=True)
class CliffordSurface:
    """x(s, t) = exp(s u) x0 exp(t v)."""

    x0: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("u", "v"):
            q = np.asarray(getattr(self, name), dtype=float)
            if abs(q[0]) > EPS or abs(np.linalg.norm(q) - 1.0) > EPS:
                raise ValueError(f"{name} must be a unit imaginary quaternion")
            object.__setattr__(self, name, q)
        object.__setattr__(self, "x0", quat.qnormalize(self.x0))

    def __call__(self, s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        left = quat.unit_exp(self.u, s)
        right = quat.unit_exp(self.v, t)
        return quat.qmul(quat.qmul(left, self.x0), right)

    def grid(self, size):
        s = 2.0 * math.pi * np.arange(size) / size
        S, T = np.meshgrid(s, s, indexing="ij")
        return S, T, self(S, T)


def intersection(l1, l2, tol=1e-8):
    """Common point of two great circles (the one nearer ``l1.point``)."""
    M = np.column_stack([l1.point, l1.direction, -l2.point, -l2.direction])
    _, sv, vt = np.linalg.svd(M)
    if sv[-1] > tol:
        raise NonIntersectingLinesError("the two lines do not meet", gap=float(sv[-1]))
    a, b = vt[-1][:2]
    x = a * l1.point + b * l1.direction
    x = x / np.linalg.norm(x)
    if np.dot(x, l1.point) < 0:
        x = -x
    return x


def clifford_surface(l, l_prime):
    """Surface swept by the left parallels to l that meet l'."""
    x0 = intersection(l, l_prime)
    u = clifford_parallel_family(l, "left").generator
    v = clifford_parallel_family(l_prime, "right").generator
    return CliffordSurface(x0, u, v)


@dataclass(frozen=True)
class Metric:
    E: float
    F: float
    G: float

    @property
    def det(self):
        return self.E * self.G - self.F**2

    @property
    def degenerate(self):
        return abs(self.det) <= 1e-8 * max(1.0, self.E * self.G)


def _partials(surface, s, t, h):
    xs = (surface(s + h, t) - surface(s - h, t)) / (2.0 * h)
    xt = (surface(s, t + h) - surface(s, t - h)) / (2.0 * h)
    return xs, xt


def _efg(surface, s, t, h):
    xs, xt = _partials(surface, s, t, h)
    return (
        np.sum(xs * xs, axis=-1),
        np.sum(xs * xt, axis=-1),
        np.sum(xt * xt, axis=-1),
    )


def induced_metric(surface, s, t, h=1e-4):
    """First fundamental form from central differences of the parametrization.

    ``surface`` is any callable (s, t) -> ambient point with the Euclidean
    ambient metric.
    """
    if not 1e-6 <= h <= 1e-2:
        raise ValueError("step h must lie in [1e-6, 1e-2]")
    E, F, G = _efg(surface, s, t, h)
    return Metric(float(E), float(F), float(G))


# fourth-order central stencils
def _d1(f, x, H):
    return (-f(x + 2 * H) + 8 * f(x + H) - 8 * f(x - H) + f(x - 2 * H)) / (12.0 * H)


def _d2(f, x, H):
    return (-f(x + 2 * H) + 16 * f(x + H) - 30 * f(x) + 16 * f(x - H) - f(x - 2 * H)) / (12.0 * H**2)


def gauss_curvature(surface, s, t, h=1e-4, outer_step=1e-2):
    """Gaussian curvature by the Brioschi formula; vectorized over s and t.

    E, F, G come from central differences of the parametrization with step
    ``h``.  Their derivatives use fourth-order stencils on the coarser
    ``outer_step``: differencing the metric twice at step h would amplify
    rounding in E, F, G by 1/h^2.
    """
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))

    def comp(i):
        return lambda ss, tt: _efg(surface, ss, tt, h)[i]

    E_, F_, G_ = comp(0), comp(1), comp(2)
    E, F, G = E_(s, t), F_(s, t), G_(s, t)
    det = E * G - F**2
    if np.any(np.abs(det) <= 1e-8 * np.maximum(1.0, E * G)):
        raise DegenerateError("degenerate metric: the surface collapses to a curve")
    H = outer_step

    def ds(fn):
        return _d1(lambda x: fn(x, t), s, H)

    def dt(fn):
        return _d1(lambda y: fn(s, y), t, H)

    Es, Et = ds(E_), dt(E_)
    Fs, Ft = ds(F_), dt(F_)
    Gs, Gt = ds(G_), dt(G_)
    Ett = _d2(lambda y: E_(s, y), t, H)
    Gss = _d2(lambda x: G_(x, t), s, H)
    Fst = _d1(lambda x: _d1(lambda y: F_(x, y), t, H), s, H)
    zero = np.zeros_like(E)
    m1 = np.stack(
        [
            np.stack([-0.5 * Ett + Fst - 0.5 * Gss, 0.5 * Es, Fs - 0.5 * Et], -1),
            np.stack([Ft - 0.5 * Gs, E, F], -1),
            np.stack([0.5 * Gt, F, G], -1),
        ],
        -2,
    )
    m2 = np.stack(
        [
            np.stack([zero, 0.5 * Et, 0.5 * Gs], -1),
            np.stack([0.5 * Et, E, F], -1),
            np.stack([0.5 * Gs, F, G], -1),
        ],
        -2,
    )
    K = (np.linalg.det(m1) - np.linalg.det(m2)) / det**2
    return float(K) if K.ndim == 0 else K


def round_sphere(theta, phi):
    """Unit 2-sphere in R^3 by polar angles; the calibration surface for curvature."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    return np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )


# -- Hopf fibration ----------------------------------------------------------------


def hopf_map(q):
    """h(q) = conj(q) i q, returned as a unit 3-vector."""
    q = np.asarray(q, dtype=float)
    return quat.qmul(quat.qmul(quat.qconj(q), quat.I), q)[..., 1:]


def hopf_section(base):
    """A unit quaternion q0 with hopf_map(q0) == base."""
    b = np.asarray(base, dtype=float)
    b = b / np.linalg.norm(b)
    a = np.array([1.0, 0.0, 0.0])
    c = float(np.dot(a, b))
    if c < -1.0 + 1e-12:
        return quat.J.copy()
    # p rotates a onto b under x -> p x conj(p); q0 = conj(p)
    p = np.concatenate([[1.0 + c], np.cross(a, b)])
    p = p / np.linalg.norm(p)
    return quat.qconj(p)


@dataclass(frozen=True)
class HopfFiber:
    base: np.ndarray
    q0: np.ndarray
    samples: np.ndarray

    def at(self, theta):
        return quat.qmul(quat.unit_exp(quat.I, theta), self.q0)


def hopf_fiber(base, N=64):
    """Fiber over ``base``: the samples exp(theta i) q0, theta = 2 pi m / N."""
    base = np.asarray(base, dtype=float)
    if abs(np.linalg.norm(base) - 1.0) > EPS:
        raise ValueError("base must be a unit 3-vector")
    if N < 8:
        raise ValueError("need at least 8 samples")
    q0 = hopf_section(base)
    theta = 2.0 * math.pi * np.arange(N) / N
    samples = quat.qmul(quat.unit_exp(quat.I, theta), np.broadcast_to(q0, (N, 4)))
    return HopfFiber(base, q0, samples)


@dataclass(frozen=True)
class LinkingResult:
    value: int
    raw: float
    residual: float
    pole: np.ndarray


def _pole_candidates():
    # deterministic spread of points on S^3: the 8 axes, the 16 half-integer
    # points and a Fibonacci-style lattice
    axes = np.vstack([np.eye(4), -np.eye(4)])
    half = np.array(
        [[sa * 0.5, sb * 0.5, sc * 0.5, sd * 0.5] for sa in (1, -1) for sb in (1, -1) for sc in (1, -1) for sd in (1, -1)]
    )
    m = 2000
    idx = np.arange(m) + 0.5
    u1 = idx / m
    u2 = (idx * 0.6180339887498949) % 1.0
    u3 = (idx * 0.7548776662466927) % 1.0
    a, b = np.sqrt(1 - u1), np.sqrt(u1)
    lat = np.stack(
        [a * np.cos(2 * np.pi * u2), a * np.sin(2 * np.pi * u2), b * np.cos(2 * np.pi * u3), b * np.sin(2 * np.pi * u3)],
        axis=1,
    )
    return np.vstack([axes, half, lat])


def choose_pole(*curves):
    """Candidate point of S^3 farthest (in min distance) from all curve samples."""
    pts = np.vstack(curves)
    cand = _pole_candidates()
    closeness = np.max(cand @ pts.T, axis=1)
    return cand[int(np.argmin(closeness))]


def stereographic(x, pole):
    """Project S^3 minus ``pole`` to R^3 in the frame (pole i, pole k, pole j).

    The frame order fixes the orientation convention: with it, two Hopf
    fibers oriented by increasing theta link with +1.
    """
    x = np.asarray(x, dtype=float)
    frame = np.array([quat.qmul(pole, e) for e in (quat.I, quat.K, quat.J)])
    denom = 1.0 - x @ pole
    if np.any(denom < 1e-6):
        raise DegenerateError("curve passes too close to the projection pole")
    return (x @ frame.T) / denom[:, None]


def gauss_linking_sum(c1, c2, workers=1, chunk=256):
    """Discrete Gauss double sum for two closed polygons in R^3.

    Uses segment midpoints and chord vectors.  The sum is split into fixed
    chunks of c1 and reduced in chunk order, so the result does not depend on
    ``workers``.
    """
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    d1 = np.roll(c1, -1, axis=0) - c1
    d2 = np.roll(c2, -1, axis=0) - c2
    m1 = c1 + 0.5 * d1
    m2 = c2 + 0.5 * d2

    def part(start):
        a = m1[start : start + chunk]
        da = d1[start : start + chunk]
        r = a[:, None, :] - m2[None, :, :]
        cr = np.cross(da[:, None, :], d2[None, :, :])
        num = np.sum(r * cr, axis=-1)
        den = np.linalg.norm(r, axis=-1) ** 3
        return float(np.sum(num / den))

    starts = list(range(0, len(c1), chunk))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(part, starts))
    else:
        parts = [part(s) for s in starts]
    return math.fsum(parts) / (4.0 * math.pi)


def linking_number(f1, f2, N=512, workers=1):
    """Linking number of two disjoint closed curves on S^3.

    ``f1`` and ``f2`` are HopfFiber objects (resampled at N points, oriented
    by increasing theta) or arrays of curve samples on S^3.  Both are
    stereographically projected from a pole away from the curves and fed to
    the discrete Gauss sum; the result is rounded and the residual reported.
    """
    if isinstance(f1, HopfFiber) and isinstance(f2, HopfFiber):
        if np.linalg.norm(f1.base - f2.base) <= EPS:
            raise ValueError("linking number needs fibers over distinct base points")
    c1 = hopf_fiber(f1.base, N).samples if isinstance(f1, HopfFiber) else np.asarray(f1, dtype=float)
    c2 = hopf_fiber(f2.base, N).samples if isinstance(f2, HopfFiber) else np.asarray(f2, dtype=float)
    pole = choose_pole(c1, c2)
    raw = gauss_linking_sum(stereographic(c1, pole), stereographic(c2, pole), workers=workers)
    value = int(round(raw))
    return LinkingResult(value, raw, abs(raw - value), pole)
