"""Quaternion arithmetic on plain numpy arrays.

A quaternion is an array ``[w, x, y, z]`` standing for ``w + x i + y j + z k``.
All functions broadcast over leading axes.
"""

import numpy as np

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])

_NAMED = {"1": ONE, "i": I, "j": J, "k": K}


def qmul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q):
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(q):
    return np.linalg.norm(q, axis=-1)


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    n = qnorm(q)
    if np.any(n == 0):
        raise ValueError("zero quaternion cannot be normalized")
    return q / n[..., None] if q.ndim > 1 else q / n


def qexp(v):
    """exp of a pure imaginary quaternion given as a 4-array (w ignored) or 3-vector."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == 4:
        v = v[..., 1:]
    theta = np.linalg.norm(v, axis=-1)
    # sin(theta)/theta, safe at 0
    sinc = np.sinc(theta / np.pi)
    return np.concatenate([np.cos(theta)[..., None], sinc[..., None] * v], axis=-1)


def unit_exp(u, s):
    """exp(s u) for a unit imaginary quaternion u, vectorized over s."""
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.cos(s)[..., None] * ONE + np.sin(s)[..., None] * u


def left_matrix(q):
    """4x4 matrix L with L @ x == qmul(q, x)."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def right_matrix(q):
    """4x4 matrix R with R @ x == qmul(x, q)."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ]
    )


def random_unit(rng, size=None):
    """Uniform samples on the unit 3-sphere."""
    shape = (4,) if size is None else (size, 4)
    q = rng.standard_normal(shape)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def parse(text):
    """Parse ``"i"``, ``"-j"``, ``"1"`` or ``"w,x,y,z"`` into a quaternion."""
    text = text.strip()
    sign = 1.0
    body = text
    if body[:1] in "+-" and body[1:] in _NAMED:
        sign = -1.0 if body[0] == "-" else 1.0
        body = body[1:]
    if body in _NAMED:
        return sign * _NAMED[body]
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"cannot parse quaternion {text!r}")
    return np.array(parts)
