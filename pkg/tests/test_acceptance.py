"""Acceptance criteria 1-14, each at its stated tolerance.

Every criterion records one PASS/FAIL line; the lines are printed in the
pytest terminal summary (and to stdout when run with -s).
"""

import itertools
import math
import time

import numpy as np
import pytest

from spaceform import quaternion as quat
from spaceform.cli import main as cli_main
from spaceform.clifford_hopf import CliffordSurface, gauss_curvature, hopf_fiber, linking_number, round_sphere
from spaceform.cosmos import (
    Star,
    StarCatalog,
    curvature_radius_bound,
    enumerate_images,
    gravitational_field,
    volume_bound_check,
)
from spaceform.errors import SpaceFormViolation
from spaceform.isometry_groups import (
    DiscreteGroup,
    Isometry,
    antipodal_group,
    cubic_lattice,
    cyclic,
    finite_spherical_group,
    has_fixed_point,
    identity,
    left_twist,
    orthogonal,
    right_twist,
)
from spaceform.model_spaces import ModelSpace, distance, geodesic_point, parallax, parallax_floor, tangent_project
from spaceform.quotients import (
    deck_transformation,
    lift_path,
    monte_carlo_volume,
    project,
    quotient_distance,
    reduce,
    suggest_r,
    verify_space_form,
    volume,
)

from cli_scenarios import SCENARIOS
from conftest import random_points

pytestmark = pytest.mark.acceptance

RESULTS = []

S3 = ModelSpace.spherical(3)
S2 = ModelSpace.spherical(2)
R3 = ModelSpace.flat(3)


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def p3(*c):
    return np.array([1.0, *c])


def unit_quaternion(rng):
    q = rng.standard_normal(4)
    return q / np.linalg.norm(q)


def unit_imaginary(rng):
    v = rng.standard_normal(3)
    return np.concatenate([[0.0], v / np.linalg.norm(v)])


@pytest.fixture(scope="module")
def torus():
    G = cubic_lattice(3)
    return verify_space_form(R3, G, 1.0)


@pytest.fixture(scope="module")
def elliptic():
    return verify_space_form(S3, antipodal_group(S3), math.pi)


def test_01_clifford_flatness():
    surf = CliffordSurface(quat.ONE, quat.I, quat.J)
    S, T, _ = surf.grid(32)
    kmax = float(np.max(np.abs(gauss_curvature(surf, S, T))))
    theta = np.linspace(0.3, math.pi - 0.3, 16)
    TH, PH = np.meshgrid(theta, np.linspace(0, 2 * math.pi, 16), indexing="ij")
    control = float(np.max(np.abs(gauss_curvature(round_sphere, TH, PH) - 1.0)))
    record(1, "Clifford flatness", kmax <= 1e-6 and control <= 1e-4, f"max|K|={kmax:.2e}, sphere |K-1|={control:.2e}")


def test_02_torus_identification():
    surf = CliffordSurface(quat.ONE, quat.I, quat.J)
    S, T, X = surf.grid(16)
    err = max(
        float(np.max(np.abs(surf(S + 2 * math.pi, T) - X))),
        float(np.max(np.abs(surf(S, T + 2 * math.pi) - X))),
    )
    record(2, "torus identification", err <= 1e-12, f"max periodicity error={err:.2e}")


def test_03_twist_commutation():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        u, v = unit_imaginary(rng), unit_imaginary(rng)
        s, t = rng.uniform(-math.pi, math.pi, 2)
        L = left_twist(quat.unit_exp(u, s))
        R = right_twist(quat.unit_exp(v, t))
        worst = max(worst, float(np.max(np.abs((L @ R).matrix - (R @ L).matrix))))
    record(3, "twist commutation", worst <= 1e-12, f"max difference={worst:.2e}")


def test_04_constant_displacement():
    rng = np.random.default_rng(4)
    worst_std = worst_mean = 0.0
    for _ in range(20):
        q = unit_quaternion(rng)
        x = random_points(S3, rng, 100)
        d = distance(S3, x, left_twist(q)(x))
        worst_std = max(worst_std, float(np.std(d)))
        worst_mean = max(worst_mean, abs(float(np.mean(d)) - math.acos(min(1.0, max(-1.0, q[0])))))
    ok = worst_std <= 1e-10 and worst_mean <= 1e-10
    record(4, "constant displacement", ok, f"max stdev={worst_std:.2e}, max mean error={worst_mean:.2e}")


def test_05_quotient_oracle(torus):
    rng = np.random.default_rng(5)
    window = np.array(list(itertools.product(range(-3, 4), repeat=3)), dtype=float)
    x = random_points(R3, rng, 1000, spread=1.0)
    y = random_points(R3, rng, 1000, spread=1.0)
    worst = 0.0
    for a, b in zip(x, y):
        brute = float(np.min(np.linalg.norm(b[1:] + window - a[1:], axis=1)))
        worst = max(worst, abs(quotient_distance(torus, a, b) - brute))
    z = random_points(R3, rng, 1000, spread=1.0)
    violations = sum(
        quotient_distance(torus, a, c) > quotient_distance(torus, a, b) + quotient_distance(torus, b, c) + 1e-12
        for a, b, c in zip(x, y, z)
    )
    record(5, "quotient oracle", worst <= 1e-12 and violations == 0, f"max error={worst:.2e}, triangle violations={violations}")


def _short_path(space, rng, steps=30, step=0.05):
    pts = [random_points(space, rng, 1)[0]]
    for _ in range(steps):
        v = tangent_project(space, pts[-1], rng.standard_normal(space.n + 1))
        pts.append(geodesic_point(space, pts[-1], v, step))
    return pts


def test_06_covering_round_trip(torus, elliptic):
    rng = np.random.default_rng(6)
    worst = 0.0
    for form in (torus, elliptic):
        for _ in range(100):
            walk = _short_path(form.space, rng)
            quotient = [project(form, p) for p in walk]
            lifted = lift_path(form, quotient, walk[0])
            back = [project(form, p).rep for p in lifted]
            worst = max(worst, max(float(np.max(np.abs(a - b.rep))) for a, b in zip(back, quotient)))
    loop = [reduce(torus, p3(t, 0, 0)) for t in np.linspace(0, 1, 21)]
    lifted = lift_path(torus, loop, p3(0, 0, 0))
    g = deck_transformation(torus, lifted[0], lifted[-1])
    e1 = g is not None and np.allclose(g.translation, [1, 0, 0]) and np.allclose(g.linear, np.eye(3))
    record(6, "covering round trip", worst <= 1e-9 and e1, f"max lift/project error={worst:.2e}, unit loop deck=e1: {e1}")


def test_07_space_form_inventory():
    start = time.perf_counter()
    groups = [("cyclic", m, m) for m in range(1, 13)] + [("binary_dihedral", m, 4 * m) for m in range(1, 7)]
    groups += [("2T", None, 24), ("2O", None, 48), ("2I", None, 120)]
    bad = []
    for kind, m, order in groups:
        G = finite_spherical_group(kind, m)
        if G.order != order:
            bad.append(f"{kind}:{m} order {G.order}")
            continue
        r = suggest_r(G) if order > 1 else 1.0
        try:
            verify_space_form(S3, G, r)
        except SpaceFormViolation as exc:
            bad.append(f"{kind}:{m} {exc.reason}")
    elapsed = time.perf_counter() - start
    record(7, "spherical space-form inventory", not bad and elapsed <= 60, f"{len(groups)} groups, {elapsed:.1f}s, failures={bad}")


def _random_rotation(rng):
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def test_08_even_dimension_obstruction():
    rng = np.random.default_rng(8)
    all_fixed = True
    accepted = []
    for trial in range(50):
        m = int(rng.integers(2, 9))
        axis_frame = _random_rotation(rng)
        c, s = math.cos(2 * math.pi / m), math.sin(2 * math.pi / m)
        rot = axis_frame @ np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]) @ axis_frame.T
        gens = [orthogonal(S2, rot)]
        if trial % 2:
            gens.append(Isometry(S2, -np.eye(3)))
        G = DiscreteGroup(S2, gens)
        # the fixed-point claim concerns rotations; groups with -I only feed the rejection check
        for el in G.elements():
            if not el.is_identity and el.orientation == 1 and not has_fixed_point(el):
                all_fixed = False
        try:
            verify_space_form(S2, G, 1e-3)
            accepted.append(trial)
        except SpaceFormViolation:
            pass
    minus = Isometry(S2, -np.eye(3))
    trivial_ok = verify_space_form(S2, DiscreteGroup(S2, [identity(S2)]), 1.0) is not None
    antipodal_ok = verify_space_form(S2, cyclic(minus), math.pi) is not None
    ok = all_fixed and not accepted and not has_fixed_point(minus) and trivial_ok and antipodal_ok
    detail = f"rotations fixed: {all_fixed}, 50 subgroups rejected: {not accepted}, -I free: {not has_fixed_point(minus)}, {{I}} and {{+-I}} accepted: {trivial_ok and antipodal_ok}"
    record(8, "even-dimension obstruction", ok, detail)


def test_09_hopf_linking():
    rng = np.random.default_rng(9)
    values, residuals = [], []
    for _ in range(5):
        b = rng.standard_normal((2, 3))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        res = linking_number(hopf_fiber(b[0]), hopf_fiber(b[1]), N=512)
        values.append(res.value)
        residuals.append(res.residual)
    f1, f2 = hopf_fiber([1.0, 0, 0]), hopf_fiber([0.0, 0.6, 0.8])
    trend = [linking_number(f1, f2, N=n).residual for n in (256, 512, 1024)]
    decreasing = trend[0] > trend[1] > trend[2]
    t = 2 * math.pi * np.arange(256) / 256
    eps = 0.2
    c1 = np.stack([np.sqrt(1 - eps**2) + 0 * t, eps * np.cos(t), eps * np.sin(t), 0 * t], 1)
    c2 = np.stack([0 * t, eps * np.cos(t), np.sqrt(1 - eps**2) + 0 * t, eps * np.sin(t)], 1)
    control = linking_number(c1, c2).value
    ok = all(v == 1 for v in values) and max(residuals) < 0.05 and decreasing and control == 0
    record(9, "Hopf linking", ok, f"values={values}, max residual={max(residuals):.2e}, trend={[f'{r:.1e}' for r in trend]}, control={control}")


def test_10_ghost_images(torus):
    cat = StarCatalog((Star("a", p3(0.5, 0, 0), 1.0),))
    images = enumerate_images(torus, p3(0, 0, 0), cat, 1.6)
    brute = sorted(
        d
        for m in itertools.product(range(-5, 6), repeat=3)
        if (d := math.dist((0, 0, 0), (0.5 + m[0], m[1], m[2]))) <= 1.6
    )
    dists = [im.dist for im in images]
    match = len(dists) == len(brute) == 20 and np.allclose(dists, brute, atol=1e-12)
    groups = {0.5: 0, math.sqrt(1.25): 0, 1.5: 0}
    for d in dists:
        for key in groups:
            if abs(d - key) <= 1e-12:
                groups[key] += 1
    ok = match and list(groups.values()) == [2, 8, 10]
    record(10, "ghost images", ok, f"{len(dists)} images, multiplicities={list(groups.values())}")


def test_11_volume_criterion(torus, elliptic):
    start = time.perf_counter()
    G = finite_spherical_group("2I")
    ico = verify_space_form(S3, G, suggest_r(G))
    errs = []
    for form in (elliptic, ico):
        est = monte_carlo_volume(form, samples=1_000_000, seed=11)
        errs.append(abs(est - volume(form)) / volume(form))
    elapsed = time.perf_counter() - start
    checks = [
        volume_bound_check(torus, 0.3)[0] is True,
        volume_bound_check(torus, 1.0)[0] is False,
        volume_bound_check(ico, 0.5)[0] is False,
    ]
    closed = [1.0 > 4 * math.pi * 0.3**3 / 3, 1.0 > 4 * math.pi / 3, 2 * math.pi**2 / 120 > math.pi - math.pi * math.sin(1.0)]
    ok = max(errs) < 0.01 and elapsed <= 60 and all(checks) and closed == [True, False, False]
    record(11, "volume criterion", ok, f"relative errors={[f'{e:.1e}' for e in errs]}, {elapsed:.1f}s, bound checks={checks}")


def _bisect_k(p_min, b):
    lo, hi = math.log(b * 1e-3), math.log(b * 1e12)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        k = math.exp(mid)
        if parallax(ModelSpace.hyperbolic(3, k), b, 1000 * k) > p_min:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def test_12_parallax_limits():
    flat = parallax(R3, 0.01, 1.0)
    limits = [abs(parallax(make(3, 1e6), 0.01, 1.0) - flat) / flat for make in (ModelSpace.spherical, ModelSpace.hyperbolic)]
    floor_positive = parallax_floor(1.0, 5.0) > 0
    mismatch = []
    bounds = []
    for p in (1e-3, 1e-4, 1e-5):
        ell, hyp = curvature_radius_bound(p, 1.0)
        bounds.append((ell, hyp))
        mismatch.append(abs(_bisect_k(p, 1.0) - hyp) / hyp)
    monotone = all(a[0] < b[0] and a[1] < b[1] for a, b in zip(bounds, bounds[1:]))
    ok = max(limits) <= 1e-6 and floor_positive and max(mismatch) <= 1e-6 and monotone
    record(12, "parallax limits", ok, f"Euclidean limit={max(limits):.1e}, bisection mismatch={max(mismatch):.1e}, monotone={monotone}")


def test_13_gravity_anisotropy(torus):
    def magnitude(test):
        return float(np.linalg.norm(gravitational_field(torus, p3(0, 0, 0), 1.0, test, 8.0).force))

    diag = p3(*(np.ones(3) * 0.25 / math.sqrt(3)))
    rel = abs(magnitude(p3(0.25, 0, 0)) - magnitude(diag)) / magnitude(p3(0.25, 0, 0))
    rel_again = abs(magnitude(p3(0.25, 0, 0)) - magnitude(diag)) / magnitude(p3(0.25, 0, 0))
    plus = gravitational_field(torus, p3(0, 0, 0), 1.0, p3(0.25, 0, 0), 8.0).force
    minus = gravitational_field(torus, p3(0, 0, 0), 1.0, p3(-0.25, 0, 0), 8.0).force
    mirror = float(np.max(np.abs(minus - plus * np.array([-1, 1, 1]))))
    ok = rel > 0 and rel == rel_again and mirror <= 1e-9
    record(13, "gravity anisotropy", ok, f"relative difference={rel:.6e}, mirror error={mirror:.1e}")


def test_14_cli_determinism(capsys):
    differing = []
    for name, argv in sorted(SCENARIOS.items()):
        outputs = []
        for threads in ("1", "1", "4"):
            code = cli_main(argv + ["--threads", threads])
            out, _ = capsys.readouterr()
            outputs.append((code, out))
        if not (outputs[0] == outputs[1] == outputs[2] and outputs[0][0] == 0):
            differing.append(name)
    record(14, "CLI determinism", not differing, f"{len(SCENARIOS)} subcommands, differing={differing}")
