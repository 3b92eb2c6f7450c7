"""Command line front end: ``spaceform <subcommand> ...``.

Exit status 0 on success, 1 on domain errors (reported as JSON on stderr),
2 on usage or parse errors.  Floats are printed in shortest round-trip form
so repeated runs produce identical bytes.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import cosmos, quaternion as quat
from .clifford_hopf import CliffordSurface, gauss_curvature, hopf_fiber, linking_number
from .errors import SpaceFormError
from .io import form_from_json, group_from_json, load_json, parse_point
from .isometry_groups import S3, as_quaternion, finite_spherical_group, to_orthonormal
from .model_spaces import ModelSpace, distance, geodesic_point, parallax
from .quotients import lift_path, monte_carlo_volume, quotient_distance, reduce, volume


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma separated numbers, got {text!r}") from exc


def _json_arg(text):
    try:
        return load_json(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {text!r}: {exc}") from exc


def _space(args):
    return ModelSpace.from_json(_json_arg(args.space))


def _form(args):
    return form_from_json(_json_arg(args.form))


def _num(x):
    x = float(x)
    if math.isinf(x) or math.isnan(x):
        return str(x)
    return x


def _vec(v):
    return [_num(c) for c in v]


# -- subcommands -------------------------------------------------------------------


def cmd_dist(args):
    space = _space(args)
    return _num(distance(space, parse_point(space, args.x), parse_point(space, args.y)))


def cmd_geodesic(args):
    space = _space(args)
    p = parse_point(space, args.p)
    v = np.asarray(_floats(args.v))
    if space.is_flat and len(v) == space.n:
        v = np.concatenate([[0.0], v])
    return _vec(geodesic_point(space, p, v, args.t))


def cmd_parallax(args):
    return _num(parallax(_space(args), args.baseline, args.dist))


def cmd_group_enumerate(args):
    if args.group:
        obj = _json_arg(args.group)
        space = ModelSpace.from_json(obj["space"]) if "space" in obj else S3
        group = group_from_json(obj.get("group", obj), space)
    elif args.kind:
        group = finite_spherical_group(args.kind)
    else:
        raise UsageError("give --kind or --group")
    elements = group.elements()
    twists = group.space == S3
    rows = []
    for el in elements:
        data = as_quaternion(el) if twists else to_orthonormal(el).ravel()
        rows.append((list(el.word), _vec(np.where(np.abs(data) < 1e-15, 0.0, data))))
    if args.format == "json":
        key = "quaternion" if twists else "matrix"
        return {"order": len(rows), "elements": [{"word": w, key: d} for w, d in rows]}
    lines = [str(len(rows))]
    lines += [",".join(repr(v) for v in d) for _, d in rows]
    return "\n".join(lines) + "\n"


def cmd_quotient_dist(args):
    form = _form(args)
    return _num(quotient_distance(form, parse_point(form.space, args.x), parse_point(form.space, args.y)))


def cmd_reduce(args):
    form = _form(args)
    return _vec(reduce(form, parse_point(form.space, args.x)).rep)


def cmd_lift(args):
    form = _form(args)
    raw = _json_arg(args.path) if args.path.strip()[:1] in "[{" else args.path.split(";")
    path = [reduce(form, parse_point(form.space, p)) for p in raw]
    start = parse_point(form.space, args.start)
    return [_vec(p) for p in lift_path(form, path, start)]


def cmd_volume(args):
    form = _form(args)
    out = {"volume": _num(volume(form))}
    if args.monte_carlo:
        out["monte_carlo"] = _num(monte_carlo_volume(form, args.monte_carlo, seed=args.seed))
    return out


def cmd_clifford_surface(args):
    surface = CliffordSurface(quat.parse(args.x0), quat.parse(args.u), quat.parse(args.v))
    S, T, X = surface.grid(args.grid)
    h = args.h
    xs = (surface(S + h, T) - surface(S - h, T)) / (2 * h)
    xt = (surface(S, T + h) - surface(S, T - h)) / (2 * h)
    E = np.sum(xs * xs, -1)
    F = np.sum(xs * xt, -1)
    G = np.sum(xt * xt, -1)
    K = gauss_curvature(surface, S, T, h)
    if args.format == "json":
        return [
            {"s": _num(s), "t": _num(t), "x": _vec(x), "E": _num(e), "F": _num(f), "G": _num(g), "K": _num(k)}
            for s, t, x, e, f, g, k in zip(S.ravel(), T.ravel(), X.reshape(-1, 4), E.ravel(), F.ravel(), G.ravel(), K.ravel())
        ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "t", "x0", "x1", "x2", "x3", "E", "F", "G", "K"])
    for s, t, x, e, f, g, k in zip(S.ravel(), T.ravel(), X.reshape(-1, 4), E.ravel(), F.ravel(), G.ravel(), K.ravel()):
        w.writerow([repr(float(v)) for v in (s, t, *x, e, f, g, k)])
    return buf.getvalue()


def cmd_hopf_link(args):
    b1 = np.asarray(_floats(args.base1))
    b2 = np.asarray(_floats(args.base2))
    b1 = b1 / np.linalg.norm(b1)
    b2 = b2 / np.linalg.norm(b2)
    res = linking_number(hopf_fiber(b1), hopf_fiber(b2), args.samples, workers=args.threads)
    if res.residual >= args.tol:
        raise SpaceFormError(
            f"linking residual {res.residual!r} exceeds tolerance {args.tol!r}",
            raw=res.raw,
        )
    if args.format == "csv":
        return f"{res.value}\n{res.residual!r}\n"
    return {"linking_number": res.value, "raw": _num(res.raw), "residual": _num(res.residual)}


def cmd_images(args):
    form = _form(args)
    catalog = cosmos.StarCatalog.from_json(_json_arg(args.catalog), form.space)
    observer = parse_point(form.space, args.observer)
    images = cosmos.enumerate_images(form, observer, catalog, args.horizon, workers=args.threads)
    out = []
    for im in images:
        d = im.to_json()
        d["dist"] = _num(d["dist"])
        d["flux"] = _num(d["flux"])
        out.append(d)
    return out


def cmd_gravity(args):
    form = _form(args)
    res = cosmos.gravitational_field(
        form,
        parse_point(form.space, args.source),
        args.mass,
        parse_point(form.space, args.test),
        args.cutoff,
    )
    return {
        "force": _vec(res.force),
        "magnitude": _num(np.linalg.norm(res.force)),
        "trace": [{"radius": _num(r), "partial": _vec(v)} for r, v in res.trace],
    }


def cmd_volume_check(args):
    ok, margin = cosmos.volume_bound_check(_form(args), args.radius)
    return {"pass": bool(ok), "margin": _num(margin)}


def cmd_parallax_bound(args):
    ell, hyp = cosmos.curvature_radius_bound(args.pmin, args.baseline)
    return {"elliptic_bound": _num(ell), "hyperbolic_bound": _num(hyp)}


# -- parser ------------------------------------------------------------------------


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--tol", type=float, default=0.05, help="acceptance tolerance for checks")
    p.add_argument("--threads", type=int, default=1)
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="spaceform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, subparsers=sub, fmt="json", **kw):
        p = subparsers.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func, default_format=fmt)
        return p

    p = add("dist", cmd_dist, help="geodesic distance")
    p.add_argument("--space", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = add("geodesic", cmd_geodesic, help="point along a geodesic")
    p.add_argument("--space", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--t", type=float, required=True)

    p = add("parallax", cmd_parallax, help="parallax of a star")
    p.add_argument("--space", required=True)
    p.add_argument("--baseline", type=float, required=True)
    p.add_argument("--dist", type=float, required=True)

    group = sub.add_parser("group", help="discrete groups")
    gsub = group.add_subparsers(dest="group_command", required=True)
    p = add("enumerate", cmd_group_enumerate, gsub, fmt="csv", help="list group elements")
    p.add_argument("--kind", help="2T, 2O, 2I, cyclic:m, binary_dihedral:m")
    p.add_argument("--group", help="group file (JSON, or inline)")

    for name, func in (("quotient-dist", cmd_quotient_dist), ("reduce", cmd_reduce)):
        p = add(name, func)
        p.add_argument("--form", required=True)
        p.add_argument("--x", required=True)
        if name == "quotient-dist":
            p.add_argument("--y", required=True)

    p = add("lift", cmd_lift, help="lift a path of quotient points")
    p.add_argument("--form", required=True)
    p.add_argument("--path", required=True, help="JSON array of points or 'a,b,c;d,e,f'")
    p.add_argument("--start", required=True)

    p = add("volume", cmd_volume)
    p.add_argument("--form", required=True)
    p.add_argument("--monte-carlo", type=int, default=0, help="also estimate with this many samples")

    p = add("clifford-surface", cmd_clifford_surface, fmt="csv")
    p.add_argument("--u", default="i")
    p.add_argument("--v", default="j")
    p.add_argument("--x0", default="1")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--h", type=float, default=1e-4)

    p = add("hopf-link", cmd_hopf_link)
    p.add_argument("--base1", required=True)
    p.add_argument("--base2", required=True)
    p.add_argument("--samples", type=int, default=512)

    cos = sub.add_parser("cosmos", help="observational tests")
    csub = cos.add_subparsers(dest="cosmos_command", required=True)
    p = add("images", cmd_images, csub)
    p.add_argument("--form", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--observer", required=True)
    p.add_argument("--horizon", type=float, required=True)

    p = add("gravity", cmd_gravity, csub)
    p.add_argument("--form", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--cutoff", type=float, default=8.0)
    p.add_argument("--mass", type=float, default=1.0)

    p = add("volume-check", cmd_volume_check, csub)
    p.add_argument("--form", required=True)
    p.add_argument("--radius", type=float, required=True)

    p = add("parallax-bound", cmd_parallax_bound, csub)
    p.add_argument("--pmin", type=float, required=True)
    p.add_argument("--baseline", type=float, default=1.0)
    return parser


def _render(result, fmt):
    if isinstance(result, str):
        return result
    if fmt == "csv":
        if isinstance(result, dict):
            return "".join(f"{k},{json.dumps(v)}\n" for k, v in result.items())
        if isinstance(result, list) and result and isinstance(result[0], list):
            return "".join(",".join(repr(v) for v in row) + "\n" for row in result)
    return json.dumps(result) + "\n"


def _join_negative_values(argv):
    # argparse reads "-1,0,0" as an option; bind it to the preceding flag
    out = []
    for tok in argv:
        if (
            out
            and out[-1].startswith("--")
            and "=" not in out[-1]
            and len(tok) > 1
            and tok[0] == "-"
            and (tok[1].isdigit() or tok[1] == ".")
        ):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    if args.format is None:
        args.format = args.default_format
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"spaceform: error: {exc}", file=sys.stderr)
        return 2
    except (SpaceFormError, ValueError) as exc:
        payload = exc.to_dict() if isinstance(exc, SpaceFormError) else {"error": "domain_error", "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1
    text = _render(result, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
