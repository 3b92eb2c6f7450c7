"""JSON readers and writers for spaces, groups, space forms and catalogues.

Group file::

    {"kind": "finite" | "lattice" | "affine-flat",
     "generators": [...], "max_word_length": 20}

Each generator is a matrix (list of rows), a quaternion 4-array (left twist
of S^3), an object {"A": rotation, "b": translation} (flat), or, for
lattices, a translation vector of length n.  {"kind": "finite", "named": "2I"}
builds one of the standard finite quaternion groups.
"""

import json
from pathlib import Path

import numpy as np

from .isometry_groups import (
    DiscreteGroup,
    FINITE,
    Isometry,
    LATTICE,
    affine,
    finite_spherical_group,
    left_twist,
    translation,
)
from .model_spaces import ModelSpace, make_point
from .quotients import SpaceForm


def load_json(text_or_path):
    """Inline JSON when the argument starts with '{' or '[', else a file path."""
    text = str(text_or_path).strip()
    if text[:1] in "{[":
        return json.loads(text)
    return json.loads(Path(text).read_text())


def parse_point(space, value):
    if isinstance(value, str):
        value = [float(v) for v in value.split(",")]
    return make_point(space, np.asarray(value, dtype=float))


def _generator(space, kind, g):
    if isinstance(g, dict):
        return affine(space, g["A"], g["b"])
    arr = np.asarray(g, dtype=float)
    if arr.ndim == 2:
        return Isometry(space, arr)
    if kind == LATTICE or (space.is_flat and arr.shape == (space.n,)):
        return translation(space, arr)
    if arr.shape == (4,) and space.n == 3 and space.curv_sign == 1:
        return left_twist(arr, space)
    raise ValueError(f"cannot interpret generator {g!r}")


def group_from_json(obj, space):
    kind = obj.get("kind", FINITE)
    if "named" in obj:
        return finite_spherical_group(obj["named"], space=space, max_word_length=obj.get("max_word_length"))
    gens = [_generator(space, kind, g) for g in obj["generators"]]
    return DiscreteGroup(space, gens, kind, obj.get("max_word_length"), name=obj.get("name"))


def group_to_json(group):
    gens = []
    for g in group.generators:
        if group.kind == LATTICE:
            gens.append([float(v) for v in g.translation])
        else:
            gens.append([[float(v) for v in row] for row in g.matrix])
    out = {"kind": group.kind, "generators": gens, "max_word_length": group.max_word_length}
    if group.name:
        out["name"] = group.name
    return out


def form_from_json(obj):
    """SpaceForm from {"space", "group", "r", "base"}; the group action is verified."""
    from .quotients import verify_space_form

    space = ModelSpace.from_json(obj["space"])
    group = group_from_json(obj["group"], space)
    base = parse_point(space, obj["base"]) if "base" in obj else None
    return verify_space_form(space, group, float(obj["r"]), base)


def form_to_json(form):
    return {
        "space": form.space.to_json(),
        "group": group_to_json(form.group),
        "r": form.r,
        "base": [float(v) for v in form.base],
    }

