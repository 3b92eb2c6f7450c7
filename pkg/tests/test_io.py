import json
import math

import numpy as np
import pytest

from spaceform.io import form_from_json, form_to_json, group_from_json, load_json, parse_point
from spaceform.isometry_groups import LATTICE
from spaceform.model_spaces import ModelSpace
from spaceform.quotients import quotient_distance

from cli_scenarios import ELLIPTIC, ICOSAHEDRAL, TORUS


@pytest.mark.parametrize("text", [TORUS, ELLIPTIC, ICOSAHEDRAL])
def test_form_round_trip(text):
    form = form_from_json(json.loads(text))
    again = form_from_json(json.loads(json.dumps(form_to_json(form))))
    assert again.space == form.space
    assert again.group.kind == form.group.kind
    assert again.r == form.r
    assert np.array_equal(again.base, form.base)
    x = again.space.base_point
    assert quotient_distance(again, x, x) == pytest.approx(0.0, abs=1e-7)


def test_load_json_inline_and_path(tmp_path):
    f = tmp_path / "a.json"
    f.write_text('{"a": 1}')
    assert load_json(str(f)) == {"a": 1}
    assert load_json('{"a": 1}') == {"a": 1}
    assert load_json("[1, 2]") == [1, 2]


def test_parse_point_flat_shorthand():
    assert np.array_equal(parse_point(ModelSpace.flat(3), "1,2,3"), [1.0, 1.0, 2.0, 3.0])


def test_quaternion_generators_are_left_twists():
    G = group_from_json({"kind": "finite", "generators": [[0, 1, 0, 0]]}, ModelSpace.spherical(3))
    assert G.order == 4


def test_lattice_vectors():
    G = group_from_json({"kind": "lattice", "generators": [[2, 0, 0]], "max_word_length": 3}, ModelSpace.flat(3))
    assert G.kind == LATTICE
    assert np.allclose(G.lattice_basis[:, 0], [2, 0, 0])
    assert math.isinf(G.order)
