from __future__ import annotations

import json
import math

import numpy as np
import pytest

from calderon_lab import io
from calderon_lab.calderon import boundary_ode_split
from calderon_lab.fixtures import FIXTURES, fixture_path, load_fixture, random_order3
from calderon_lab.symbols import build_cosphere_grid

SHIPPED = ["d0_boundary", "laplace", "laplace_torus", "order1_system", "order2_coupled",
           "order3_scalar", "order3_system", "random_order3_seed7", "scalar_first_order"]


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_fixtures_match_builders(name):
    op = load_fixture(name)
    ref = random_order3(7) if name == "random_order3_seed7" else FIXTURES[name]()
    assert op.m == ref.m and op.rank == ref.rank and op.geometry == ref.geometry
    grid = build_cosphere_grid(op.geometry, 3 if op.geometry == "flat_torus_2d" else 4)
    for p in grid.points:
        assert np.array_equal(op.coefficient_matrices(np.array(p.covector)),
                              ref.coefficient_matrices(np.array(p.covector)))


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trip(name):
    op = load_fixture(name)
    again = io.operator_from_json(json.loads(io.dumps(io.operator_to_json(op))))
    assert io.operator_to_json(again) == io.operator_to_json(op)


def test_load_operator_from_path():
    op = io.load_operator(str(fixture_path("laplace")))
    p = build_cosphere_grid("circle", 2).points[0]
    assert np.allclose(boundary_ode_split(op, p).p_plus, [[0.5, -0.5j], [0.5j, 0.5]])


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.pop("m"), "m"),
    (lambda d: d.__setitem__("m", "two"), "m"),
    (lambda d: d.__setitem__("geometry", "sphere"), "geometry"),
    (lambda d: d["coeffs"][0]["entries"][0].__setitem__("row", 5), "coeffs[0].entries[0].row"),
    (lambda d: d["coeffs"][2]["entries"][0]["monomials"][0].__setitem__("coef", 1.0),
     "coeffs[2].entries[0].monomials[0].coef"),
])
def test_schema_errors_name_the_field(mutate, field):
    d = json.loads(fixture_path("laplace").read_text())
    mutate(d)
    with pytest.raises(io.SchemaError) as exc:
        io.operator_from_json(d)
    assert exc.value.field.startswith(field.split(".")[0])
    assert field in str(exc.value)


def test_bad_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "m": 2,\n oops\n}')
    with pytest.raises(io.SchemaError) as exc:
        io.load_operator(p)
    assert "line 3" in str(exc.value)


def test_encode_and_dumps_are_deterministic():
    rep = {"b": np.array([1 + 2j, 3.0]), "a": math.inf, "c": np.float64(0.5), "d": (np.int64(3),)}
    s = io.dumps(rep)
    assert s == io.dumps(dict(reversed(list(rep.items()))))
    d = json.loads(s)
    assert d["b"] == [[1.0, 2.0], [3.0, 0.0]] and d["a"] == "inf" and d["d"] == [3]


def test_decode_matrix_accepts_reals_and_pairs():
    M = io.decode_matrix([[1, [0, 1]], [2.5, 0]])
    assert np.array_equal(M, np.array([[1, 1j], [2.5, 0]]))
    with pytest.raises(io.SchemaError):
        io.decode_matrix([[1, 2], [3]])
