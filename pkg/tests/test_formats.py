"""
Tests for the JSON documents, trace tables and field CSV tables.
"""
import json

import numpy as np
import pytest

from src.algebra.errors import FileFormatError
from src.algebra.funcalg import check_relations_field, circle_cutoff, hemisphere_clutch
from src.algebra.homotopy import rotation_flip_path, verify_path
from src.algebra.pairs import SoftPair, random_valid_pair
from src.algebra.spaces import circle_grid, sphere_grid
from src.algebra.universal import default_grid, generator_b
from src.storage import formats


def test_matrix_document_layout():
    doc = formats.matrix_to_doc(np.array([[1.0, 2.0 - 1.0j], [2.0 + 1.0j, 0.5]]))

    assert doc == {"n": 2, "entries": [1.0, 0.0, 2.0, -1.0, 2.0, 1.0, 0.5, 0.0]}
    assert np.array_equal(formats.matrix_from_doc(doc)[0, 1], 2.0 - 1.0j)


@pytest.mark.parametrize("value", [0.1, 1.0 / 3.0, 1.0 - 2.0 ** -53, 5e-324, -2.5e-17, 0.9999999999999999])
def test_floats_survive_at_full_precision(tmp_path, value):
    """Shortest-repr output and 17-significant-digit input both give back the same double."""
    path = tmp_path / "m.json"
    formats.write_document(path, formats.matrix_to_doc(np.array([[value]])))
    assert formats.read_matrix(path)[0, 0].real == value

    path.write_text(f'{{"entries": [{value:.17g}, 0.0], "n": 1}}\n')
    M = formats.read_matrix(path)
    assert M[0, 0].real == value
    assert formats.dumps(formats.matrix_to_doc(M)) == formats.dumps(formats.matrix_to_doc(np.array([[value]])))


def test_pair_file_keeps_bits_and_meta(tmp_path):
    """Reading a written pair gives back the same floats; rewriting gives the same bytes."""
    pair = random_valid_pair(4, 2, seed=5)
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"

    digest = formats.write_document(first, formats.pair_to_doc(pair))
    loaded = formats.read_pair(first)
    again = formats.write_document(second, formats.pair_to_doc(loaded))

    assert np.array_equal(loaded.a, pair.a) and np.array_equal(loaded.b, pair.b)
    assert loaded.meta == pair.meta
    assert digest == again
    assert first.read_bytes() == second.read_bytes()


def test_documents_use_sorted_keys(tmp_path):
    path = tmp_path / "pair.json"
    formats.write_document(path, formats.pair_to_doc(SoftPair([[1.0]], [[0.0]], {"seed": 1})))
    text = path.read_text()

    assert text.index('"a"') < text.index('"b"') < text.index('"meta"')
    assert json.loads(text)["meta"] == {"seed": 1}


@pytest.mark.parametrize("content", [
    "not json",
    '{"a": {"n": 1, "entries": [1.0, 0.0]}}',
    '{"a": {"n": 1, "entries": [1.0]}, "b": {"n": 1, "entries": [0.0, 0.0]}}',
    '{"a": {"n": 1, "entries": ["x", 0.0]}, "b": {"n": 1, "entries": [0.0, 0.0]}}',
    '{"a": {"n": -1, "entries": []}, "b": {"n": 1, "entries": [0.0, 0.0]}}',
    '{"a": {"n": 1, "entries": [1.0, 0.0]}, "b": {"n": 1, "entries": [0.0, 0.0]}, "meta": []}',
    "[]",
])
def test_malformed_pair_files(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(FileFormatError):
        formats.read_pair(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileFormatError):
        formats.read_pair(tmp_path / "absent.json")


def test_delement_document(tmp_path):
    element = generator_b(default_grid(11))
    path = tmp_path / "b.json"
    formats.write_document(path, formats.delement_to_doc(element))
    loaded = formats.read_delement(path)

    assert np.array_equal(loaded.grid, element.grid)
    assert np.array_equal(loaded.values, element.values)


def test_field_pair_document(tmp_path):
    fp = hemisphere_clutch(sphere_grid(4, 8))
    path = tmp_path / "clutch.json"
    formats.write_document(path, formats.field_pair_to_doc(fp))
    loaded = formats.read_field_pair(path)

    assert loaded.grid.kind == "sphere" and loaded.grid.resolution == (4, 8)
    assert np.array_equal(loaded.grid.region("K"), fp.grid.region("K"))
    assert np.array_equal(loaded.a.values, fp.a.values)
    assert np.array_equal(loaded.b.values, fp.b.values)


def test_malformed_field_pair(tmp_path):
    path = tmp_path / "field.json"
    path.write_text('{"grid": {"kind": "circle", "resolution": [4]}, "n": 1, "indices": [0, 1, 2, 3], "a": []}')
    with pytest.raises(FileFormatError):
        formats.read_field_pair(path)


def test_trace_table(diagonal_pair):
    report = verify_path(rotation_flip_path(diagonal_pair, steps=5))
    text = formats.trace_table(report)
    lines = text.splitlines()
    rows = formats.parse_trace_table(text)

    assert lines[0] == "t\tr1\tr2\tclass\tstep"
    assert len(lines) == 6
    assert [row[0] for row in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert {row[3] for row in rows} == {0}


def test_trace_table_not_available_class():
    text = "t\tr1\tr2\tclass\tstep\n0\t0\t0\tNA\t0\n"
    assert formats.parse_trace_table(text) == [(0.0, 0.0, 0.0, None, 0.0)]
    with pytest.raises(FileFormatError):
        formats.parse_trace_table("t\tr1\n")
    with pytest.raises(FileFormatError):
        formats.parse_trace_table("t\tr1\tr2\tclass\tstep\n0\t0\n")


def test_field_table():
    fp = circle_cutoff(circle_grid(6))
    table = formats.field_table(fp, check_relations_field(fp))
    lines = table.splitlines()

    assert lines[0] == "point,x,y,r1,r2,trace"
    assert len(lines) == 7
    assert lines[1].startswith("0,1,0,")
