from __future__ import annotations

import json

import pytest

from conftest import octahedron
from involcode.atlas import (
    FORMAT_TAG,
    SphereSuspensionEntry,
    TorusConjugationEntry,
    dump_triangulation,
    load_triangulation,
    parse_triangulation,
    serialize_triangulation,
    sphere_suspension,
    torus_conjugation,
)
from involcode.codes import are_equivalent, known_code
from involcode.equivariant import extract_code, regularize
from involcode.errors import (
    InputError,
    MalformedFacetError,
    NotAnInvolutionError,
    TriangulationFormatError,
)
from involcode.service import AtlasRegistry
from involcode.simplicial import validate_closed_3manifold


def document(**overrides):
    c, tau = sphere_suspension()
    doc = json.loads(serialize_triangulation(c, tau))
    doc.update(overrides)
    return json.dumps(doc)


def test_sphere_suspension_counts():
    c, tau = sphere_suspension()
    assert c.f_vector() == [8, 24, 32, 16]
    assert tau.vertex_perm == (1, 0, 3, 2, 5, 4, 6, 7)
    assert validate_closed_3manifold(c).ok


def test_torus_counts():
    c, tau = torus_conjugation(4)
    assert c.f_vector()[0] == 64
    assert c.count(3) == 6 * 64
    assert validate_closed_3manifold(c).ok
    assert sum(tau.fixes(v) for v in c.vertices) == 8


@pytest.mark.parametrize("m", [2, 3, 5])
def test_torus_rejects_bad_resolutions(m):
    with pytest.raises(InputError, match="even and at least 4"):
        torus_conjugation(m)


@pytest.mark.slow
def test_finer_torus_gives_the_same_code():
    em = regularize(*torus_conjugation(6))
    assert em.k == 8
    assert are_equivalent(known_code("extended_hamming8"), extract_code(em)) is not None


def test_serialized_form():
    c, tau = sphere_suspension()
    text = serialize_triangulation(c, tau)
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["format"] == FORMAT_TAG
    assert doc["num_vertices"] == 8
    assert doc["tetrahedra"][0] == [0, 2, 4, 6]
    assert doc["involution"] == [1, 0, 3, 2, 5, 4, 6, 7]


def test_serialization_is_deterministic():
    assert serialize_triangulation(*torus_conjugation(4)) == serialize_triangulation(*torus_conjugation(4))


def test_round_trip_through_a_file(tmp_path):
    c, tau = torus_conjugation(4)
    path = dump_triangulation(c, tau, tmp_path / "torus.json")
    assert path.exists()
    assert not (tmp_path / "torus.json.tmp").exists()
    loaded_c, loaded_tau = load_triangulation(path)
    assert loaded_c == c
    assert loaded_tau == tau


def test_only_3_complexes_are_written():
    c = octahedron()
    with pytest.raises(InputError, match="only 3-dimensional"):
        serialize_triangulation(c, None)


def test_truncated_json_reports_position():
    text = serialize_triangulation(*sphere_suspension())[:40]
    with pytest.raises(TriangulationFormatError, match="invalid JSON") as info:
        parse_triangulation(text)
    assert info.value.line == 1
    assert info.value.column is not None


def test_unknown_field_is_rejected():
    with pytest.raises(TriangulationFormatError, match="field comment"):
        parse_triangulation(document(comment="hello"))


def test_wrong_format_tag():
    with pytest.raises(TriangulationFormatError, match="field format"):
        parse_triangulation(document(format="involcode-triangulation/2"))


def test_non_integer_vertex():
    bad = json.loads(document())
    bad["tetrahedra"][0][1] = "2"
    with pytest.raises(TriangulationFormatError, match=r"field tetrahedra\[0\]\[1\]"):
        parse_triangulation(json.dumps(bad))


def test_short_tetrahedron():
    bad = json.loads(document())
    bad["tetrahedra"][3] = [0, 2, 5]
    with pytest.raises(TriangulationFormatError, match="has 3 vertices"):
        parse_triangulation(json.dumps(bad))


def test_repeated_vertex_is_a_malformed_facet():
    bad = json.loads(document())
    bad["tetrahedra"][0] = [0, 2, 2, 6]
    with pytest.raises(MalformedFacetError):
        parse_triangulation(json.dumps(bad))


def test_unsorted_tetrahedra():
    bad = json.loads(document())
    bad["tetrahedra"][0] = [2, 0, 4, 6]
    with pytest.raises(TriangulationFormatError, match="strictly increasing"):
        parse_triangulation(json.dumps(bad))
    bad = json.loads(document())
    bad["tetrahedra"].reverse()
    with pytest.raises(TriangulationFormatError, match="lexicographically sorted"):
        parse_triangulation(json.dumps(bad))


def test_duplicate_tetrahedron():
    bad = json.loads(document())
    bad["tetrahedra"].insert(0, bad["tetrahedra"][0])
    with pytest.raises(TriangulationFormatError, match="duplicate"):
        parse_triangulation(json.dumps(bad))


def test_non_involution_in_file():
    with pytest.raises(NotAnInvolutionError):
        parse_triangulation(document(involution=[1, 2, 0, 3, 4, 5, 6, 7]))


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_triangulation(tmp_path / "absent.json")


def test_unwritable_path(tmp_path):
    with pytest.raises(InputError, match="cannot write"):
        dump_triangulation(*sphere_suspension(), tmp_path / "missing" / "out.json")


def test_registry_names_and_parameters():
    registry = AtlasRegistry()
    assert registry.names() == ["sphere_suspension", "torus_conjugation"]
    assert registry.is_known("torus_conjugation:6")
    assert not registry.is_known("lens_space")
    entry = registry.create("torus_conjugation:6")
    assert isinstance(entry, TorusConjugationEntry)
    assert entry.resolution == 6
    assert isinstance(registry.create("sphere_suspension"), SphereSuspensionEntry)


@pytest.mark.parametrize(
    "spec, message",
    [
        ("lens_space", "unknown atlas entry"),
        ("sphere_suspension:2", "takes no parameter"),
        ("torus_conjugation:x", "must be an integer"),
    ],
)
def test_registry_rejects_bad_specs(spec, message):
    with pytest.raises(InputError, match=message):
        AtlasRegistry().create(spec)


def test_expectations():
    sphere = SphereSuspensionEntry("sphere_suspension").expected
    assert (sphere.k, sphere.maximal, sphere.code_name, sphere.doubly_even) == (2, True, "repetition2", False)
    torus = TorusConjugationEntry("torus_conjugation").expected
    assert (torus.k, torus.code_name, torus.doubly_even) == (8, "extended_hamming8", True)
