"""Isoplexes, iso-horns, faces, and the cell-attachment decomposition."""

import dataclasses

import pytest

from ssetlift.isohorn import (
    NotNarrowError,
    decompose_single_narrow,
    isohorn,
    isohorn_as_widened,
    isoplex,
    isoplex_face,
    verify_decomposition,
)
from ssetlift.kernel import (
    UsageError,
    boundary_inclusion,
    find_isomorphism,
    full_subcomplex,
    identity_map,
    inverted_arrow_category,
    make_delta,
    make_J,
    nerve,
    subcomplex,
    union_subcomplexes,
    validate_map,
    validate_sset,
)
from ssetlift.widening import retract_witness, widen

D = 4


# -- isoplexes ----------------------------------------------------------------


def test_isoplex_1_0_is_J():
    assert find_isomorphism(isoplex(1, 0, 3).body, make_J(3)) is not None


def test_isoplex_2_0_is_inverted_nerve():
    p = isoplex(2, 0, 3)
    assert find_isomorphism(p.body, nerve(inverted_arrow_category(2, 0), 3)) is not None


def test_isoplex_3_2_matches_widening_example():
    p = isoplex(3, 2, 3)
    assert p.body == widen(make_delta(2, 3), [(2,)]).widened


@pytest.mark.parametrize("n,i", [(n, i) for n in range(1, 5) for i in range(n)])
def test_isoplex_nerve_presentation(n, i):
    p = isoplex(n, i, 3)
    assert p.nerve_iso.is_bijective()
    assert validate_map(p.nerve_iso).ok
    assert len(p.body.simplices_at(0)) == n + 1


def test_isoplex_rejects_bad_indices():
    with pytest.raises(UsageError):
        isoplex(0, 0, 2)
    with pytest.raises(UsageError):
        isoplex(2, 2, 2)


# -- iso-horns ----------------------------------------------------------------


def test_isohorn_1_0_is_vertex_into_J():
    h = isohorn(1, 0, 3)
    assert [len(h.body.simplices_at(n)) for n in range(4)] == [1, 1, 1, 1]
    assert find_isomorphism(h.plex.body, make_J(3)) is not None


def test_isohorn_2_0_shape():
    h = isohorn(2, 0, D)
    assert len(h.body.simplices_at(0)) == 3
    assert len(h.body.nondegenerate(1)) == 3
    assert validate_sset(h.body).ok


@pytest.mark.parametrize("n,i", [(n, i) for n in range(1, 4) for i in range(n)])
def test_isohorn_equals_widened_boundary(n, i):
    h = isohorn(n, i, D)
    w = isohorn_as_widened(n, i, D)
    for m in range(D + 1):
        assert h.body.simplex_set(m) == w.map.domain.simplex_set(m)
        assert h.plex.body.simplex_set(m) == w.widening.widened.simplex_set(m)


@pytest.mark.parametrize("n,i", [(n, i) for n in range(2, 4) for i in range(n)])
def test_isohorn_with_missing_face_gives_all_faces_only(n, i):
    # adding the i-th face yields the union of all faces, which is still a
    # proper subobject: top cells touching every vertex lie in no face
    h = isohorn(n, i, D)
    face = isoplex_face(n, i, i, D)
    both = union_subcomplexes(h.plex.body, [h.inclusion, face.inclusion])
    all_faces = union_subcomplexes(
        h.plex.body,
        [isoplex_face(n, i, j, D).inclusion for j in range(n + 1)])
    assert both.domain == all_faces.domain
    assert both.domain != h.plex.body


@pytest.mark.parametrize("n,i", [(n, i) for n in range(2, 5) for i in range(n)])
def test_isohorn_is_union_of_other_faces(n, i):
    h = isohorn(n, i, min(D, 4))
    faces = [isoplex_face(n, i, j, min(D, 4)).inclusion for j in range(n + 1) if j != i]
    union = union_subcomplexes(h.plex.body, faces)
    assert union.domain == h.body


@pytest.mark.parametrize("n,i", [(n, i) for n in range(1, 4) for i in range(n)])
def test_isohorn_retract_of_pushout_product(n, i):
    assert retract_witness(isohorn_as_widened(n, i, D)).ok


# -- faces ---------------------------------------------------------------------


def test_simplex_faces_of_isoplex():
    for j in (0, 1):
        f = isoplex_face(2, 0, j, 3)
        assert f.kind == "simplex"
        assert find_isomorphism(f.inclusion.domain, make_delta(1, 3)) is not None


def test_isoplex_faces_observed_indices():
    f = isoplex_face(3, 0, 3, 3)
    assert f.kind == "isoplex" and f.match_index == 0
    f2 = isoplex_face(3, 2, 0, 3)
    assert f2.kind == "isoplex" and f2.match_index == 1


def test_isoplex_face_range():
    with pytest.raises(UsageError):
        isoplex_face(2, 0, 3, 3)


# -- cell decomposition ----------------------------------------------------------


def test_decompose_vertex_into_delta1():
    inner = full_subcomplex(make_delta(1, D), [(0,)])
    dec = decompose_single_narrow(inner, (0,))
    assert dec.counts == {1: 1}
    assert not dec.truncated
    assert dec.total_cells() == 1
    stage = dec.stages[0]
    assert stage.k == 1 and stage.cells[0].index == 0
    # the result is the widening of Delta[1] at the vertex 0
    target = widen(make_delta(1, D), [(0,)]).widened
    assert dec.final.domain == target
    assert verify_decomposition(dec).ok


def test_decompose_boundary2_counts_follow_membership():
    # every edge of Delta[2] lies in its boundary, so only the top cell attaches
    dec = decompose_single_narrow(boundary_inclusion(2, D), (2,))
    assert dec.counts == {1: 0, 2: 1}
    assert dec.leftover == {}
    assert not dec.truncated
    assert verify_decomposition(dec).ok
    dec1 = decompose_single_narrow(boundary_inclusion(2, D), (1,))
    assert dec1.counts == {1: 0, 2: 1}
    assert dec1.stages[0].cells[0].index == 1


def test_decompose_identity_is_empty():
    dec = decompose_single_narrow(identity_map(make_delta(1, D)), (0,))
    assert dec.total_cells() == 0
    assert dec.prestage is None
    assert not dec.truncated
    assert verify_decomposition(dec).ok


def test_decompose_prestage_when_vertex_outside():
    from ssetlift.kernel import Inclusion, make_empty
    pt = make_delta(0, D)
    inner = Inclusion(make_empty(D), pt, {n: {} for n in range(D + 1)})
    dec = decompose_single_narrow(inner, (0,))
    assert dec.prestage is not None
    assert dec.total_cells() == 1
    assert find_isomorphism(dec.final.domain, make_J(D)) is not None
    assert verify_decomposition(dec).ok


def test_decompose_refuses_non_narrow():
    inner = full_subcomplex(make_J(2), [(0,)])
    with pytest.raises(NotNarrowError) as err:
        decompose_single_narrow(inner, (0,))
    assert err.value.witness == (2, (0, 1, 0))


def test_decompose_truncation_flagging():
    # widening the base introduces J-copies, so cells exist in every dimension
    Y1 = widen(make_delta(2, D), [(0,)]).widened
    X1 = subcomplex(Y1, [[l for l in Y1.simplices_at(n)
                          if set(l[1]) != {0, 1, 2}] for n in range(D + 1)])
    y = ((0,), (1,))
    dec = decompose_single_narrow(X1, y)
    assert dec.truncated
    assert dec.counts == {1: 0, 2: 2, 3: 2}
    assert dec.leftover == {4: 2}
    assert dec.sound_dim == 3
    rep = verify_decomposition(dec)
    assert rep.ok


def test_verify_flags_corrupted_attachment():
    dec = decompose_single_narrow(boundary_inclusion(2, D), (2,))
    stage = dec.stages[0]
    # reroute one horn vertex image; naturality and the square both break
    broken_comp = {n: dict(stage.attach.component[n]) for n in range(D + 1)}
    horn = stage.horn_coproduct
    before = stage.before.domain
    lbl = horn.simplices_at(0)[0]
    cur = broken_comp[0][lbl]
    cand = next(v for v in before.simplices_at(0) if v != cur)
    broken_comp[0][lbl] = cand
    from ssetlift.kernel import SimplicialMap
    bad_attach = SimplicialMap(horn, before, broken_comp)
    bad_stage = dataclasses.replace(stage, attach=bad_attach)
    bad = dataclasses.replace(dec, stages=(bad_stage,))
    rep = verify_decomposition(bad)
    assert not rep.ok
    assert all(v.rule in ("attach-simplicial", "pushout-square")
               for v in rep.violations)
    # the untouched decomposition still verifies
    assert verify_decomposition(dec).ok


def test_stage_cells_have_matching_dimension():
    dec = decompose_single_narrow(boundary_inclusion(2, D), (0,))
    for stage in dec.stages:
        for cell in stage.cells:
            assert dec.inner.codomain.has_simplex(stage.k, cell.sigma)
        # cells of dimension k attach (k+1)-isoplexes: k+2 vertices each
        per_cell = len(stage.cells)
        assert len(stage.plex_coproduct.simplices_at(0)) == per_cell * (stage.k + 2)
