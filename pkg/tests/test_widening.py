"""Widening module: widenings, projections, narrowness, retract diagrams."""

import itertools

import pytest

from ssetlift.kernel import (
    UsageError,
    boundary_inclusion,
    compose_maps,
    find_isomorphism,
    full_subcomplex,
    identity_map,
    inverted_arrow_category,
    make_delta,
    make_empty,
    make_J,
    nerve,
    skeleton,
    validate_map,
    validate_sset,
    vertex_zero_inclusion,
)
from ssetlift.lifting import pushout_product
from ssetlift.widening import (
    decompose_to_single,
    factor_widened,
    is_narrow,
    narrow_witness,
    partial_projection,
    retract_witness,
    retraction,
    widen,
    widened_inclusion,
    widening_iso,
)

D = 4


# -- widen --------------------------------------------------------------------


def test_widen_at_all_vertices_is_product():
    X = make_delta(1, D)
    w = widen(X, X.simplices_at(0))
    assert w.widened == w.ambient


def test_widen_at_nothing_is_base():
    X = make_delta(2, D)
    w = widen(X, [])
    assert find_isomorphism(w.widened, X) is not None


def test_widen_delta2_at_last_vertex():
    w = widen(make_delta(2, D), [(2,)])
    assert len(w.widened.simplices_at(0)) == 4
    assert len(w.widened.nondegenerate(1)) == 7
    model = nerve(inverted_arrow_category(3, 2), D)
    assert find_isomorphism(w.widened, model) is not None


def test_widen_validates_and_rejects_unknowns():
    X = make_delta(2, D)
    assert validate_sset(widen(X, [(0,)]).widened).ok
    with pytest.raises(UsageError):
        widen(X, [(7,)])


# -- partial projection / retraction ------------------------------------------


def test_partial_projection_full_marking_is_projection():
    X = make_delta(1, D)
    r = partial_projection(X, X.simplices_at(0))
    for n in range(D + 1):
        for (a, s) in r.domain.simplices_at(n):
            assert r.component[n][(a, s)] == a


def test_partial_projection_empty_marking_is_constant_zero():
    X = make_delta(1, D)
    r = partial_projection(X, [])
    for n in range(D + 1):
        for lbl in r.domain.simplices_at(n):
            assert r.component[n][lbl] == tuple(0 for _ in range(n + 1))


def test_partial_projection_formula_and_simplicial():
    X = make_delta(2, D)
    r = partial_projection(X, [(2,)])
    assert r.component[2][((1, 0, 1), (0, 1, 2))] == (0, 0, 1)
    assert validate_map(r).ok


def test_retraction_identity_composite():
    for X, nu in [(make_delta(1, 3), [(0,)]),
                  (make_delta(2, 3), [(1,), (2,)]),
                  (make_J(3), [(0,)])]:
        R = retraction(X, nu)
        inc = widen(X, nu).result
        assert compose_maps(R, inc).equal(identity_map(inc.domain))
        assert validate_map(R).ok


def test_retraction_at_full_marking_is_identity():
    X = make_delta(1, 3)
    R = retraction(X, X.simplices_at(0))
    assert R.is_bijective()
    assert compose_maps(R, identity_map(R.domain)).equal(R)


def test_image_of_partial_projection_pair_is_widening():
    # (r_nu, p_X) has image exactly W_nu(X)
    X = make_delta(2, 3)
    nu = [(2,)]
    r = partial_projection(X, nu)
    w = widen(X, nu)
    for n in range(4):
        image = {(r.component[n][(a, s)], s) for (a, s) in w.ambient.simplices_at(n)}
        assert image == w.widened.simplex_set(n)


# -- narrow vertices -----------------------------------------------------------


def test_delta_vertices_are_narrow():
    for n in range(4):
        X = make_delta(n, D)
        assert all(is_narrow(X, v) for v in X.simplices_at(0))


def test_J_vertices_are_not_narrow():
    J = make_J(2)
    assert not is_narrow(J, (0,))
    assert narrow_witness(J, (0,)) == (2, (0, 1, 0))


def test_narrow_passes_to_subcomplexes():
    Y = widen(make_delta(2, D), [(2,)]).widened
    narrow_in_Y = [v for v in Y.simplices_at(0) if is_narrow(Y, v)]
    sub = full_subcomplex(Y, Y.simplices_at(0)[:3]).domain
    for v in narrow_in_Y:
        if sub.has_simplex(0, v):
            assert is_narrow(sub, v)


def test_is_narrow_unknown_vertex():
    with pytest.raises(UsageError):
        is_narrow(make_delta(1, 2), (9,))


# -- widened inclusions ---------------------------------------------------------


def test_widened_at_all_vertices_is_pushout_product():
    inner = boundary_inclusion(2, D)
    Y = inner.codomain
    w = widened_inclusion(inner, Y.simplices_at(0))
    pp = pushout_product(inner, vertex_zero_inclusion(D))
    for n in range(D + 1):
        assert w.map.domain.simplex_set(n) == pp.domain.simplex_set(n)
        assert w.widening.widened.simplex_set(n) == pp.codomain.simplex_set(n)


def test_widened_identity_inner_is_isomorphism():
    w = widened_inclusion(identity_map(make_delta(2, D)), [(0,), (1,)])
    assert w.map.is_bijective()


def test_widened_inclusion_rejects_bad_marking():
    with pytest.raises(UsageError):
        widened_inclusion(boundary_inclusion(1, D), [(9,)])


def test_widened_inclusion_of_boundary1_at_zero_is_isohorn():
    from ssetlift.isohorn import isohorn
    w = widened_inclusion(boundary_inclusion(1, D), [(0,)])
    h = isohorn(2, 0, D)
    for n in range(D + 1):
        assert w.map.domain.simplex_set(n) == h.body.simplex_set(n)
        assert w.widening.widened.simplex_set(n) == h.plex.body.simplex_set(n)


# -- widening_iso ---------------------------------------------------------------


def test_widening_iso_empty_nu():
    X = make_delta(2, D)
    phi = widening_iso(X, [], [(0,), (2,)])
    assert phi.is_bijective() and validate_map(phi).ok


def test_widening_iso_nu_equal_mu():
    X = make_delta(1, D)
    phi = widening_iso(X, [(0,)], [(0,)])
    assert phi.is_bijective() and validate_map(phi).ok
    # the outer widening marks nothing, so the target is {0} x W_nu(X)
    for n in range(D + 1):
        for lbl, (b, _) in phi.component[n].items():
            assert all(x == 0 for x in b)


def test_widening_iso_all_subset_pairs_delta2():
    X = make_delta(2, D)
    verts = X.simplices_at(0)
    for r in range(4):
        for mu in itertools.combinations(verts, r):
            for s in range(len(mu) + 1):
                for nu in itertools.combinations(mu, s):
                    phi = widening_iso(X, nu, mu)
                    assert phi.is_bijective()
                    assert validate_map(phi).ok


def test_widening_iso_rejects_non_subset():
    X = make_delta(1, D)
    with pytest.raises(UsageError):
        widening_iso(X, [(1,)], [(0,)])


# -- retract witness --------------------------------------------------------------


def test_retract_witness_trivial_when_marking_everything():
    inner = boundary_inclusion(1, D)
    w = widened_inclusion(inner, inner.codomain.simplices_at(0))
    rw = retract_witness(w)
    assert rw.ok
    # mid column equals the domain column
    assert rw.middle.domain == w.map.domain


def test_retract_witness_isohorn_2_0():
    from ssetlift.isohorn import isohorn_as_widened
    rw = retract_witness(isohorn_as_widened(2, 0, D))
    assert rw.ok
    pp = pushout_product(boundary_inclusion(1, D), vertex_zero_inclusion(D))
    for n in range(D + 1):
        assert rw.middle.domain.simplex_set(n) == pp.domain.simplex_set(n)


def test_retract_witness_point_widening():
    from ssetlift.kernel import Inclusion
    pt = make_delta(0, D)
    empty = make_empty(D)
    inner = Inclusion(empty, pt, {n: {} for n in range(D + 1)})
    rw = retract_witness(widened_inclusion(inner, [(0,)]))
    assert rw.ok
    assert find_isomorphism(rw.source.widening.widened, make_J(D)) is not None


# -- factoring ---------------------------------------------------------------------


def test_factor_widened_trivial_ends():
    inner = boundary_inclusion(2, D)
    verts = inner.codomain.simplices_at(0)
    w = widened_inclusion(inner, verts)
    assert factor_widened(w, verts).ok          # nu = mu
    assert factor_widened(w, []).ok             # nu = empty
    with pytest.raises(UsageError):
        factor_widened(w, [(9,)])


def test_factor_widened_single_peel():
    w = widened_inclusion(boundary_inclusion(2, D),
                          make_delta(2, D).simplices_at(0))
    fact = factor_widened(w, [(0,)])
    assert fact.ok and fact.square.ok
    # the remainder is widened at the two remaining (paired) vertices
    assert len(fact.stage2_target.marked_vertices) == 2


def test_decompose_to_single_small_cases():
    inner = boundary_inclusion(1, D)
    single = widened_inclusion(inner, [(0,)])
    chain = decompose_to_single(single)
    assert len(chain.stages) == 1 and chain.ok

    nothing = widened_inclusion(inner, [])
    chain0 = decompose_to_single(nothing)
    assert len(chain0.stages) == 0 and chain0.ok
    assert chain0.residual.map.is_bijective()


def test_decompose_to_single_three_stages_narrow():
    w = widened_inclusion(boundary_inclusion(2, D),
                          make_delta(2, D).simplices_at(0))
    chain = decompose_to_single(w)
    assert len(chain.stages) == 3
    assert chain.ok
    assert all(s.narrow for s in chain.stages)
    assert all(len(s.single.marked_vertices) == 1 for s in chain.stages)


def test_skeleton_inclusion_still_widens():
    inner = skeleton(make_delta(2, D), 1)
    w = widened_inclusion(inner, [(1,)])
    assert validate_map(w.map).ok
    assert retract_witness(w).ok
