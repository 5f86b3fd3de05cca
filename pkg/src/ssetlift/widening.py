"""Widenings, partial projections, widened inclusions, and their witnesses.

The widening of X at a vertex set nu is the full subcomplex of J x X on
({0} x X_0) u ({1} x nu); it thickens X by a formal isomorphism at each
marked vertex.  An inclusion X into Y widened at nu is
({0} x Y) u W_{nu n X_0}(X)  into  W_nu(Y), all living inside J x Y with
shared labels, which keeps every diagram here checkable by label chasing.

Besides the constructors, this module materializes three facts as witness
objects whose commutativity/identity conditions are verified mechanically:
widened inclusions are retracts of pushout-products; widening at mu factors
through widening at nu then at mu minus nu; and any widened inclusion
decomposes into a chain of single-vertex stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .kernel import (
    Inclusion,
    SimplicialMap,
    TruncatedSimplicialSet,
    UsageError,
    ValidationError,
    compose_maps,
    corestrict_map,
    identity_map,
    make_J,
    product,
    pushout,
    subcomplex,
    union_subcomplexes,
    validate_map,
)
from .labels import fmt, sort_key


def _is_zero(bits: tuple) -> bool:
    return all(b == 0 for b in bits)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_jsonable(self):
        return {"identity": self.name, "status": "pass" if self.ok else "fail",
                **({"detail": self.detail} if self.detail else {})}


def all_ok(checks: Iterable[Check]) -> bool:
    return all(c.ok for c in checks)


# ---------------------------------------------------------------------------
# widenings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Widening:
    """W_nu(X) together with its inclusion into the ambient product J x X."""

    base: TruncatedSimplicialSet
    marked_vertices: tuple
    ambient: TruncatedSimplicialSet     # J x X
    result: Inclusion                   # W_nu(X) -> J x X

    @property
    def widened(self) -> TruncatedSimplicialSet:
        return self.result.domain


def widen(X: TruncatedSimplicialSet, nu: Iterable) -> Widening:
    """The widening of X at nu, as a full subcomplex of J x X."""
    nu = tuple(sorted(set(nu), key=sort_key))
    unknown = set(nu) - X.simplex_set(0)
    if unknown:
        raise UsageError(f"unknown vertices: {sorted(map(fmt, unknown))}")
    ambient = product(make_J(X.truncation_dim), X)
    marked = [((0,), v) for v in X.simplices_at(0)] + [((1,), v) for v in nu]
    # full subcomplex, but filtered directly: vertex i of (a, s) is marked
    # iff a_i == 0 or the i-th vertex of s lies in nu
    nuset = frozenset(nu)
    labels = []
    for n in range(X.truncation_dim + 1):
        keep = []
        for (a, s) in ambient.simplices_at(n):
            verts = X.vertex_tuple(n, s)
            if all(a[i] == 0 or verts[i] in nuset for i in range(n + 1)):
                keep.append((a, s))
        labels.append(keep)
    del marked
    return Widening(X, nu, ambient, subcomplex(ambient, labels))


def partial_projection(X: TruncatedSimplicialSet, nu: Iterable) -> SimplicialMap:
    """r_nu: J x X -> J, zeroing the J-coordinate at vertices outside nu."""
    nu = frozenset(nu)
    unknown = nu - X.simplex_set(0)
    if unknown:
        raise UsageError(f"unknown vertices: {sorted(map(fmt, unknown))}")
    J = make_J(X.truncation_dim)
    ambient = product(J, X)
    comp = {}
    for n in range(X.truncation_dim + 1):
        tab = {}
        for (a, s) in ambient.simplices_at(n):
            verts = X.vertex_tuple(n, s)
            tab[(a, s)] = tuple(a[i] if verts[i] in nu else 0 for i in range(n + 1))
        comp[n] = tab
    return SimplicialMap(ambient, J, comp)


def retraction(X: TruncatedSimplicialSet, nu: Iterable) -> SimplicialMap:
    """R_{nu,X}: J x X -> W_nu(X); (r_nu, p_X) with the codomain restricted.

    Composing with the inclusion of the widening gives the identity, which is
    what exhibits W_nu(X) as a retract of J x X.
    """
    w = widen(X, nu)
    r = partial_projection(X, nu)
    comp = {}
    for n in range(X.truncation_dim + 1):
        allowed = w.widened.simplex_set(n)
        tab = {}
        for (a, s) in w.ambient.simplices_at(n):
            out = (r.component[n][(a, s)], s)
            if out not in allowed:
                raise ValidationError(
                    f"retraction image {fmt(out)} escaped the widening (kernel bug)")
            tab[(a, s)] = out
        comp[n] = tab
    return SimplicialMap(w.ambient, w.widened, comp)


# ---------------------------------------------------------------------------
# narrow vertices
# ---------------------------------------------------------------------------


def narrow_witness(X: TruncatedSimplicialSet, v) -> Optional[tuple]:
    """A nondegenerate simplex repeating v, or None (up to dimension D)."""
    if not X.has_simplex(0, v):
        raise UsageError(f"unknown vertex {fmt(v)}")
    for n in range(1, X.truncation_dim + 1):
        for x in X.nondegenerate(n):
            if X.vertex_tuple(n, x).count(v) >= 2:
                return (n, x)
    return None


def is_narrow(X: TruncatedSimplicialSet, v) -> bool:
    """True iff no nondegenerate simplex of dimension <= D repeats v.

    Degenerate simplices always repeat their vertices, so the check reads
    "every simplex" on nondegenerate ones; answers are D-truncated.
    """
    return narrow_witness(X, v) is None


# ---------------------------------------------------------------------------
# widened inclusions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WidenedInclusion:
    """({0} x Y) u W_{nu n X_0}(X) -> W_nu(Y), inside J x Y."""

    inner: Inclusion                    # X -> Y
    marked_vertices: tuple              # nu, vertices of Y
    widening: Widening                  # W_nu(Y) -> J x Y
    domain_inclusion: Inclusion         # domain -> J x Y
    map: Inclusion                      # domain -> W_nu(Y)

    @property
    def base(self) -> TruncatedSimplicialSet:
        return self.inner.codomain

    @property
    def inner_image(self) -> list:
        return self.inner.image_labels()


def widened_inclusion(inner: Inclusion, nu: Iterable) -> WidenedInclusion:
    """The inclusion X -> Y widened at nu (nu a set of vertices of Y)."""
    Y = inner.codomain
    nu = tuple(sorted(set(nu), key=sort_key))
    unknown = set(nu) - Y.simplex_set(0)
    if unknown:
        raise UsageError(f"marked vertices not in the codomain: "
                         f"{sorted(map(fmt, unknown))}")
    nuset = frozenset(nu)
    ximg = inner.image_labels()
    w = widen(Y, nu)
    labels = []
    for n in range(Y.truncation_dim + 1):
        keep = []
        for (a, s) in w.ambient.simplices_at(n):
            if _is_zero(a):
                keep.append((a, s))
            elif s in ximg[n]:
                verts = Y.vertex_tuple(n, s)
                if all(a[i] == 0 or verts[i] in nuset for i in range(n + 1)):
                    keep.append((a, s))
        labels.append(keep)
    dom_incl = subcomplex(w.ambient, labels)
    return WidenedInclusion(inner, nu, w, dom_incl, corestrict_map(dom_incl, w.result))


def marked_inner_part(w: WidenedInclusion) -> Inclusion:
    """W_{nu n X_0}(X) as a subcomplex of W_nu(Y) (shared labels)."""
    Y = w.base
    nuset = frozenset(w.marked_vertices)
    ximg = w.inner_image
    labels = []
    for n in range(Y.truncation_dim + 1):
        keep = []
        for (a, s) in w.widening.widened.simplices_at(n):
            if s in ximg[n]:
                verts = Y.vertex_tuple(n, s)
                if all(a[i] == 0 or verts[i] in nuset for i in range(n + 1)):
                    keep.append((a, s))
        labels.append(keep)
    return subcomplex(w.widening.widened, labels)


# ---------------------------------------------------------------------------
# the retract diagram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RetractWitness:
    """The 2x3 diagram exhibiting a widened inclusion as a retract.

    Rows: domain -> ({0} x Y) u (J x X) -> domain on top, with the identity
    composite; W_nu(Y) -> J x Y -> W_nu(Y) on the bottom via R_{nu,Y}.  The
    middle vertical is the pushout-product of {0} -> J with X -> Y.
    """

    source: WidenedInclusion
    top_left: Inclusion
    top_right: SimplicialMap
    bottom_left: Inclusion
    bottom_right: SimplicialMap
    middle: Inclusion
    checks: tuple

    @property
    def ok(self) -> bool:
        return all_ok(self.checks)


def retract_witness(w: WidenedInclusion) -> RetractWitness:
    Y = w.base
    D = Y.truncation_dim
    ximg = w.inner_image
    nuset = frozenset(w.marked_vertices)
    ambient = w.widening.ambient
    dom = w.map.domain

    mid_labels = []
    for n in range(D + 1):
        mid_labels.append([(a, s) for (a, s) in ambient.simplices_at(n)
                           if _is_zero(a) or s in ximg[n]])
    middle = subcomplex(ambient, mid_labels)
    mid_obj = middle.domain

    top_left = corestrict_map(w.domain_inclusion, middle)

    comp = {}
    for n in range(D + 1):
        dom_ok = dom.simplex_set(n)
        tab = {}
        for (a, s) in mid_obj.simplices_at(n):
            if s in ximg[n] and not _is_zero(a):
                verts = Y.vertex_tuple(n, s)
                out = (tuple(a[i] if verts[i] in nuset else 0
                             for i in range(n + 1)), s)
            else:
                out = (a, s)
            if out not in dom_ok:
                raise ValidationError("retract collapse escaped the domain")
            tab[(a, s)] = out
        comp[n] = tab
    top_right = SimplicialMap(mid_obj, dom, comp)

    bottom_left = w.widening.result
    bottom_right = retraction(Y, w.marked_vertices)

    checks = (
        Check("top-composite-identity",
              compose_maps(top_right, top_left).equal(identity_map(dom))),
        Check("bottom-composite-identity",
              compose_maps(bottom_right, bottom_left).equal(
                  identity_map(w.widening.widened))),
        Check("left-square",
              compose_maps(middle, top_left).equal(
                  compose_maps(bottom_left, w.map))),
        Check("right-square",
              compose_maps(w.map, top_right).equal(
                  compose_maps(bottom_right, middle))),
        Check("collapse-simplicial", validate_map(top_right).ok),
        Check("retraction-simplicial", validate_map(bottom_right).ok),
    )
    return RetractWitness(w, top_left, top_right, bottom_left, bottom_right,
                          middle, checks)


# ---------------------------------------------------------------------------
# composition of widenings
# ---------------------------------------------------------------------------


def _widening_iso_parts(X: TruncatedSimplicialSet, nu: Sequence, mu: Sequence):
    nuset, muset = frozenset(nu), frozenset(mu)
    if not nuset <= muset:
        raise UsageError("need nu contained in mu")
    if not muset <= set(X.simplices_at(0)):
        raise UsageError("mu must consist of vertices of X")
    w_mu = widen(X, muset)
    w_nu = widen(X, nuset)
    rest = muset - nuset
    outer_marks = [((0,), v) for v in rest]
    w_outer = widen(w_nu.widened, outer_marks)
    comp = {}
    for n in range(X.truncation_dim + 1):
        allowed = w_outer.widened.simplex_set(n)
        tab = {}
        for (a, s) in w_mu.widened.simplices_at(n):
            verts = X.vertex_tuple(n, s)
            b = tuple(a[i] if verts[i] in rest else 0 for i in range(n + 1))
            c = tuple(a[i] if verts[i] in nuset else 0 for i in range(n + 1))
            out = (b, (c, s))
            if out not in allowed:
                raise ValidationError(
                    f"widening re-routing escaped its codomain at {fmt((a, s))}")
            tab[(a, s)] = out
        comp[n] = tab
    phi = SimplicialMap(w_mu.widened, w_outer.widened, comp)
    return phi, w_mu, w_nu, w_outer


def widening_iso(X: TruncatedSimplicialSet, nu: Iterable, mu: Iterable) -> SimplicialMap:
    """The isomorphism W_mu(X) -> W_{mu-nu}(W_nu(X)) for nu inside mu.

    Rewrites (a, s) as (a zeroed off mu-nu, (a zeroed off nu, s)); vertices of
    W_nu(X) are tracked as pairs, and the outer marking is {0} x (mu - nu).
    """
    phi, _, _, _ = _widening_iso_parts(X, tuple(nu), tuple(mu))
    return phi


# ---------------------------------------------------------------------------
# factorization of widened inclusions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PushoutSquareWitness:
    """A commuting square recorded as a pushout, with the replay evidence.

    ``induced`` maps the freshly computed pushout of (left, top) onto the
    recorded corner object; the square is a pushout iff it is bijective.
    """

    left: Inclusion
    top: SimplicialMap
    bottom: SimplicialMap
    right: SimplicialMap
    induced: SimplicialMap
    checks: tuple

    @property
    def ok(self) -> bool:
        return all_ok(self.checks)


def _replay_pushout_square(left: Inclusion, top: SimplicialMap,
                           bottom: SimplicialMap, right: SimplicialMap,
                           tag: str) -> PushoutSquareWitness:
    """Verify that a commuting square is a pushout by replaying it."""
    checks = [Check(f"{tag}-commutes",
                    compose_maps(right, top).equal(compose_maps(bottom, left)))]
    res = pushout(left, top)
    corner = right.codomain
    comp = {}
    good = True
    for n in range(corner.truncation_dim + 1):
        tab = {}
        have = corner.simplex_set(n)
        for rep in res.obj.simplices_at(n):
            tagname, lbl = rep
            out = (bottom.component[n][lbl] if tagname == "B"
                   else right.component[n][lbl])
            if out not in have:
                good = False
                break
            tab[rep] = out
        comp[n] = tab
        if not good:
            break
    if good:
        induced = SimplicialMap(res.obj, corner, comp)
        checks.append(Check(f"{tag}-pushout-exact", induced.is_bijective()))
        checks.append(Check(f"{tag}-induced-simplicial", validate_map(induced).ok))
    else:
        induced = SimplicialMap(res.obj, corner,
                                {n: {} for n in range(corner.truncation_dim + 1)})
        checks.append(Check(f"{tag}-pushout-exact", False, "induced map escaped"))
    return PushoutSquareWitness(left, top, bottom, right, induced, tuple(checks))


@dataclass(frozen=True)
class FactorizationResult:
    """The two-stage factorization of a widened inclusion through nu.

    stage1 is a pushout of the inclusion widened at nu (witnessed by
    ``square``); stage2 is isomorphic to an inclusion widened at mu - nu
    (witnessed by the conjugating isomorphisms ``iso_big``/``iso_small``
    onto ``stage2_target``); stage2 after stage1 equals the original map.
    """

    source: WidenedInclusion
    peeled: tuple                       # nu
    single: WidenedInclusion            # inclusion widened at nu
    stage1: Inclusion                   # dom(source) -> mid
    square: PushoutSquareWitness
    stage2: Inclusion                   # mid -> W_mu(Y)
    stage2_target: WidenedInclusion     # inclusion widened at mu - nu
    iso_big: SimplicialMap              # W_mu(Y) -> W_{mu-nu}(W_nu(Y))
    iso_small: SimplicialMap            # mid -> dom(stage2_target)
    checks: tuple

    @property
    def ok(self) -> bool:
        return all_ok(self.checks) and self.square.ok


def factor_widened(w: WidenedInclusion, nu: Iterable) -> FactorizationResult:
    Y = w.base
    D = Y.truncation_dim
    nu = tuple(sorted(set(nu), key=sort_key))
    muset = frozenset(w.marked_vertices)
    if not set(nu) <= muset:
        raise UsageError("nu must be a subset of the marked vertices")
    ambient = w.widening.ambient
    ximg = w.inner_image

    single = widened_inclusion(w.inner, nu)
    A_incl = single.domain_inclusion          # A -> J x Y
    A = A_incl.domain
    C_incl = w.domain_inclusion               # C -> J x Y
    C = C_incl.domain

    a_to_c = corestrict_map(A_incl, C_incl)   # A -> C (labels shared)
    mid_incl = union_subcomplexes(ambient, [single.widening.result, C_incl])
    mid = mid_incl.domain

    stage1 = corestrict_map(C_incl, mid_incl)
    b_to_mid = corestrict_map(single.widening.result, mid_incl)
    square = _replay_pushout_square(single.map, a_to_c, b_to_mid, stage1, "stage1")

    stage2 = corestrict_map(mid_incl, w.widening.result)

    phi, w_mu, w_nu, _ = _widening_iso_parts(Y, nu, tuple(muset))

    # the inner inclusion of the remaining widened stage: W_{nu'}(X) -> W_nu(Y)
    Y1 = w_nu.widened
    nuset = frozenset(nu)
    x1_labels = []
    for n in range(D + 1):
        keep = []
        for (a, s) in Y1.simplices_at(n):
            if s in ximg[n]:
                verts = Y.vertex_tuple(n, s)
                if all(a[i] == 0 or verts[i] in nuset for i in range(n + 1)):
                    keep.append((a, s))
        x1_labels.append(keep)
    inner2 = subcomplex(Y1, x1_labels)
    mu2 = [((0,), v) for v in sorted(muset - nuset, key=sort_key)]
    target = widened_inclusion(inner2, mu2)

    checks = [Check("composite-equals-original",
                    compose_maps(stage2, stage1).equal(w.map)),
              Check("iso-big-simplicial", validate_map(phi).ok),
              Check("iso-big-bijective", phi.is_bijective())]

    target_dom = target.map.domain
    small_comp = {}
    image_matches = True
    for n in range(D + 1):
        tab = {l: phi.component[n][l] for l in mid.simplices_at(n)}
        small_comp[n] = tab
        if frozenset(tab.values()) != target_dom.simplex_set(n):
            image_matches = False
    checks.append(Check("stage2-iso-image", image_matches,
                        "phi(mid) must be the widened domain at mu-nu"))
    if image_matches:
        iso_small = SimplicialMap(mid, target_dom, small_comp)
        checks.append(Check("iso-small-bijective", iso_small.is_bijective()))
        # conjugation: target.map o iso_small == phi o stage2, both landing in
        # W_{mu-nu}(W_nu(Y)); the codomains agree by construction
        lhs = compose_maps(target.map, iso_small)
        rhs = compose_maps(phi, stage2)
        checks.append(Check("stage2-conjugation", lhs.equal(rhs)))
    else:
        iso_small = SimplicialMap(mid, target_dom,
                                  {n: {} for n in range(D + 1)})
    return FactorizationResult(w, nu, single, stage1, square, stage2, target,
                               phi, iso_small, tuple(checks))


@dataclass(frozen=True)
class ChainStage:
    vertex: object
    narrow: bool
    factorization: FactorizationResult
    single: WidenedInclusion

    @property
    def ok(self) -> bool:
        return self.factorization.ok


@dataclass(frozen=True)
class SingleVertexChain:
    """A widened inclusion peeled into single-vertex widened stages.

    Stage t is a pushout of an inclusion widened at one vertex; the residual
    is the empty-marking widened inclusion, whose map is an isomorphism onto
    {0} x (final base).  When the original marking is narrow, every stage is
    widened at a narrow vertex.
    """

    source: WidenedInclusion
    stages: tuple
    residual: WidenedInclusion
    checks: tuple

    @property
    def ok(self) -> bool:
        return all_ok(self.checks) and all(s.ok for s in self.stages)


def decompose_to_single(w: WidenedInclusion) -> SingleVertexChain:
    stages = []
    current = w
    while current.marked_vertices:
        v = min(current.marked_vertices, key=sort_key)
        fact = factor_widened(current, (v,))
        stages.append(ChainStage(v, is_narrow(current.base, v), fact, fact.single))
        current = fact.stage2_target
    checks = (Check("residual-is-isomorphism", current.map.is_bijective(),
                    "empty marking leaves an isomorphism onto {0} x Y"),)
    return SingleVertexChain(w, tuple(stages), current, checks)
