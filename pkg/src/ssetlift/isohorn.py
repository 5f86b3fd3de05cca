"""Isoplexes, iso-horns, their faces, and the cell-attachment decomposition.

The isoplex with n+1 vertices and inverted edge at position i is the
widening of the standard (n-1)-simplex at its i-th vertex; it is also the
nerve of the poset 0 -> 1 -> ... -> n with the arrow i -> i+1 made
invertible, and both presentations are kept with the isomorphism recorded.
The iso-horn inside it is the union of all faces except the i-th.

``decompose_single_narrow`` mechanizes the skeletal filtration that builds a
single-narrow-vertex widened inclusion as a chain of pushouts of coproducts
of iso-horn inclusions, one stage per cell dimension.  Each stage carries a
replayable pushout square; ``verify_decomposition`` recomputes everything
from scratch and reports violations in the style of ``validate_sset``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import (
    Inclusion,
    SimplicialMap,
    SsetError,
    TruncatedSimplicialSet,
    UsageError,
    ValidationError,
    ValidationReport,
    Violation,
    apply_operator,
    boundary_inclusion,
    coproduct,
    corestrict_map,
    find_isomorphism,
    full_subcomplex,
    inverted_arrow_category,
    make_delta,
    nerve,
    skeleton,
    subcomplex,
    validate_map,
)
from .labels import fmt, sort_key
from .widening import (
    Check,
    PushoutSquareWitness,
    WidenedInclusion,
    _is_zero,
    _replay_pushout_square,
    all_ok,
    narrow_witness,
    widen,
    widened_inclusion,
)


class NotNarrowError(SsetError):
    """Raised when a decomposition is requested at a non-narrow vertex."""

    def __init__(self, vertex, witness):
        self.vertex = vertex
        self.witness = witness
        dim, simplex = witness
        super().__init__(f"vertex {fmt(vertex)} is not narrow: repeated in the "
                         f"nondegenerate {dim}-simplex {fmt(simplex)}")


# ---------------------------------------------------------------------------
# isoplexes and iso-horns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Isoplex:
    """W_i(Delta[n-1]), with the nerve presentation and the matching iso."""

    n: int
    i: int
    body: TruncatedSimplicialSet
    widening: object                  # the Widening producing the body
    nerve_model: TruncatedSimplicialSet
    nerve_iso: SimplicialMap          # nerve_model -> body

    def vertex_in_order(self, j: int):
        """The body vertex corresponding to the j-th object of the nerve."""
        return self.nerve_iso.component[0][j]


def _check_plex_args(n: int, i: int, D: int):
    if n < 1 or not 0 <= i <= n - 1:
        raise UsageError(f"need n >= 1 and 0 <= i <= n-1, got ({n}, {i})")
    if D < 0:
        raise UsageError("truncation must be >= 0")


def isoplex(n: int, i: int, D: int) -> Isoplex:
    _check_plex_args(n, i, D)
    w = widen(make_delta(n - 1, D), [(i,)])
    body = w.widened
    model = nerve(inverted_arrow_category(n, i), D)

    def to_body(obj: int):
        if obj <= i:
            return ((0,), (obj,))
        if obj == i + 1:
            return ((1,), (i,))
        return ((0,), (obj - 1,))

    comp = {}
    for m in range(D + 1):
        allowed = body.simplex_set(m)
        tab = {}
        for s in model.simplices_at(m):
            objs = model.vertex_tuple(m, s)
            bits = tuple(to_body(o)[0][0] for o in objs)
            base = tuple(to_body(o)[1][0] for o in objs)
            out = (bits, base)
            if out not in allowed:
                raise ValidationError(
                    f"nerve simplex {fmt(s)} has no widening counterpart")
            tab[s] = out
        comp[m] = tab
    iso = SimplicialMap(model, body, comp)
    if not iso.is_bijective():
        raise ValidationError("nerve/widening presentations of the isoplex differ")
    return Isoplex(n, i, body, w, model, iso)


@dataclass(frozen=True)
class IsoHorn:
    """W_i(boundary) u ({0} x simplex): all faces of the isoplex but the i-th."""

    n: int
    i: int
    body: TruncatedSimplicialSet
    inclusion: Inclusion              # body -> isoplex body
    plex: Isoplex


def isohorn(n: int, i: int, D: int) -> IsoHorn:
    plex = isoplex(n, i, D)
    full = frozenset(range(n))        # vertex values of Delta[n-1]
    labels = []
    for m in range(D + 1):
        keep = [(a, t) for (a, t) in plex.body.simplices_at(m)
                if _is_zero(a) or frozenset(t) != full]
        labels.append(keep)
    inc = subcomplex(plex.body, labels)
    return IsoHorn(n, i, inc.domain, inc, plex)


def isohorn_as_widened(n: int, i: int, D: int) -> WidenedInclusion:
    """The iso-horn inclusion as the boundary inclusion widened at {i}."""
    _check_plex_args(n, i, D)
    return widened_inclusion(boundary_inclusion(n - 1, D), [(i,)])


@dataclass(frozen=True)
class IsoplexFace:
    """The j-th face: the full subcomplex dropping the j-th vertex.

    ``kind`` is "simplex" for j in {i, i+1} and "isoplex" otherwise; for the
    isoplex case the matching lower index is observed by isomorphism search
    and recorded in ``match_index`` (no formula is assumed).
    """

    n: int
    i: int
    j: int
    kind: str
    inclusion: Inclusion
    match_index: Optional[int]
    match_iso: Optional[SimplicialMap]


def isoplex_face(n: int, i: int, j: int, D: int) -> IsoplexFace:
    _check_plex_args(n, i, D)
    if not 0 <= j <= n:
        raise UsageError(f"face index {j} out of range 0..{n}")
    plex = isoplex(n, i, D)
    verts = [plex.vertex_in_order(m) for m in range(n + 1) if m != j]
    inc = full_subcomplex(plex.body, verts)
    if j in (i, i + 1):
        iso = find_isomorphism(inc.domain, make_delta(n - 1, D))
        if iso is None:
            raise ValidationError("simplex-face failed to match a standard simplex")
        return IsoplexFace(n, i, j, "simplex", inc, None, iso)
    for i2 in range(n - 1):
        iso = find_isomorphism(inc.domain, isoplex(n - 1, i2, D).body)
        if iso is not None:
            return IsoplexFace(n, i, j, "isoplex", inc, i2, iso)
    raise ValidationError(f"face d_{j} of the ({n},{i}) isoplex matched no lower isoplex")


# ---------------------------------------------------------------------------
# cell decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageCell:
    sigma: object                     # nondegenerate k-simplex of Y
    index: int                        # position of the narrow vertex in sigma


@dataclass(frozen=True)
class Stage:
    """One pushout of a coproduct of iso-horn inclusions.

    ``before``/``after`` are the intermediate objects as subcomplexes of
    J x Y; ``square`` replays the attachment as a genuine pushout.
    """

    k: int
    cells: tuple
    horn_coproduct: TruncatedSimplicialSet
    plex_coproduct: TruncatedSimplicialSet
    horn_inclusion: Inclusion
    attach: SimplicialMap
    cell_map: SimplicialMap
    before: Inclusion
    after: Inclusion
    square: PushoutSquareWitness

    @property
    def ok(self) -> bool:
        return self.square.ok


@dataclass(frozen=True)
class CellDecomposition:
    """The skeletal filtration witnessing a single-narrow-vertex widening."""

    inner: Inclusion
    vertex: object
    ambient: TruncatedSimplicialSet   # J x Y
    start: Inclusion                  # ({0} x Y) u W_y(X) -> ambient
    target: Inclusion                 # W_y(Y) -> ambient
    prestage: Optional[Stage]
    stages: tuple
    counts: dict                      # |N_k| for 1 <= k <= stage bound
    leftover: dict                    # |N_k| beyond the stage bound (unattached)
    truncated: bool
    sound_dim: int                    # final agrees with target up to here
    final: Inclusion
    checks: tuple

    @property
    def ok(self) -> bool:
        return (all_ok(self.checks)
                and (self.prestage is None or self.prestage.ok)
                and all(s.ok for s in self.stages))

    def total_cells(self) -> int:
        pre = len(self.prestage.cells) if self.prestage is not None else 0
        return pre + sum(len(s.cells) for s in self.stages)


def _classifying_images(Y, k, sigma):
    """Map (a, t) in J x Delta[k] to (a, sigma(t)) in J x Y, memoized on t."""
    cache = {}

    def image(label):
        a, t = label
        got = cache.get(t)
        if got is None:
            got = apply_operator(Y, k, sigma, t)
            cache[t] = got
        return (a, got)

    return image


def _attach_stage(Y, ambient, k, cells, horns, before_incl, target_labels,
                  tag) -> Stage:
    """Build and replay one stage attaching the given iso-horn cells."""
    D = Y.truncation_dim
    horn_cop, _ = coproduct([h.body for h in horns])
    plex_cop, _ = coproduct([h.plex.body for h in horns])
    horn_comp = {m: {lbl: lbl for lbl in horn_cop.simplices_at(m)}
                 for m in range(D + 1)}
    horn_inclusion = Inclusion(horn_cop, plex_cop, horn_comp)

    images = [_classifying_images(Y, k, cell.sigma) for cell in cells]

    before = before_incl.domain
    attach_comp, cell_comp = {}, {}
    new_labels = [set(before.simplices_at(m)) for m in range(D + 1)]
    for m in range(D + 1):
        atab, ctab = {}, {}
        before_have = before.simplex_set(m)
        target_have = target_labels[m]
        for (idx, lbl) in plex_cop.simplices_at(m):
            out = images[idx](lbl)
            if out not in target_have:
                raise ValidationError(
                    f"{tag}: cell image {fmt(out)} escapes the widening")
            ctab[(idx, lbl)] = out
            new_labels[m].add(out)
            if horn_cop.has_simplex(m, (idx, lbl)):
                if out not in before_have:
                    raise ValidationError(
                        f"{tag}: attaching image {fmt(out)} not yet present")
                atab[(idx, lbl)] = out
        attach_comp[m] = atab
        cell_comp[m] = ctab
    after_incl = subcomplex(ambient, [sorted(s, key=sort_key) for s in new_labels])
    after = after_incl.domain
    attach = SimplicialMap(horn_cop, before, attach_comp)
    cell_map = SimplicialMap(plex_cop, after, cell_comp)
    right = corestrict_map(before_incl, after_incl)
    square = _replay_pushout_square(horn_inclusion, attach, cell_map, right, tag)
    return Stage(k, tuple(cells), horn_cop, plex_cop, horn_inclusion, attach,
                 cell_map, before_incl, after_incl, square)


def decompose_single_narrow(inner: Inclusion, y, D: Optional[int] = None) -> CellDecomposition:
    """Decompose the inclusion widened at the narrow vertex y into iso-horn cells.

    Stages run for k from 1 to min(dim of Y's nondegenerate simplices, D-1),
    attaching one (k+1)-dimensional isoplex per nondegenerate k-simplex of Y
    that contains y and is not in X; when y is not in X, a preliminary stage
    glues a copy of J at y (a pushout of the (1,0) iso-horn inclusion).
    Cells beyond the bound are counted in ``leftover`` and flagged truncated.
    """
    Y = inner.codomain
    if D is not None and D != Y.truncation_dim:
        raise UsageError("D must match the truncation of the codomain")
    D = Y.truncation_dim
    if not Y.has_simplex(0, y):
        raise UsageError(f"unknown vertex {fmt(y)}")
    witness = narrow_witness(Y, y)
    if witness is not None:
        raise NotNarrowError(y, witness)

    w = widened_inclusion(inner, [y])
    ambient = w.widening.ambient
    start = w.domain_inclusion
    target = w.widening.result
    target_labels = [target.domain.simplex_set(m) for m in range(D + 1)]
    ximg = [set(s) for s in w.inner_image]

    prestage = None
    current = start
    if y not in ximg[0]:
        cell = StageCell(y, 0)
        prestage = _attach_stage(Y, ambient, 0, [cell], [isohorn(1, 0, D)],
                                 current, target_labels, "prestage")
        current = prestage.after
        for m in range(D + 1):
            ximg[m].add(apply_operator(Y, 0, y, tuple(0 for _ in range(m + 1))))

    k_hi = min(Y.max_nondegenerate_dim(), D - 1) if D >= 1 else 0
    counts, stages = {}, []
    for k in range(1, k_hi + 1):
        cells = []
        for sigma in Y.nondegenerate(k):
            if sigma in ximg[k]:
                continue
            verts = Y.vertex_tuple(k, sigma)
            hits = verts.count(y)
            if hits == 0:
                continue
            if hits > 1:
                raise NotNarrowError(y, (k, sigma))
            cells.append(StageCell(sigma, verts.index(y)))
        counts[k] = len(cells)
        if not cells:
            continue
        horns = [isohorn(k + 1, c.index, D) for c in cells]
        stage = _attach_stage(Y, ambient, k, cells, horns, current,
                              target_labels, f"stage-k{k}")
        stages.append(stage)
        current = stage.after

    leftover = {}
    for k in range(k_hi + 1, D + 1):
        n = 0
        for sigma in Y.nondegenerate(k):
            if sigma not in ximg[k] and y in Y.vertex_tuple(k, sigma):
                n += 1
        if n:
            leftover[k] = n
    truncated = bool(leftover)
    sound_dim = k_hi if truncated else D

    checks = []
    final = current
    same_low = all(final.domain.simplex_set(m) == target_labels[m]
                   for m in range(min(sound_dim, D) + 1))
    subset = all(final.domain.simplex_set(m) <= target_labels[m]
                 for m in range(D + 1))
    checks.append(Check("final-agrees-through-sound-dim", same_low,
                        f"dims 0..{sound_dim}"))
    checks.append(Check("final-inside-target", subset))
    if not truncated:
        checks.append(Check("final-equals-target",
                            all(final.domain.simplex_set(m) == target_labels[m]
                                for m in range(D + 1))))
    return CellDecomposition(inner, y, ambient, start, target, prestage,
                             tuple(stages), counts, leftover, truncated,
                             sound_dim, final, tuple(checks))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_decomposition(d: CellDecomposition) -> ValidationReport:
    """Re-validate every square, chain inclusion, and the final comparison.

    Everything is recomputed from the recorded raw data: attaching maps are
    revalidated, every pushout square is replayed through the kernel pushout,
    and the final object is compared against the direct widening-of-skeleton
    construction.
    """
    bad = []
    Y = d.inner.codomain
    D = Y.truncation_dim

    witness = narrow_witness(Y, d.vertex)
    if witness is not None:
        bad.append(Violation("narrow-vertex", fmt(witness[1])))

    all_stages = ([] if d.prestage is None else [d.prestage]) + list(d.stages)
    prev = d.start
    for stage in all_stages:
        tag = "prestage" if stage.k == 0 else f"stage-k{stage.k}"
        if stage.before.domain != prev.domain:
            bad.append(Violation("chain", f"{tag}: before-object mismatch"))
        prev = stage.after
        for m in range(D + 1):
            if not stage.before.domain.simplex_set(m) <= stage.after.domain.simplex_set(m):
                bad.append(Violation("chain", f"{tag}: not an inclusion at dim {m}"))
        for cell in stage.cells:
            if stage.k == 0:
                continue
            verts = Y.vertex_tuple(stage.k, cell.sigma)
            if verts.count(d.vertex) != 1 or verts.index(d.vertex) != cell.index:
                bad.append(Violation("cell-index", f"{tag}: {fmt(cell.sigma)}"))
        if not validate_map(stage.attach).ok:
            bad.append(Violation("attach-simplicial", tag))
        if not validate_map(stage.cell_map).ok:
            bad.append(Violation("cell-map-simplicial", tag))
        fresh_right = corestrict_map(stage.before, stage.after)
        fresh = _replay_pushout_square(stage.horn_inclusion, stage.attach,
                                       stage.cell_map, fresh_right, tag)
        for c in fresh.checks:
            if not c.ok:
                bad.append(Violation("pushout-square", c.name))

    # cell census, recomputed independently of the recorded stages
    ximg = [set(s) for s in d.inner.image_labels()]
    if d.prestage is not None:
        for m in range(D + 1):
            ximg[m].add(apply_operator(Y, 0, d.vertex,
                                       tuple(0 for _ in range(m + 1))))
    for k, recorded in sorted(d.counts.items()):
        live = [s for s in Y.nondegenerate(k)
                if s not in ximg[k] and d.vertex in Y.vertex_tuple(k, s)]
        if len(live) != recorded:
            bad.append(Violation("cell-census", f"k={k}: {len(live)} != {recorded}"))

    # final object against the direct construction: start u W_y(sk_k Y)
    k_last = max([s.k for s in d.stages], default=0)
    sk = skeleton(Y, k_last) if k_last <= D else None
    if sk is not None:
        expect = []
        for m in range(D + 1):
            keep = set(d.start.domain.simplex_set(m))
            sk_labels = sk.domain.simplex_set(m)
            keep.update((a, s) for (a, s) in d.target.domain.simplices_at(m)
                        if s in sk_labels)
            expect.append(keep)
        for m in range(D + 1):
            if d.final.domain.simplex_set(m) != expect[m]:
                bad.append(Violation("final-object",
                                     f"dim {m}: replay differs from the "
                                     f"widened-skeleton construction"))
    for m in range(min(d.sound_dim, D) + 1):
        if d.final.domain.simplex_set(m) != d.target.domain.simplex_set(m):
            bad.append(Violation("final-vs-target", f"dim {m}"))
    if not d.truncated:
        for m in range(D + 1):
            if d.final.domain.simplex_set(m) != d.target.domain.simplex_set(m):
                bad.append(Violation("final-vs-target", f"dim {m} (complete case)"))
    return ValidationReport("cell-decomposition", tuple(bad))
