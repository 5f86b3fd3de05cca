"""Pushout-products, the generating class, and brute-force lifting checks.

``solve_lift`` answers a single lifting problem by backtracking over the
nondegenerate simplices of the codomain that lie outside the subobject, in
increasing (dimension, label) order; candidate images are filtered by their
already-assigned boundary and by the base map, degenerate images are forced.
A returned lift is exact; NO_LIFT is sound as a statement about dimensions up
to the truncation only.

``check_rlp`` enumerates, with the same engine, every map from a horn (or
generating-class domain) into the target and asks for a filler; the verdicts
are aggregated into an :class:`RlpReport` whose truncation caveat is a field,
not prose.  ``oracle_finds_lift`` is the deliberately independent slow check:
it enumerates full dimensionwise assignments (degenerate cells included) and
verifies every face and degeneracy equation directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .kernel import (
    Inclusion,
    SimplicialMap,
    SsetError,
    TruncatedSimplicialSet,
    UsageError,
    boundary_inclusion,
    compose_maps,
    make_empty,
    make_terminal,
    product,
    subcomplex,
    terminal_map,
    validate_map,
    vertex_zero_inclusion,
)
from .labels import sort_key

NO_LIFT = None


class OracleInfeasible(SsetError):
    """The exhaustive oracle would exceed its enumeration cap."""


# ---------------------------------------------------------------------------
# pushout-products and the generating class
# ---------------------------------------------------------------------------


def pushout_product(f: Inclusion, g: Inclusion) -> Inclusion:
    """(Z x A) u (W x B) into Z x B, for f: A -> B and g: W -> Z.

    The product order is fixed by this signature; the two orders agree up to
    the swap pairing (see the commutativity test).
    """
    if not isinstance(f, Inclusion) or not isinstance(g, Inclusion):
        raise UsageError("pushout_product requires inclusions")
    B, Z = f.codomain, g.codomain
    if B.truncation_dim != Z.truncation_dim:
        raise UsageError("pushout_product requires equal truncation dims")
    D = B.truncation_dim
    a_img = f.image_labels()
    w_img = g.image_labels()
    ambient = product(Z, B)
    labels = []
    for n in range(D + 1):
        labels.append([(z, b) for (z, b) in ambient.simplices_at(n)
                       if b in a_img[n] or z in w_img[n]])
    return subcomplex(ambient, labels)


def class_A(n: int, D: int) -> Inclusion:
    """(J x bdry Delta[n]) u ({0} x Delta[n]) into J x Delta[n]."""
    if n < 0:
        raise UsageError("class index must be >= 0")
    return pushout_product(boundary_inclusion(n, D), vertex_zero_inclusion(D))


# ---------------------------------------------------------------------------
# lifting problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftingProblem:
    """A commutative square awaiting a diagonal B -> X.

    left: A -> B (an inclusion), right: X -> Y, top: A -> X, bottom: B -> Y,
    with right o top == bottom o left.
    """

    left: Inclusion
    right: SimplicialMap
    top: SimplicialMap
    bottom: SimplicialMap

    def validate(self):
        if self.top.domain != self.left.domain:
            raise UsageError("top and left must share their domain")
        if self.bottom.domain != self.left.codomain:
            raise UsageError("bottom must start at the left codomain")
        if self.top.codomain != self.right.domain:
            raise UsageError("top must land in the right domain")
        if self.bottom.codomain != self.right.codomain:
            raise UsageError("bottom must land in the right codomain")
        lhs = compose_maps(self.right, self.top)
        rhs = compose_maps(self.bottom, self.left)
        if not lhs.equal(rhs):
            raise UsageError("lifting square does not commute")

    def is_lift(self, ell: SimplicialMap) -> bool:
        return (validate_map(ell).ok
                and compose_maps(ell, self.left).equal(self.top)
                and compose_maps(self.right, ell).equal(self.bottom))


def fibrancy_problem(incl: Inclusion, u: SimplicialMap,
                     X: TruncatedSimplicialSet) -> LiftingProblem:
    """The square testing whether u: dom(incl) -> X extends over cod(incl)."""
    D = X.truncation_dim
    pt = make_terminal(D)
    return LiftingProblem(incl, terminal_map(X, pt), u,
                          terminal_map(incl.codomain, pt))


# ---------------------------------------------------------------------------
# the backtracking engine
# ---------------------------------------------------------------------------


class _Engine:
    """Shared machinery for solving one square and for enumerating maps."""

    def __init__(self, p: LiftingProblem):
        p.validate()
        self.p = p
        B = p.left.codomain
        X = p.right.domain
        self.B, self.X = B, X
        D = B.truncation_dim
        self.D = D

        self.known = [dict() for _ in range(D + 1)]
        for n in range(D + 1):
            for a, b in p.left.component[n].items():
                self.known[n][b] = p.top.component[n][a]

        # smallest (j, parent) expressing each degenerate simplex
        self.strip = [dict() for _ in range(D + 1)]
        for n in range(1, D + 1):
            tab = self.strip[n]
            for j in range(n):
                smap = B.degeneracy_maps[(n - 1, j)]
                for parent in B.simplices_at(n - 1):
                    tab.setdefault(smap[parent], (j, parent))

        self.cells = []
        for n in range(D + 1):
            in_a = self.known[n]
            for b in B.nondegenerate(n):
                if b not in in_a:
                    self.cells.append((n, b))
        self.pos = {c: k for k, c in enumerate(self.cells)}

        # candidate index: (boundary faces, image under right) -> simplices
        self.index = [dict() for _ in range(D + 1)]
        for n in range(D + 1):
            idx = self.index[n]
            for x in X.simplices_at(n):
                key = (X.faces(n, x) if n else (), p.right.component[n][x])
                idx.setdefault(key, []).append(x)

        # forward checking: a cell watches the unknown cores of its faces
        self.watchers = {c: [] for c in self.cells}
        self.dep_count = {}
        for (n, b) in self.cells:
            if n == 0:
                self.dep_count[(n, b)] = 0
                continue
            deps = set()
            for i in range(n + 1):
                core = self._core(n - 1, B.face(n, i, b))
                if core in self.pos:
                    deps.add(core)
            self.dep_count[(n, b)] = len(deps)
            for dcell in deps:
                self.watchers[dcell].append((n, b))

        self.assign = [dict() for _ in range(D + 1)]

    def _core(self, n, b):
        while True:
            got = self.strip[n].get(b)
            if got is None or b in self.known[n]:
                return (n, b)
            _, b = got[0], got[1]
            n -= 1

    def value(self, n, b):
        got = self.known[n].get(b)
        if got is not None:
            return got
        got = self.assign[n].get(b)
        if got is not None:
            return got
        j, parent = self.strip[n][b]
        return self.X.degeneracy(n - 1, j, self.value(n - 1, parent))

    def candidates(self, n, b):
        faces = (tuple(self.value(n - 1, self.B.face(n, i, b))
                       for i in range(n + 1)) if n else ())
        key = (faces, self.p.bottom.component[n][b])
        return self.index[n].get(key, ())

    def _materialize(self) -> SimplicialMap:
        comp = {n: {b: self.value(n, b) for b in self.B.simplices_at(n)}
                for n in range(self.D + 1)}
        return SimplicialMap(self.B, self.X, comp)

    def lifts(self) -> Iterator[SimplicialMap]:
        """All lifts, in the deterministic assignment order."""
        cells, dep_count = self.cells, self.dep_count

        def search(k: int) -> Iterator[SimplicialMap]:
            if k == len(cells):
                yield self._materialize()
                return
            n, b = cells[k]
            for x in self.candidates(n, b):
                self.assign[n][b] = x
                feasible = True
                touched = []
                for watcher in self.watchers[(n, b)]:
                    dep_count[watcher] -= 1
                    touched.append(watcher)
                    if dep_count[watcher] == 0 and not self.candidates(*watcher):
                        feasible = False
                if feasible:
                    yield from search(k + 1)
                for watcher in touched:
                    dep_count[watcher] += 1
                del self.assign[n][b]

        yield from search(0)


def iter_lifts(p: LiftingProblem) -> Iterator[SimplicialMap]:
    return _Engine(p).lifts()


def solve_lift(p: LiftingProblem) -> Optional[SimplicialMap]:
    """The first lift in (dimension, label)/candidate order, or NO_LIFT."""
    for ell in iter_lifts(p):
        return ell
    return NO_LIFT


def enumerate_maps(H: TruncatedSimplicialSet,
                   X: TruncatedSimplicialSet) -> Iterator[SimplicialMap]:
    """All simplicial maps H -> X, via the same engine with empty subobject."""
    D = H.truncation_dim
    empty = make_empty(D)
    left = Inclusion(empty, H, {n: {} for n in range(D + 1)})
    pt = make_terminal(D)
    top = SimplicialMap(empty, X, {n: {} for n in range(D + 1)})
    problem = LiftingProblem(left, terminal_map(X, pt), top, terminal_map(H, pt))
    return iter_lifts(problem)


# ---------------------------------------------------------------------------
# the slow oracle
# ---------------------------------------------------------------------------


def oracle_finds_lift(p: LiftingProblem, level_cap: int = 2_000_000) -> bool:
    """Exhaustive dimensionwise search, independent of the fast engine.

    Assigns every simplex of B outside A (degenerate ones included) to an
    arbitrary simplex of X of the same dimension, level by level, keeping the
    assignments that satisfy all face equations, all degeneracy equations,
    and the base-map condition.  Feasible for small unknown counts only; the
    per-level cap raises OracleInfeasible instead of silently giving up.
    """
    p.validate()
    B, X = p.left.codomain, p.right.domain
    D = B.truncation_dim
    known = [dict() for _ in range(D + 1)]
    for n in range(D + 1):
        for a, b in p.left.component[n].items():
            known[n][b] = p.top.component[n][a]
    unknowns = [[b for b in B.simplices_at(n) if b not in known[n]]
                for n in range(D + 1)]
    pins = [dict() for _ in range(D + 1)]
    for n in range(D):
        for i in range(n + 1):
            for parent, child in B.degeneracy_maps[(n, i)].items():
                pins[n + 1].setdefault(child, []).append((i, parent))

    def level_values(n, values):
        out = []
        for b in unknowns[n]:
            want_bottom = p.bottom.component[n][b]
            want_faces = ([values[n - 1][B.face(n, i, b)] for i in range(n + 1)]
                          if n else None)
            forced = None
            ok_forced = True
            for (i, parent) in pins[n].get(b, ()):
                cand = X.degeneracy(n - 1, i, values[n - 1][parent])
                if forced is None:
                    forced = cand
                elif forced != cand:
                    ok_forced = False
            if not ok_forced:
                return None
            opts = []
            for x in ([forced] if forced is not None else X.simplices_at(n)):
                if p.right.component[n][x] != want_bottom:
                    continue
                if n and [X.face(n, i, x) for i in range(n + 1)] != want_faces:
                    continue
                opts.append(x)
            if not opts:
                return None
            out.append(opts)
        return out

    def search(n, values):
        if n > D:
            return True
        opts = level_values(n, values)
        if opts is None:
            return False
        total = 1
        for o in opts:
            total *= len(o)
            if total > level_cap:
                raise OracleInfeasible(
                    f"level {n} would enumerate more than {level_cap} assignments")
        for choice in itertools.product(*opts):
            values.append(dict(known[n]))
            values[n].update(zip(unknowns[n], choice))
            if search(n + 1, values):
                return True
            values.pop()
        return False

    return search(0, [])


# ---------------------------------------------------------------------------
# RLP checks and the equivalence report
# ---------------------------------------------------------------------------


FAMILIES = ("iso_horns", "class_A")


def family_members(family: str, N: int, D: int) -> list:
    """The generating maps with index up to N, as (map_id, inclusion) pairs."""
    from .isohorn import isohorn
    if family == "iso_horns":
        out = []
        for n in range(1, N + 1):
            for i in range(n):
                h = isohorn(n, i, D)
                out.append((f"iso_horn({n},{i})", h.inclusion))
        return out
    if family == "class_A":
        return [(f"class_A({n})", class_A(n, D)) for n in range(N + 1)]
    raise UsageError(f"unknown family {family!r}; pick one of {FAMILIES}")


@dataclass(frozen=True)
class MapVerdict:
    map_id: str
    passed: bool
    squares_checked: int
    witness: Optional[LiftingProblem] = None

    def to_jsonable(self):
        from .serialize import map_to_jsonable
        out = {"map": self.map_id,
               "verdict": "pass" if self.passed else "fail",
               "squares_checked": self.squares_checked}
        if self.witness is not None:
            out["witness"] = {
                "left": map_to_jsonable(self.witness.left),
                "top": map_to_jsonable(self.witness.top),
                "right": map_to_jsonable(self.witness.right),
                "bottom": map_to_jsonable(self.witness.bottom),
            }
        return out


@dataclass(frozen=True)
class RlpReport:
    """Aggregated truncated RLP verdicts for one target against one family.

    A pass means "no obstruction up to dimension D"; a fail carries a square
    with no lift, which is exact.  Both caveats are structural fields.
    """

    target: str
    family: str
    max_index: int
    truncation_dim: int
    verdicts: tuple
    pass_is_truncated: bool = True
    negative_is_exact: bool = True

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failures(self) -> list:
        return [v for v in self.verdicts if not v.passed]

    def to_jsonable(self):
        return {"target": self.target,
                "family": self.family,
                "max_index": self.max_index,
                "truncation_dim": self.truncation_dim,
                "passed": self.passed,
                "pass_is_truncated": self.pass_is_truncated,
                "negative_is_exact": self.negative_is_exact,
                "verdicts": [v.to_jsonable() for v in self.verdicts]}


def check_rlp(X: TruncatedSimplicialSet, family: str, N: int,
              target_name: str = "X") -> RlpReport:
    """Test every family map with index <= N against X -> *.

    Squares are enumerated as maps from the family domain into X (the
    terminal components are forced), each one searched for a filler; the
    first unliftable square per family map is kept as the witness.
    """
    D = X.truncation_dim
    if N > D:
        raise UsageError(f"need N <= D, got N={N} > D={D}")
    verdicts = []
    for map_id, incl in family_members(family, N, D):
        squares = 0
        witness = None
        for u in enumerate_maps(incl.domain, X):
            squares += 1
            problem = fibrancy_problem(incl, u, X)
            if solve_lift(problem) is NO_LIFT:
                witness = problem
                break
        verdicts.append(MapVerdict(map_id, witness is None, squares, witness))
    return RlpReport(target_name, family, N, D, tuple(verdicts))


@dataclass(frozen=True)
class EquivalenceRow:
    name: str
    iso_horns: RlpReport
    class_a: RlpReport

    @property
    def agree(self) -> bool:
        return self.iso_horns.passed == self.class_a.passed

    def to_jsonable(self):
        return {"name": self.name,
                "iso_horns_pass": self.iso_horns.passed,
                "class_A_pass": self.class_a.passed,
                "agree": self.agree,
                "iso_horns": self.iso_horns.to_jsonable(),
                "class_A": self.class_a.to_jsonable()}


@dataclass(frozen=True)
class EquivalenceReport:
    """Instance-level comparison of the two fibrancy characterizations."""

    max_index: int
    truncation_dim: int
    rows: tuple

    @property
    def all_agree(self) -> bool:
        return all(r.agree for r in self.rows)

    def disagreements(self) -> list:
        return [r for r in self.rows if not r.agree]

    def to_jsonable(self):
        return {"max_index": self.max_index,
                "truncation_dim": self.truncation_dim,
                "all_agree": self.all_agree,
                "rows": [r.to_jsonable() for r in self.rows]}

    def table(self) -> str:
        width = max([len(r.name) for r in self.rows] + [6])
        lines = [f"{'object':<{width}}  iso_horns  class_A  agree"]
        for r in self.rows:
            lines.append(f"{r.name:<{width}}  "
                         f"{'pass' if r.iso_horns.passed else 'FAIL':<9}  "
                         f"{'pass' if r.class_a.passed else 'FAIL':<7}  "
                         f"{'yes' if r.agree else 'NO'}")
        return "\n".join(lines)


def equivalence_report(corpus: Sequence, N: int) -> EquivalenceReport:
    """Run both families over named objects and report agreement.

    ``corpus`` is a sequence of (name, TruncatedSimplicialSet) pairs; any
    disagreement row keeps both full reports, including the witnesses, so it
    can be replayed rather than ignored.
    """
    rows = []
    D = None
    for name, X in corpus:
        D = X.truncation_dim if D is None else D
        rows.append(EquivalenceRow(
            name,
            check_rlp(X, "iso_horns", N, target_name=name),
            check_rlp(X, "class_A", N, target_name=name)))
    return EquivalenceReport(N, D if D is not None else -1, tuple(rows))
