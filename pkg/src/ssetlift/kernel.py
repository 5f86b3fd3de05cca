"""Finite, dimension-truncated simplicial sets presented by explicit tables.

A :class:`TruncatedSimplicialSet` stores, for every dimension ``0 <= n <= D``,
an ordered table of simplex labels together with total face maps ``d_i``
(``1 <= n``, ``0 <= i <= n``) and degeneracy maps ``s_i`` (``n < D``,
``0 <= i <= n``).  Everything above dimension D is cut off, so constructors
like the interval-groupoid nerve J (which has nondegenerate simplices in every
dimension) return honest D-truncations.  All values are immutable after
construction and all operations are pure functions.

Constructors provided here: standard simplices and boundaries, J, nerves of
finite categories, binary products, full subcomplexes, skeleta, ordinary
horns, pushouts along inclusions, and coproducts.  Validation of the
simplicial identities and of map naturality is mechanical
(:func:`validate_sset`, :func:`validate_map`); constructors do not revalidate
their own output, the test suite does.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .labels import Label, fmt, sort_key


class SsetError(Exception):
    """Base error for this package."""


class UsageError(SsetError):
    """Bad arguments to an operation (maps to CLI exit code 2)."""


class ValidationError(SsetError):
    """A constructed object failed an internal consistency check."""


# ---------------------------------------------------------------------------
# core data types
# ---------------------------------------------------------------------------


class TruncatedSimplicialSet:
    """A simplicial set truncated at dimension ``truncation_dim``.

    ``simplices[n]`` is a sorted tuple of labels; ``face[(n, i)]`` and
    ``degeneracy[(n, i)]`` are dicts (total functions on the corresponding
    table).  Treat instances as immutable values.
    """

    __slots__ = ("truncation_dim", "simplices", "face_maps", "degeneracy_maps",
                 "_vertex_cache", "_nondeg_cache", "_sets_cache")

    def __init__(self, truncation_dim: int,
                 simplices: Sequence[Iterable[Label]],
                 face_maps: dict,
                 degeneracy_maps: dict):
        if truncation_dim < 0:
            raise UsageError("truncation_dim must be >= 0")
        if len(simplices) != truncation_dim + 1:
            raise UsageError("need one simplex table per dimension 0..D")
        self.truncation_dim = truncation_dim
        tables = []
        for n, tab in enumerate(simplices):
            tab = tuple(sorted(tab, key=sort_key))
            if len(set(tab)) != len(tab):
                raise ValidationError(f"duplicate labels in dimension {n}")
            tables.append(tab)
        self.simplices = tuple(tables)
        self.face_maps = face_maps
        self.degeneracy_maps = degeneracy_maps
        self._vertex_cache: dict = {}
        self._nondeg_cache: dict = {}
        self._sets_cache: dict = {}

    # -- basic access -------------------------------------------------------

    def simplices_at(self, n: int) -> tuple:
        if n < 0 or n > self.truncation_dim:
            return ()
        return self.simplices[n]

    def simplex_set(self, n: int) -> frozenset:
        got = self._sets_cache.get(n)
        if got is None:
            got = frozenset(self.simplices_at(n))
            self._sets_cache[n] = got
        return got

    def has_simplex(self, n: int, x: Label) -> bool:
        return x in self.simplex_set(n)

    def face(self, n: int, i: int, x: Label) -> Label:
        return self.face_maps[(n, i)][x]

    def degeneracy(self, n: int, i: int, x: Label) -> Label:
        return self.degeneracy_maps[(n, i)][x]

    def faces(self, n: int, x: Label) -> tuple:
        return tuple(self.face_maps[(n, i)][x] for i in range(n + 1))

    @property
    def is_empty(self) -> bool:
        return not self.simplices[0]

    def size(self) -> int:
        return sum(len(t) for t in self.simplices)

    # -- derived structure --------------------------------------------------

    def vertex_tuple(self, n: int, x: Label) -> tuple:
        """The ordered tuple of vertices of an n-simplex."""
        key = (n, x)
        got = self._vertex_cache.get(key)
        if got is not None:
            return got
        if n == 0:
            out = (x,)
        else:
            tail = self.vertex_tuple(n - 1, self.face(n, 0, x))
            head = self.vertex_tuple(n - 1, self.face(n, n, x))
            out = (head[0],) + tail
        self._vertex_cache[key] = out
        return out

    def degenerate_labels(self, n: int) -> frozenset:
        """Labels in dimension n that are images of some degeneracy."""
        if n <= 0 or n > self.truncation_dim:
            return frozenset()
        out = set()
        for i in range(n):
            out.update(self.degeneracy_maps[(n - 1, i)].values())
        return frozenset(out)

    def nondegenerate(self, n: int) -> tuple:
        got = self._nondeg_cache.get(n)
        if got is None:
            degen = self.degenerate_labels(n)
            got = tuple(x for x in self.simplices_at(n) if x not in degen)
            self._nondeg_cache[n] = got
        return got

    def max_nondegenerate_dim(self) -> int:
        """Largest n <= D with a nondegenerate n-simplex (-1 if empty)."""
        for n in range(self.truncation_dim, -1, -1):
            if self.nondegenerate(n):
                return n
        return -1

    # -- value semantics ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSimplicialSet):
            return NotImplemented
        return (self.truncation_dim == other.truncation_dim
                and self.simplices == other.simplices
                and self.face_maps == other.face_maps
                and self.degeneracy_maps == other.degeneracy_maps)

    def __hash__(self):
        raise TypeError("TruncatedSimplicialSet is not hashable")

    def __repr__(self):
        counts = ",".join(str(len(t)) for t in self.simplices)
        return f"<TruncatedSimplicialSet D={self.truncation_dim} |X_n|=({counts})>"


class SimplicialMap:
    """A dimensionwise function commuting with faces and degeneracies.

    ``component[n]`` maps domain n-simplex labels to codomain labels.
    Naturality is not checked at construction; use :func:`validate_map`.
    """

    __slots__ = ("domain", "codomain", "component")

    def __init__(self, domain: TruncatedSimplicialSet,
                 codomain: TruncatedSimplicialSet,
                 component: dict):
        if domain.truncation_dim != codomain.truncation_dim:
            raise UsageError("domain and codomain must share truncation_dim")
        self.domain = domain
        self.codomain = codomain
        self.component = component

    def __call__(self, n: int, x: Label) -> Label:
        return self.component[n][x]

    def at(self, n: int) -> dict:
        return self.component[n]

    def is_injective(self) -> bool:
        for n in range(self.domain.truncation_dim + 1):
            comp = self.component[n]
            if len(set(comp.values())) != len(comp):
                return False
        return True

    def is_bijective(self) -> bool:
        if not self.is_injective():
            return False
        for n in range(self.domain.truncation_dim + 1):
            if len(self.component[n]) != len(self.codomain.simplices_at(n)):
                return False
        return True

    def image_labels(self) -> list:
        """Per-dimension frozensets of image labels (always a subcomplex)."""
        return [frozenset(self.component[n].values())
                for n in range(self.domain.truncation_dim + 1)]

    def equal(self, other: "SimplicialMap") -> bool:
        return (self.domain == other.domain and self.codomain == other.codomain
                and self.component == other.component)

    def __repr__(self):
        return f"<SimplicialMap D={self.domain.truncation_dim}>"


class Inclusion(SimplicialMap):
    """A SimplicialMap that is injective in every dimension."""

    def __init__(self, domain, codomain, component):
        super().__init__(domain, codomain, component)
        for n in range(domain.truncation_dim + 1):
            comp = self.component[n]
            if len(set(comp.values())) != len(comp):
                raise ValidationError(f"inclusion not injective in dimension {n}")

    def __repr__(self):
        return f"<Inclusion D={self.domain.truncation_dim}>"


def identity_map(X: TruncatedSimplicialSet) -> Inclusion:
    comp = {n: {x: x for x in X.simplices_at(n)}
            for n in range(X.truncation_dim + 1)}
    return Inclusion(X, X, comp)


def compose_maps(g: SimplicialMap, f: SimplicialMap) -> SimplicialMap:
    """g after f.  Result is an Inclusion when both are."""
    if f.codomain != g.domain:
        raise UsageError("compose_maps: codomain/domain mismatch")
    comp = {n: {x: g.component[n][y] for x, y in f.component[n].items()}
            for n in range(f.domain.truncation_dim + 1)}
    cls = Inclusion if isinstance(f, Inclusion) and isinstance(g, Inclusion) else SimplicialMap
    return cls(f.domain, g.codomain, comp)


def restrict_map(f: SimplicialMap, incl: Inclusion) -> SimplicialMap:
    """Restrict f along a subobject inclusion into its domain."""
    return compose_maps(f, incl)


def corestrict_map(f: SimplicialMap, sub: "Inclusion") -> SimplicialMap:
    """Restrict the codomain of f to a subcomplex containing its image."""
    comp = {}
    for n in range(f.domain.truncation_dim + 1):
        tab = {}
        allowed = sub.domain.simplex_set(n)
        for x, y in f.component[n].items():
            if y not in allowed:
                raise UsageError(f"corestrict: image simplex {fmt(y)} escapes subcomplex")
            tab[x] = y
        comp[n] = tab
    cls = Inclusion if isinstance(f, Inclusion) else SimplicialMap
    return cls(f.domain, sub.domain, comp)


# ---------------------------------------------------------------------------
# subcomplexes
# ---------------------------------------------------------------------------


def subcomplex(X: TruncatedSimplicialSet, labels: Sequence[Iterable[Label]]) -> Inclusion:
    """The subcomplex of X on the given per-dimension label sets.

    Raises ValidationError if the label sets are not closed under faces and
    degeneracies.
    """
    D = X.truncation_dim
    sets = [frozenset(labels[n]) if n < len(labels) else frozenset()
            for n in range(D + 1)]
    for n, chosen in enumerate(sets):
        unknown = chosen - X.simplex_set(n)
        if unknown:
            raise UsageError(f"unknown simplex labels in dimension {n}: "
                             f"{sorted(map(fmt, unknown))}")
    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            tab = {}
            for x in sets[n]:
                y = X.face(n, i, x)
                if y not in sets[n - 1]:
                    raise ValidationError(
                        f"label set not face-closed: d_{i}{fmt(x)} = {fmt(y)} missing")
                tab[x] = y
            face_maps[(n, i)] = tab
    for n in range(D):
        for i in range(n + 1):
            tab = {}
            for x in sets[n]:
                y = X.degeneracy(n, i, x)
                if y not in sets[n + 1]:
                    raise ValidationError(
                        f"label set not degeneracy-closed: s_{i}{fmt(x)} missing")
                tab[x] = y
            degeneracy_maps[(n, i)] = tab
    sub = TruncatedSimplicialSet(D, [sorted(s, key=sort_key) for s in sets],
                                 face_maps, degeneracy_maps)
    comp = {n: {x: x for x in sub.simplices_at(n)} for n in range(D + 1)}
    return Inclusion(sub, X, comp)


def full_subcomplex(X: TruncatedSimplicialSet, vertices: Iterable[Label]) -> Inclusion:
    """Inclusion of the full subcomplex on a set of vertices.

    Keeps exactly the simplices all of whose vertices lie in the given set;
    such a collection is automatically closed under faces and degeneracies.
    """
    vset = frozenset(vertices)
    unknown = vset - X.simplex_set(0)
    if unknown:
        raise UsageError(f"unknown vertex labels: {sorted(map(fmt, unknown))}")
    labels = []
    for n in range(X.truncation_dim + 1):
        labels.append([x for x in X.simplices_at(n)
                       if all(v in vset for v in X.vertex_tuple(n, x))])
    return subcomplex(X, labels)


def skeleton(X: TruncatedSimplicialSet, k: int) -> Inclusion:
    """Inclusion of the k-skeleton: generated by nondegenerates of dim <= k."""
    D = X.truncation_dim
    if k < 0 or k > D:
        raise UsageError(f"skeleton index {k} out of range 0..{D}")
    labels = [set(X.simplices_at(n)) for n in range(min(k, D) + 1)]
    for n in range(k + 1, D + 1):
        prev = labels[n - 1]
        cur = set()
        for i in range(n):
            tab = X.degeneracy_maps[(n - 1, i)]
            cur.update(tab[x] for x in prev)
        labels.append(cur)
    return subcomplex(X, labels)


def union_subcomplexes(X: TruncatedSimplicialSet,
                       parts: Iterable[Inclusion]) -> Inclusion:
    """Union, inside a common ambient X, of subcomplex inclusions into X."""
    D = X.truncation_dim
    labels = [set() for _ in range(D + 1)]
    for inc in parts:
        if inc.codomain != X:
            raise UsageError("union_subcomplexes: parts must include into the ambient")
        for n in range(D + 1):
            labels[n].update(inc.component[n].values())
    return subcomplex(X, labels)


def intersect_subcomplexes(X: TruncatedSimplicialSet,
                           parts: Sequence[Inclusion]) -> Inclusion:
    if not parts:
        raise UsageError("intersect_subcomplexes: need at least one part")
    D = X.truncation_dim
    labels = []
    for n in range(D + 1):
        s = set(parts[0].component[n].values())
        for inc in parts[1:]:
            s &= set(inc.component[n].values())
        labels.append(s)
    return subcomplex(X, labels)


def image_subcomplex(f: SimplicialMap) -> Inclusion:
    """The image of a map as a subcomplex of its codomain."""
    return subcomplex(f.codomain, [sorted(s, key=sort_key) for s in f.image_labels()])


# ---------------------------------------------------------------------------
# standard objects
# ---------------------------------------------------------------------------


def _monotone_tuples(length: int, top: int):
    return itertools.combinations_with_replacement(range(top + 1), length)


def _tuple_tables(D: int, tables):
    """Face/degeneracy maps for label schemes where d_i drops and s_i repeats."""
    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            face_maps[(n, i)] = {t: t[:i] + t[i + 1:] for t in tables[n]}
    for n in range(D):
        for i in range(n + 1):
            degeneracy_maps[(n, i)] = {t: t[:i + 1] + t[i:] for t in tables[n]}
    return face_maps, degeneracy_maps


def make_delta(n: int, D: int) -> TruncatedSimplicialSet:
    """The standard n-simplex: m-simplices are monotone tuples over 0..n."""
    if n < 0:
        raise UsageError("simplex dimension must be >= 0")
    if D < 0:
        raise UsageError("truncation must be >= 0")
    tables = [tuple(_monotone_tuples(m + 1, n)) for m in range(D + 1)]
    face_maps, degeneracy_maps = _tuple_tables(D, tables)
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def make_boundary(n: int, D: int) -> TruncatedSimplicialSet:
    """The boundary of the standard n-simplex (empty when n = 0)."""
    if n < 0:
        raise UsageError("simplex dimension must be >= 0")
    if D < 0:
        raise UsageError("truncation must be >= 0")
    full = frozenset(range(n + 1))
    tables = [tuple(t for t in _monotone_tuples(m + 1, n) if frozenset(t) != full)
              for m in range(D + 1)]
    face_maps, degeneracy_maps = _tuple_tables(D, tables)
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def make_horn(n: int, k: int, D: int) -> TruncatedSimplicialSet:
    """The ordinary horn: union of the faces of Delta[n] other than the k-th.

    A monotone tuple belongs iff its value set misses some j != k.
    """
    if not 0 <= k <= n:
        raise UsageError("horn index out of range")
    if D < 0:
        raise UsageError("truncation must be >= 0")
    others = [frozenset(range(n + 1)) - {j} for j in range(n + 1) if j != k]
    tables = [tuple(t for t in _monotone_tuples(m + 1, n)
                    if any(frozenset(t) <= s for s in others))
              for m in range(D + 1)]
    face_maps, degeneracy_maps = _tuple_tables(D, tables)
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def make_J(D: int) -> TruncatedSimplicialSet:
    """The nerve of the free-living isomorphism, truncated at D.

    n-simplices are exactly the bit tuples of length n+1; the nondegenerate
    ones are the two alternating tuples in each positive dimension.
    """
    if D < 0:
        raise UsageError("truncation must be >= 0")
    tables = [tuple(itertools.product((0, 1), repeat=m + 1)) for m in range(D + 1)]
    face_maps, degeneracy_maps = _tuple_tables(D, tables)
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def make_terminal(D: int) -> TruncatedSimplicialSet:
    """The terminal object: exactly one simplex per dimension."""
    tables = [("*",) for _ in range(D + 1)]
    face_maps = {(n, i): {"*": "*"} for n in range(1, D + 1) for i in range(n + 1)}
    degeneracy_maps = {(n, i): {"*": "*"} for n in range(D) for i in range(n + 1)}
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def make_empty(D: int) -> TruncatedSimplicialSet:
    face_maps = {(n, i): {} for n in range(1, D + 1) for i in range(n + 1)}
    degeneracy_maps = {(n, i): {} for n in range(D) for i in range(n + 1)}
    return TruncatedSimplicialSet(D, [() for _ in range(D + 1)],
                                  face_maps, degeneracy_maps)


def terminal_map(X: TruncatedSimplicialSet,
                 terminal: Optional[TruncatedSimplicialSet] = None) -> SimplicialMap:
    pt = terminal if terminal is not None else make_terminal(X.truncation_dim)
    comp = {n: {x: "*" for x in X.simplices_at(n)}
            for n in range(X.truncation_dim + 1)}
    return SimplicialMap(X, pt, comp)


def make_standard(kind: str, n: Optional[int] = None, D: int = 0) -> TruncatedSimplicialSet:
    """Dispatch for the three standard constructors.

    kind is one of ``simplex``, ``boundary``, ``interval_groupoid_nerve``;
    the first two require n.
    """
    if D < 0:
        raise UsageError("truncation must be >= 0")
    if kind == "simplex":
        if n is None:
            raise UsageError("kind=simplex requires n")
        return make_delta(n, D)
    if kind == "boundary":
        if n is None:
            raise UsageError("kind=boundary requires n")
        return make_boundary(n, D)
    if kind == "interval_groupoid_nerve":
        return make_J(D)
    raise UsageError(f"unknown kind {kind!r}")


def boundary_inclusion(n: int, D: int) -> Inclusion:
    """The boundary inclusion of the standard n-simplex (shared labels)."""
    delta = make_delta(n, D)
    bdry = make_boundary(n, D)
    comp = {m: {t: t for t in bdry.simplices_at(m)} for m in range(D + 1)}
    return Inclusion(bdry, delta, comp)


def vertex_zero_inclusion(D: int) -> Inclusion:
    """{0} into J: the full subcomplex of J on the vertex (0,)."""
    return full_subcomplex(make_J(D), [(0,)])


# ---------------------------------------------------------------------------
# finite categories and nerves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteCategory:
    """Objects, named morphisms with source/target, and a composition table.

    ``compose[(g, f)]`` is the name of g∘f, defined exactly when
    ``target(f) == source(g)``.  ``identity[x]`` names the identity at x.
    """

    objects: tuple
    morphisms: dict          # name -> (src, tgt)
    identity: dict           # object -> name
    compose: dict            # (gname, fname) -> name

    def src(self, f):
        return self.morphisms[f][0]

    def tgt(self, f):
        return self.morphisms[f][1]


def validate_category(C: FiniteCategory) -> list:
    """All category axioms, returned as a list of violation strings."""
    bad = []
    for f, (s, t) in C.morphisms.items():
        if s not in C.objects or t not in C.objects:
            bad.append(f"morphism {f!r} has unknown endpoint")
    for x in C.objects:
        e = C.identity.get(x)
        if e is None or C.morphisms.get(e) != (x, x):
            bad.append(f"object {fmt(x)} lacks a proper identity")
    for g, (gs, gt) in C.morphisms.items():
        for f, (fs, ft) in C.morphisms.items():
            defined = (g, f) in C.compose
            if defined != (ft == gs):
                bad.append(f"compose({g!r},{f!r}) defined iff composable violated")
            if defined:
                h = C.compose[(g, f)]
                if C.morphisms.get(h) != (fs, gt):
                    bad.append(f"compose({g!r},{f!r}) has wrong endpoints")
    for x in C.objects:
        e = C.identity.get(x)
        if e is None:
            continue
        for f, (fs, ft) in C.morphisms.items():
            if fs == x and C.compose.get((f, e)) != f:
                bad.append(f"right unit law fails at {f!r}")
            if ft == x and C.compose.get((e, f)) != f:
                bad.append(f"left unit law fails at {f!r}")
    for h in C.morphisms:
        for g in C.morphisms:
            if (h, g) not in C.compose:
                continue
            for f in C.morphisms:
                if (g, f) not in C.compose:
                    continue
                if C.compose[(h, C.compose[(g, f)])] != C.compose[(C.compose[(h, g)], f)]:
                    bad.append(f"associativity fails at ({h!r},{g!r},{f!r})")
    return bad


def _thin_category(objects, arrows) -> FiniteCategory:
    """Category with at most one morphism per hom-set.

    ``arrows`` is the set of ordered pairs (x, y) with a morphism x -> y;
    it must contain the identities and be closed under composition.
    Morphism x -> y is named "x>y" with the object labels formatted.
    """
    name = {}
    morphisms = {}
    for (x, y) in sorted(arrows, key=lambda p: (sort_key(p[0]), sort_key(p[1]))):
        nm = f"{fmt(x)}>{fmt(y)}"
        name[(x, y)] = nm
        morphisms[nm] = (x, y)
    identity = {x: name[(x, x)] for x in objects}
    compose = {}
    for (x, y), fn in name.items():
        for (y2, z), gn in name.items():
            if y2 == y:
                if (x, z) not in name:
                    raise ValidationError("thin category arrows not composition-closed")
                compose[(gn, fn)] = name[(x, z)]
    return FiniteCategory(tuple(objects), morphisms, identity, compose)


def poset_category(n: int) -> FiniteCategory:
    """The poset [n] = {0 <= 1 <= ... <= n} as a category."""
    objects = tuple(range(n + 1))
    arrows = {(x, y) for x in objects for y in objects if x <= y}
    return _thin_category(objects, arrows)


def interval_groupoid() -> FiniteCategory:
    """The free-living isomorphism: two objects, one morphism each way."""
    objects = (0, 1)
    arrows = {(x, y) for x in objects for y in objects}
    return _thin_category(objects, arrows)


def inverted_arrow_category(n: int, i: int) -> FiniteCategory:
    """The poset [n] with the arrow i -> i+1 made invertible.

    Hom(x, y) is a singleton iff x <= y or (x, y) == (i+1, i).
    """
    if not (n >= 1 and 0 <= i <= n - 1):
        raise UsageError("need n >= 1 and 0 <= i <= n-1")
    objects = tuple(range(n + 1))
    arrows = {(x, y) for x in objects for y in objects if x <= y}
    arrows.add((i + 1, i))
    return _thin_category(objects, arrows)


def cyclic_group_category(order: int) -> FiniteCategory:
    """The cyclic group of the given order as a one-object category."""
    if order < 1:
        raise UsageError("group order must be >= 1")
    objects = ("*",)
    morphisms = {f"g{k}": ("*", "*") for k in range(order)}
    identity = {"*": "g0"}
    compose = {(f"g{a}", f"g{b}"): f"g{(a + b) % order}"
               for a in range(order) for b in range(order)}
    return FiniteCategory(objects, morphisms, identity, compose)


def nerve(C: FiniteCategory, D: int) -> TruncatedSimplicialSet:
    """The nerve: n-simplices are composable strings of n morphism names.

    0-simplices are the objects.  d_i composes at i (or drops at the ends);
    s_i inserts an identity; a simplex is degenerate iff its string contains
    an identity.
    """
    bad = validate_category(C)
    if bad:
        raise UsageError("invalid category: " + "; ".join(bad[:3]))
    if D < 0:
        raise UsageError("truncation must be >= 0")
    tables = [tuple(sorted(C.objects, key=sort_key))]
    strings = [(f,) for f in sorted(C.morphisms, key=sort_key)]
    for n in range(1, D + 1):
        tables.append(tuple(strings))
        if n < D:
            strings = [s + (f,) for s in strings
                       for f in sorted(C.morphisms, key=sort_key)
                       if C.tgt(s[-1]) == C.src(f)]
    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            tab = {}
            for s in tables[n]:
                if n == 1:
                    tab[s] = C.tgt(s[0]) if i == 0 else C.src(s[0])
                elif i == 0:
                    tab[s] = s[1:]
                elif i == n:
                    tab[s] = s[:-1]
                else:
                    tab[s] = s[:i - 1] + (C.compose[(s[i], s[i - 1])],) + s[i + 1:]
            face_maps[(n, i)] = tab
    for n in range(D):
        for i in range(n + 1):
            tab = {}
            for s in tables[n]:
                if n == 0:
                    tab[s] = (C.identity[s],)
                else:
                    at = C.src(s[i]) if i < n else C.tgt(s[n - 1])
                    tab[s] = s[:i] + (C.identity[at],) + s[i:]
            degeneracy_maps[(n, i)] = tab
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def full_subcategory(C: FiniteCategory, objects: Iterable) -> FiniteCategory:
    objs = tuple(sorted(objects, key=sort_key))
    keep = {f for f, (s, t) in C.morphisms.items() if s in objs and t in objs}
    return FiniteCategory(
        objs,
        {f: C.morphisms[f] for f in keep},
        {x: C.identity[x] for x in objs},
        {(g, f): h for (g, f), h in C.compose.items() if g in keep and f in keep},
    )


# ---------------------------------------------------------------------------
# products, coproducts, pushouts
# ---------------------------------------------------------------------------


def product(X: TruncatedSimplicialSet, Y: TruncatedSimplicialSet) -> TruncatedSimplicialSet:
    """Binary product: n-simplices are pairs, structure maps act diagonally."""
    if X.truncation_dim != Y.truncation_dim:
        raise UsageError("product requires equal truncation dims")
    D = X.truncation_dim
    tables = [tuple((x, y) for x in X.simplices_at(n) for y in Y.simplices_at(n))
              for n in range(D + 1)]
    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            fx, fy = X.face_maps[(n, i)], Y.face_maps[(n, i)]
            face_maps[(n, i)] = {(x, y): (fx[x], fy[y]) for (x, y) in tables[n]}
    for n in range(D):
        for i in range(n + 1):
            sx, sy = X.degeneracy_maps[(n, i)], Y.degeneracy_maps[(n, i)]
            degeneracy_maps[(n, i)] = {(x, y): (sx[x], sy[y]) for (x, y) in tables[n]}
    return TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)


def projections(P: TruncatedSimplicialSet, X: TruncatedSimplicialSet,
                Y: TruncatedSimplicialSet) -> tuple:
    D = P.truncation_dim
    px = {n: {p: p[0] for p in P.simplices_at(n)} for n in range(D + 1)}
    py = {n: {p: p[1] for p in P.simplices_at(n)} for n in range(D + 1)}
    return SimplicialMap(P, X, px), SimplicialMap(P, Y, py)


def coproduct(parts: Sequence[TruncatedSimplicialSet]) -> tuple:
    """Disjoint union; labels are (index, label).  Returns (object, injections)."""
    if not parts:
        raise UsageError("coproduct of nothing: pass make_empty explicitly")
    D = parts[0].truncation_dim
    if any(p.truncation_dim != D for p in parts):
        raise UsageError("coproduct requires equal truncation dims")
    tables = [tuple((k, x) for k, p in enumerate(parts) for x in p.simplices_at(n))
              for n in range(D + 1)]
    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            face_maps[(n, i)] = {(k, x): (k, parts[k].face(n, i, x))
                                 for (k, x) in tables[n]}
    for n in range(D):
        for i in range(n + 1):
            degeneracy_maps[(n, i)] = {(k, x): (k, parts[k].degeneracy(n, i, x))
                                       for (k, x) in tables[n]}
    obj = TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)
    injections = []
    for k, p in enumerate(parts):
        comp = {n: {x: (k, x) for x in p.simplices_at(n)} for n in range(D + 1)}
        injections.append(Inclusion(p, obj, comp))
    return obj, injections


@dataclass(frozen=True)
class PushoutResult:
    """Dimensionwise set pushout of an inclusion f: A↪B along g: A→C.

    Labels are union-find representatives among tagged labels ("B", b) and
    ("C", c), with the label-order minimum as representative.
    """

    obj: TruncatedSimplicialSet
    from_b: SimplicialMap
    from_c: Inclusion


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def pushout(f: Inclusion, g: SimplicialMap) -> PushoutResult:
    """Pushout of B ←f– A –g→ C with f an inclusion.

    Since f is injective the structure map C → P is again an inclusion.
    """
    if not isinstance(f, Inclusion):
        raise UsageError("pushout requires an inclusion on the left leg")
    if f.domain != g.domain:
        raise UsageError("pushout legs must share their domain")
    A, B, C = f.domain, f.codomain, g.codomain
    if B.truncation_dim != C.truncation_dim:
        raise UsageError("pushout requires equal truncation dims")
    D = B.truncation_dim
    rep_of, tables = [], []
    for n in range(D + 1):
        uf = _UnionFind()
        for b in B.simplices_at(n):
            uf.add(("B", b))
        for c in C.simplices_at(n):
            uf.add(("C", c))
        for a in A.simplices_at(n):
            uf.union(("B", f.component[n][a]), ("C", g.component[n][a]))
        rep = {}
        for root, members in uf.classes().items():
            chosen = min(members, key=sort_key)
            for m in members:
                rep[m] = chosen
        rep_of.append(rep)
        tables.append(sorted(set(rep.values()), key=sort_key))

    def induced(tagged, n, op_b, op_c):
        tag, x = tagged
        if tag == "B":
            return rep_of[n][("B", op_b[x])]
        return rep_of[n][("C", op_c[x])]

    face_maps, degeneracy_maps = {}, {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            face_maps[(n, i)] = {
                t: induced(t, n - 1, B.face_maps[(n, i)], C.face_maps[(n, i)])
                for t in tables[n]}
    for n in range(D):
        for i in range(n + 1):
            degeneracy_maps[(n, i)] = {
                t: induced(t, n + 1, B.degeneracy_maps[(n, i)], C.degeneracy_maps[(n, i)])
                for t in tables[n]}
    P = TruncatedSimplicialSet(D, tables, face_maps, degeneracy_maps)
    from_b = SimplicialMap(B, P, {n: {b: rep_of[n][("B", b)] for b in B.simplices_at(n)}
                                  for n in range(D + 1)})
    from_c = Inclusion(C, P, {n: {c: rep_of[n][("C", c)] for c in C.simplices_at(n)}
                              for n in range(D + 1)})
    return PushoutResult(P, from_b, from_c)


# ---------------------------------------------------------------------------
# simplex maps and simplicial operators
# ---------------------------------------------------------------------------


def apply_operator(X: TruncatedSimplicialSet, n: int, x: Label, t: tuple) -> Label:
    """Value of the simplex x under the monotone operator t: [m] -> [n].

    t is a weakly increasing tuple of length m+1 with entries in 0..n; the
    result is the m-simplex obtained by the corresponding composite of faces
    and degeneracies.
    """
    if any(t[j] > t[j + 1] for j in range(len(t) - 1)):
        raise UsageError("operator tuple must be monotone")
    if t and (t[0] < 0 or t[-1] > n):
        raise UsageError("operator tuple out of range")
    missing = [v for v in range(n, -1, -1) if v not in set(t)]
    cur, dim = x, n
    for v in missing:
        cur = X.face(dim, v, cur)
        dim -= 1
        t = tuple(v2 - 1 if v2 > v else v2 for v2 in t)
    # now t is surjective onto 0..dim; peel repeated entries as degeneracies
    def build(tt, y):
        for j in range(len(tt) - 1):
            if tt[j] == tt[j + 1]:
                inner = build(tt[:j] + tt[j + 1:], y)
                return X.degeneracy(len(tt) - 2, j, inner)
        return y

    return build(t, cur)


def simplex_map(X: TruncatedSimplicialSet, n: int, x: Label) -> SimplicialMap:
    """The map Delta[n] -> X classifying the n-simplex x."""
    if not X.has_simplex(n, x):
        raise UsageError(f"no {n}-simplex {fmt(x)}")
    delta = make_delta(n, X.truncation_dim)
    comp = {m: {t: apply_operator(X, n, x, t) for t in delta.simplices_at(m)}
            for m in range(X.truncation_dim + 1)}
    return SimplicialMap(delta, X, comp)


def nondegenerate_simplices(X: TruncatedSimplicialSet, n: int) -> tuple:
    if n < 0 or n > X.truncation_dim:
        raise UsageError(f"dimension {n} out of range 0..{X.truncation_dim}")
    return X.nondegenerate(n)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    where: str

    def __str__(self):
        return f"[{self.rule}] {self.where}"


@dataclass(frozen=True)
class ValidationReport:
    subject: str
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_jsonable(self):
        return {"subject": self.subject,
                "ok": self.ok,
                "violations": [{"rule": v.rule, "where": v.where}
                               for v in self.violations]}

    def __str__(self):
        if self.ok:
            return f"{self.subject}: ok"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


def validate_sset(X: TruncatedSimplicialSet, subject: str = "sset") -> ValidationReport:
    """Check totality, the simplicial identities, and degeneracy injectivity."""
    bad = []
    D = X.truncation_dim
    for n in range(1, D + 1):
        for i in range(n + 1):
            tab = X.face_maps.get((n, i), {})
            if set(tab) != X.simplex_set(n):
                bad.append(Violation("face-totality", f"d_{i} on dim {n}"))
                continue
            lower = X.simplex_set(n - 1)
            for x, y in tab.items():
                if y not in lower:
                    bad.append(Violation("face-range", f"d_{i}{fmt(x)} at dim {n}"))
    for n in range(D):
        for i in range(n + 1):
            tab = X.degeneracy_maps.get((n, i), {})
            if set(tab) != X.simplex_set(n):
                bad.append(Violation("degeneracy-totality", f"s_{i} on dim {n}"))
                continue
            upper = X.simplex_set(n + 1)
            for x, y in tab.items():
                if y not in upper:
                    bad.append(Violation("degeneracy-range", f"s_{i}{fmt(x)} at dim {n}"))
            if len(set(tab.values())) != len(tab):
                bad.append(Violation("degeneracy-injectivity", f"s_{i} on dim {n}"))
    if bad:
        return ValidationReport(subject, tuple(bad))

    for n in range(2, D + 1):
        for j in range(n + 1):
            dj = X.face_maps[(n, j)]
            for i in range(j):
                di_low = X.face_maps[(n - 1, i)]
                dj1_low = X.face_maps[(n - 1, j - 1)]
                di = X.face_maps[(n, i)]
                for x in X.simplices_at(n):
                    if di_low[dj[x]] != dj1_low[di[x]]:
                        bad.append(Violation("dd-identity",
                                             f"d_{i}d_{j}{fmt(x)} at dim {n}"))
    for n in range(max(0, D - 1)):
        for j in range(n + 1):
            sj = X.degeneracy_maps[(n, j)]
            for i in range(j + 1):
                si_up = X.degeneracy_maps[(n + 1, i)]
                sj1_up = X.degeneracy_maps[(n + 1, j + 1)]
                si = X.degeneracy_maps[(n, i)]
                for x in X.simplices_at(n):
                    if si_up[sj[x]] != sj1_up[si[x]]:
                        bad.append(Violation("ss-identity",
                                             f"s_{i}s_{j}{fmt(x)} at dim {n}"))
    for n in range(D):
        for j in range(n + 1):
            sj = X.degeneracy_maps[(n, j)]
            for i in range(n + 2):
                di_up = X.face_maps[(n + 1, i)]
                for x in X.simplices_at(n):
                    lhs = di_up[sj[x]]
                    if i == j or i == j + 1:
                        want = x
                    elif i < j:
                        want = X.degeneracy_maps[(n - 1, j - 1)][X.face_maps[(n, i)][x]]
                    else:
                        want = X.degeneracy_maps[(n - 1, j)][X.face_maps[(n, i - 1)][x]]
                    if lhs != want:
                        bad.append(Violation("ds-identity",
                                             f"d_{i}s_{j}{fmt(x)} at dim {n}"))
    return ValidationReport(subject, tuple(bad))


def validate_map(fmap: SimplicialMap, subject: str = "map") -> ValidationReport:
    """Check totality and commutation with all faces and degeneracies."""
    bad = []
    X, Y = fmap.domain, fmap.codomain
    D = X.truncation_dim
    for n in range(D + 1):
        comp = fmap.component.get(n)
        if comp is None or set(comp) != X.simplex_set(n):
            bad.append(Violation("component-totality", f"dim {n}"))
            return ValidationReport(subject, tuple(bad))
        cod = Y.simplex_set(n)
        for x, y in comp.items():
            if y not in cod:
                bad.append(Violation("component-range", f"{fmt(x)} at dim {n}"))
    if bad:
        return ValidationReport(subject, tuple(bad))
    for n in range(1, D + 1):
        for i in range(n + 1):
            fx = X.face_maps[(n, i)]
            fy = Y.face_maps[(n, i)]
            lo, hi = fmap.component[n - 1], fmap.component[n]
            for x in X.simplices_at(n):
                if lo[fx[x]] != fy[hi[x]]:
                    bad.append(Violation("face-naturality",
                                         f"d_{i}{fmt(x)} at dim {n}"))
    for n in range(D):
        for i in range(n + 1):
            sx = X.degeneracy_maps[(n, i)]
            sy = Y.degeneracy_maps[(n, i)]
            lo, hi = fmap.component[n], fmap.component[n + 1]
            for x in X.simplices_at(n):
                if hi[sx[x]] != sy[lo[x]]:
                    bad.append(Violation("degeneracy-naturality",
                                         f"s_{i}{fmt(x)} at dim {n}"))
    return ValidationReport(subject, tuple(bad))


# ---------------------------------------------------------------------------
# isomorphism search
# ---------------------------------------------------------------------------


def graded_counts(X: TruncatedSimplicialSet) -> tuple:
    return tuple((len(X.simplices_at(n)), len(X.nondegenerate(n)))
                 for n in range(X.truncation_dim + 1))


def _extend_degenerate(X, Y, comp, n):
    """Forced images of degenerate n-simplices from the level below."""
    for i in range(n):
        tab = X.degeneracy_maps[(n - 1, i)]
        ytab = Y.degeneracy_maps[(n - 1, i)]
        for x, sx in tab.items():
            if sx not in comp[n]:
                comp[n][sx] = ytab[comp[n - 1][x]]


def find_isomorphism(X: TruncatedSimplicialSet,
                     Y: TruncatedSimplicialSet) -> Optional[SimplicialMap]:
    """Backtracking isomorphism search; None when no isomorphism exists.

    Searches dimensionwise bijections between nondegenerate simplices that
    commute with faces; degenerate images are forced.  The first isomorphism
    in (dimension, label) order is returned, so results are deterministic.
    """
    if X.truncation_dim != Y.truncation_dim:
        return None
    if graded_counts(X) != graded_counts(Y):
        return None
    D = X.truncation_dim
    comp = {n: {} for n in range(D + 1)}

    def faces_of(Z, n, z):
        return tuple(Z.face_maps[(n, i)][z] for i in range(n + 1))

    def solve_dim(n: int) -> bool:
        if n > D:
            return True
        comp[n] = {}
        if n > 0:
            _extend_degenerate(X, Y, comp, n)
            used_deg = list(comp[n].values())
            if len(set(used_deg)) != len(used_deg):
                return False
        xs = X.nondegenerate(n)
        ys = Y.nondegenerate(n)
        used = set(v for v in comp[n].values())

        def place(k: int) -> bool:
            if k == len(xs):
                return solve_dim(n + 1)
            x = xs[k]
            want = None
            if n > 0:
                want = tuple(comp[n - 1][f] for f in faces_of(X, n, x))
            for y in ys:
                if y in used:
                    continue
                if n > 0 and faces_of(Y, n, y) != want:
                    continue
                comp[n][x] = y
                used.add(y)
                if place(k + 1):
                    return True
                used.discard(y)
                del comp[n][x]
            return False

        return place(0)

    if not solve_dim(0):
        return None
    out = SimplicialMap(X, Y, {n: dict(comp[n]) for n in range(D + 1)})
    rep = validate_map(out)
    if not rep.ok or not out.is_bijective():
        raise ValidationError("isomorphism search produced an invalid map")
    return out


def is_isomorphic(X: TruncatedSimplicialSet, Y: TruncatedSimplicialSet) -> bool:
    return find_isomorphism(X, Y) is not None
