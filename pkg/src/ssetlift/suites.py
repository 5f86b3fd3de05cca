"""Prebuilt verification suites over the built-in corpus.

Three suites: the retract/iso/factorization witnesses for widened inclusions,
the cell-decomposition replays, and the instance-level equivalence of the two
fibrancy characterizations.  Each returns a result with per-entry verdicts
and a JSON-ready matrix; the CLI exposes them behind ``verify``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .corpus import builtin_corpus
from .isohorn import decompose_single_narrow, isohorn_as_widened, verify_decomposition
from .kernel import (
    boundary_inclusion,
    full_subcomplex,
    identity_map,
    make_boundary,
    make_delta,
    make_empty,
    make_horn,
    skeleton,
    subcomplex,
    validate_map,
)
from .labels import fmt
from .lifting import equivalence_report
from .serialize import decomposition_to_jsonable
from .widening import (
    decompose_to_single,
    retract_witness,
    widened_inclusion,
    widening_iso,
)


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    entries: tuple            # (entry_id, ok) pairs
    detail: dict              # JSON-ready

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.entries)

    def to_jsonable(self):
        return {"suite": self.suite,
                "ok": self.ok,
                "entries": [{"id": eid, "status": "pass" if ok else "fail"}
                            for eid, ok in self.entries],
                "detail": self.detail}

    def table(self) -> str:
        lines = [f"suite {self.suite}: {'pass' if self.ok else 'FAIL'}"]
        for eid, ok in self.entries:
            lines.append(f"  {'pass' if ok else 'FAIL'}  {eid}")
        return "\n".join(lines)


def _empty_into(X):
    empty = make_empty(X.truncation_dim)
    from .kernel import Inclusion
    return Inclusion(empty, X, {n: {} for n in range(X.truncation_dim + 1)})


def widened_corpus(D: int) -> list:
    """Twenty-odd widened inclusions, including every iso-horn with n <= 3."""
    d1, d2, d3 = make_delta(1, D), make_delta(2, D), make_delta(3, D)
    out = []
    for n in range(1, 4):
        for i in range(n):
            out.append((f"isohorn({n},{i})", isohorn_as_widened(n, i, D)))
    out.append(("bdry1@all", widened_inclusion(boundary_inclusion(1, D),
                                               d1.simplices_at(0))))
    out.append(("bdry2@all", widened_inclusion(boundary_inclusion(2, D),
                                               d2.simplices_at(0))))
    out.append(("bdry2@01", widened_inclusion(boundary_inclusion(2, D),
                                              [(0,), (1,)])))
    out.append(("bdry2@none", widened_inclusion(boundary_inclusion(2, D), [])))
    horn21 = subcomplex(d2, [make_horn(2, 1, D).simplices_at(n)
                             for n in range(D + 1)])
    out.append(("horn21@2", widened_inclusion(horn21, [(2,)])))
    out.append(("horn21@all", widened_inclusion(horn21, d2.simplices_at(0))))
    out.append(("sk0d2@1", widened_inclusion(skeleton(d2, 0), [(1,)])))
    out.append(("face02@02", widened_inclusion(full_subcomplex(d2, [(0,), (2,)]),
                                               [(0,), (2,)])))
    out.append(("empty-into-point@0", widened_inclusion(_empty_into(make_delta(0, D)),
                                                        [(0,)])))
    out.append(("empty-into-d1@1", widened_inclusion(_empty_into(d1), [(1,)])))
    out.append(("vertex0-d1@0", widened_inclusion(full_subcomplex(d1, [(0,)]),
                                                  [(0,)])))
    out.append(("vertex0-d1@1", widened_inclusion(full_subcomplex(d1, [(0,)]),
                                                  [(1,)])))
    out.append(("identity-d2@1", widened_inclusion(identity_map(d2), [(1,)])))
    out.append(("sk1d3@3", widened_inclusion(skeleton(d3, 1), [(3,)])))
    horn31 = subcomplex(d3, [make_horn(3, 1, D).simplices_at(n)
                             for n in range(D + 1)])
    out.append(("horn31@1", widened_inclusion(horn31, [(1,)])))
    return out


def sec4_suite(D: int) -> SuiteResult:
    """Retract witnesses, widening-composition isomorphisms, factorizations."""
    entries = []
    detail = {"retracts": [], "widening_iso": [], "factorization": []}

    for name, w in widened_corpus(D):
        rw = retract_witness(w)
        entries.append((f"retract:{name}", rw.ok))
        detail["retracts"].append(
            {"id": name, "checks": [c.to_jsonable() for c in rw.checks]})

    iso_bases = [("delta1", make_delta(1, D)), ("delta2", make_delta(2, D)),
                 ("bdry2", make_boundary(2, D))]
    for base_name, X in iso_bases:
        verts = X.simplices_at(0)
        good = True
        pairs = 0
        for r in range(len(verts) + 1):
            for mu in itertools.combinations(verts, r):
                for s in range(len(mu) + 1):
                    for nu in itertools.combinations(mu, s):
                        phi = widening_iso(X, nu, mu)
                        pairs += 1
                        if not (phi.is_bijective() and validate_map(phi).ok):
                            good = False
        entries.append((f"widening-iso:{base_name}", good))
        detail["widening_iso"].append({"id": base_name, "pairs": pairs,
                                       "status": "pass" if good else "fail"})

    w = widened_inclusion(boundary_inclusion(2, D), make_delta(2, D).simplices_at(0))
    chain = decompose_to_single(w)
    entries.append(("decompose-to-single:bdry2@all", chain.ok))
    entries.append(("decompose-to-single:all-narrow",
                    all(s.narrow for s in chain.stages)))
    detail["factorization"].append({
        "id": "bdry2@all",
        "stages": [{"vertex": fmt(s.vertex), "narrow": s.narrow, "ok": s.ok}
                   for s in chain.stages]})
    return SuiteResult("sec4", tuple(entries), detail)


def decomposition_instances(D: int) -> list:
    """(name, inner inclusion, vertex) triples for the replays."""
    d1, d2 = make_delta(1, D), make_delta(2, D)
    return [
        ("vertex0-into-d1@0", full_subcomplex(d1, [(0,)]), (0,)),
        ("bdry1-into-d1@0", boundary_inclusion(1, D), (0,)),
        ("bdry2-into-d2@2", boundary_inclusion(2, D), (2,)),
        ("bdry2-into-d2@1", boundary_inclusion(2, D), (1,)),
        ("empty-into-point@0", _empty_into(make_delta(0, D)), (0,)),
        ("identity-d1@0", identity_map(d1), (0,)),
        ("sk0d2-into-d2@1", skeleton(d2, 0), (1,)),
    ]


def sec5_suite(D: int) -> SuiteResult:
    """Cell-decomposition replays against the widening construction."""
    entries = []
    detail = {"decompositions": []}
    for name, inner, y in decomposition_instances(D):
        dec = decompose_single_narrow(inner, y)
        rep = verify_decomposition(dec)
        ok = dec.ok and rep.ok
        entries.append((f"decompose:{name}", ok))
        doc = decomposition_to_jsonable(dec)
        doc["verification"] = rep.to_jsonable()
        doc["id"] = name
        detail["decompositions"].append(doc)
    return SuiteResult("sec5", tuple(entries), detail)


def theorem_suite(D: int, N: int) -> SuiteResult:
    """Agreement of iso-horn RLP and generating-class RLP over the corpus."""
    rep = equivalence_report(builtin_corpus(D), N)
    entries = [(f"agree:{row.name}", row.agree) for row in rep.rows]
    return SuiteResult("theorem", tuple(entries), rep.to_jsonable())


SUITES = {"sec4": sec4_suite, "sec5": sec5_suite}


def run_suite(name: str, D: int, N: int) -> SuiteResult:
    if name == "theorem":
        return theorem_suite(D, N)
    if name in SUITES:
        return SUITES[name](D)
    from .kernel import UsageError
    raise UsageError(f"unknown suite {name!r}; pick sec4, sec5, or theorem")
