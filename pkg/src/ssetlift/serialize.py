"""JSON encodings for simplicial sets, maps, categories, and witnesses.

Top-level field names follow the document formats fixed for this package:
simplicial sets as {"truncation_dim", "simplices", "face", "degeneracy"},
maps as per-dimension label-to-label tables, category presentations as
{"objects", "morphisms" (name/src/tgt), "compose" ([g, f, gf] rows)}.
Labels are nested lists/ints/strings (tuples encode as lists); structure-map
tables are keyed "n:i" and hold sorted [src, dst] pairs, so a canonical dump
of the same object is always byte-identical.
"""

from __future__ import annotations

import json

from . import labels
from .kernel import (
    FiniteCategory,
    Inclusion,
    SimplicialMap,
    TruncatedSimplicialSet,
    UsageError,
    validate_category,
)
from .labels import sort_key


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def _table_to_pairs(tab: dict) -> list:
    rows = [[labels.encode(src), labels.encode(dst)] for src, dst in tab.items()]
    rows.sort(key=lambda r: sort_key(labels.decode(r[0])))
    return rows


def _pairs_to_table(rows) -> dict:
    return {labels.decode(src): labels.decode(dst) for src, dst in rows}


def sset_to_jsonable(X: TruncatedSimplicialSet) -> dict:
    D = X.truncation_dim
    return {
        "truncation_dim": D,
        "simplices": [[labels.encode(x) for x in X.simplices_at(n)]
                      for n in range(D + 1)],
        "face": {f"{n}:{i}": _table_to_pairs(X.face_maps.get((n, i), {}))
                 for n in range(1, D + 1) for i in range(n + 1)},
        "degeneracy": {f"{n}:{i}": _table_to_pairs(X.degeneracy_maps.get((n, i), {}))
                       for n in range(D) for i in range(n + 1)},
    }


def _parse_key(key: str) -> tuple:
    n, _, i = key.partition(":")
    return int(n), int(i)


def sset_from_jsonable(doc: dict) -> TruncatedSimplicialSet:
    try:
        D = int(doc["truncation_dim"])
        simplices = [[labels.decode(x) for x in row] for row in doc["simplices"]]
        face = {_parse_key(k): _pairs_to_table(v) for k, v in doc["face"].items()}
        degeneracy = {_parse_key(k): _pairs_to_table(v)
                      for k, v in doc["degeneracy"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed simplicial-set document: {exc}") from exc
    return TruncatedSimplicialSet(D, simplices, face, degeneracy)


def map_to_jsonable(f: SimplicialMap) -> dict:
    D = f.domain.truncation_dim
    return {
        "domain": sset_to_jsonable(f.domain),
        "codomain": sset_to_jsonable(f.codomain),
        "component": {str(n): _table_to_pairs(f.component[n]) for n in range(D + 1)},
        "inclusion": isinstance(f, Inclusion),
    }


def map_from_jsonable(doc: dict) -> SimplicialMap:
    try:
        domain = sset_from_jsonable(doc["domain"])
        codomain = sset_from_jsonable(doc["codomain"])
        component = {int(n): _pairs_to_table(v) for n, v in doc["component"].items()}
        cls = Inclusion if doc.get("inclusion") else SimplicialMap
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed map document: {exc}") from exc
    return cls(domain, codomain, component)


# ---------------------------------------------------------------------------
# category presentations
# ---------------------------------------------------------------------------


def category_to_jsonable(C: FiniteCategory) -> dict:
    return {
        "objects": [labels.encode(x) for x in C.objects],
        "morphisms": [{"name": m, "src": labels.encode(s), "tgt": labels.encode(t)}
                      for m, (s, t) in sorted(C.morphisms.items())],
        "compose": sorted([[g, f, h] for (g, f), h in C.compose.items()]),
    }


def category_from_jsonable(doc: dict) -> FiniteCategory:
    """Parse a presentation; identities are inferred from the compose table.

    Identity composites (id o f = f and g o id = g) may be omitted from the
    table and are filled in; everything else must be present, and the result
    must satisfy the category axioms.
    """
    try:
        objects = tuple(labels.decode(x) for x in doc["objects"])
        morphisms = {m["name"]: (labels.decode(m["src"]), labels.decode(m["tgt"]))
                     for m in doc["morphisms"]}
        compose = {(g, f): h for g, f, h in doc["compose"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed category document: {exc}") from exc
    for (g, f) in compose:
        if g not in morphisms or f not in morphisms:
            raise UsageError(f"compose row mentions unknown morphism ({g!r},{f!r})")

    identity = {}
    for x in objects:
        loops = [m for m, (s, t) in morphisms.items() if s == x and t == x]
        units = []
        for e in loops:
            ok = compose.get((e, e), e) == e
            for f, (fs, ft) in morphisms.items():
                if fs == x and compose.get((f, e), f) != f:
                    ok = False
                if ft == x and compose.get((e, f), f) != f:
                    ok = False
            if ok:
                units.append(e)
        if len(units) != 1:
            raise UsageError(f"cannot infer a unique identity at object "
                             f"{labels.fmt(x)} (candidates: {units})")
        identity[x] = units[0]

    for f, (fs, ft) in morphisms.items():
        compose.setdefault((f, identity[fs]), f)
        compose.setdefault((identity[ft], f), f)

    C = FiniteCategory(objects, morphisms, identity, compose)
    bad = validate_category(C)
    if bad:
        raise UsageError("invalid category: " + "; ".join(bad[:3]))
    return C


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


def retract_witness_to_jsonable(rw) -> dict:
    """Node/edge view of the 2x3 retract diagram plus its check statuses."""
    def size(obj):
        return [len(obj.simplices_at(n)) for n in range(obj.truncation_dim + 1)]

    nodes = {
        "domain": size(rw.source.map.domain),
        "middle_top": size(rw.middle.domain),
        "widening": size(rw.source.widening.widened),
        "ambient": size(rw.source.widening.ambient),
    }
    edges = [
        {"name": "top_left", "from": "domain", "to": "middle_top"},
        {"name": "top_right", "from": "middle_top", "to": "domain"},
        {"name": "widened_inclusion", "from": "domain", "to": "widening"},
        {"name": "middle", "from": "middle_top", "to": "ambient"},
        {"name": "bottom_left", "from": "widening", "to": "ambient"},
        {"name": "bottom_right", "from": "ambient", "to": "widening"},
    ]
    return {"nodes": nodes, "edges": edges,
            "checks": [c.to_jsonable() for c in rw.checks]}


def chain_to_jsonable(chain) -> dict:
    """Summary of a single-vertex peeling chain with per-stage statuses."""
    stages = []
    for s in chain.stages:
        fact = s.factorization
        stages.append({
            "vertex": labels.encode(s.vertex),
            "narrow": s.narrow,
            "checks": ([c.to_jsonable() for c in fact.checks]
                       + [c.to_jsonable() for c in fact.square.checks]),
        })
    return {"stages": stages,
            "checks": [c.to_jsonable() for c in chain.checks],
            "ok": chain.ok}


def decomposition_to_jsonable(d) -> dict:
    """Stages with their cells and check statuses, plus truncation data."""
    def stage_doc(s):
        return {"k": s.k,
                "cells": [{"sigma": labels.encode(c.sigma), "i_sigma": c.index}
                          for c in s.cells],
                "checks": [c.to_jsonable() for c in s.square.checks]}

    return {
        "vertex": labels.encode(d.vertex),
        "prestage": None if d.prestage is None else stage_doc(d.prestage),
        "stages": [stage_doc(s) for s in d.stages],
        "cell_counts": {str(k): v for k, v in sorted(d.counts.items())},
        "leftover_counts": {str(k): v for k, v in sorted(d.leftover.items())},
        "truncated": d.truncated,
        "sound_dim": d.sound_dim,
        "total_cells": d.total_cells(),
        "checks": [c.to_jsonable() for c in d.checks],
        "ok": d.ok,
    }
