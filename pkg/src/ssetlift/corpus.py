"""The built-in object corpus used by the verification suites.

Spans fibrant, non-fibrant, and degeneracy-heavy cases: standard simplices
and boundaries up to dimension 3, ordinary horns, J and its 1-skeleton, the
smallest iso-horn and isoplex, and nerves of the poset [2], the free-living
isomorphism, and the order-2 group.
"""

from __future__ import annotations

from .isohorn import isohorn, isoplex
from .kernel import (
    TruncatedSimplicialSet,
    cyclic_group_category,
    interval_groupoid,
    make_boundary,
    make_delta,
    make_horn,
    make_J,
    nerve,
    poset_category,
    skeleton,
)


def builtin_corpus(D: int) -> list:
    """Named (name, object) pairs, all truncated at D."""
    out = []
    for n in range(4):
        out.append((f"delta{n}", make_delta(n, D)))
    for n in range(4):
        out.append((f"boundary{n}", make_boundary(n, D)))
    for (n, k) in [(2, 0), (2, 1), (2, 2), (3, 1)]:
        out.append((f"horn{n}_{k}", make_horn(n, k, D)))
    out.append(("J", make_J(D)))
    out.append(("sk1_J", skeleton(make_J(D), 1).domain))
    out.append(("isohorn_body_2_0", isohorn(2, 0, D).body))
    out.append(("isoplex_body_2_0", isoplex(2, 0, D).body))
    out.append(("nerve_poset2", nerve(poset_category(2), D)))
    out.append(("nerve_iso", nerve(interval_groupoid(), D)))
    out.append(("nerve_c2", nerve(cyclic_group_category(2), D)))
    return out


def corpus_object(name: str, D: int) -> TruncatedSimplicialSet:
    for key, obj in builtin_corpus(D):
        if key == name:
            return obj
    raise KeyError(name)
