"""Simplex labels: canonical ordering, formatting, and JSON round-tripping.

A label is an opaque identifier built from ints, strings, and tuples:
monotone integer tuples for simplices of a standard simplex, bit tuples for
simplices of the interval-groupoid nerve, pairs ``(a, b)`` for products,
tuples of morphism names for nerves, and tagged pairs like ``("B", x)`` for
pushout results.  Labels only need to be unique within one dimension of one
simplicial set, but every operation here sorts simplex tables by
:func:`sort_key`, so all tie-breaking (search order, union-find
representatives) is deterministic.
"""

from __future__ import annotations

from typing import Any

Label = Any

_TYPE_RANK = {int: 0, str: 1, tuple: 2}


def sort_key(label: Label):
    """Total, deterministic order on all labels used by this package.

    Heterogeneous labels (ints vs strings vs tuples) are ordered by a type
    rank first, so mixed tables sort without TypeError.
    """
    t = type(label)
    if t is int:
        return (0, label)
    if t is bool:  # bools are ints, but keep them distinct and ordered
        return (0, int(label))
    if t is str:
        return (1, label)
    if t is tuple:
        return (2, len(label), tuple(sort_key(x) for x in label))
    raise TypeError(f"unsupported label type: {t.__name__!s} ({label!r})")


def encode(label: Label):
    """Label -> JSON-serializable structure (tuples become lists)."""
    if isinstance(label, tuple):
        return [encode(x) for x in label]
    if isinstance(label, (int, str)):
        return label
    raise TypeError(f"unsupported label type: {type(label).__name__}")


def decode(obj) -> Label:
    """Inverse of :func:`encode` (lists become tuples)."""
    if isinstance(obj, list):
        return tuple(decode(x) for x in obj)
    if isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (int, str)):
        return obj
    raise TypeError(f"cannot decode label from {type(obj).__name__}")


def fmt(label: Label) -> str:
    """Compact printable form, e.g. ``(0,1,0)`` or ``((0),2)``."""
    if isinstance(label, tuple):
        return "(" + ",".join(fmt(x) for x in label) + ")"
    return str(label)
