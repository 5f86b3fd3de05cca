"""Command-line surface: build objects, run checks, replay decompositions.

Objects live in a workspace directory of JSON files (one per name); every
persisted object is revalidated on load.  Build expressions follow the
grammar

    delta(n) | boundary(n) | J | nerve(file) | product(a,b)
    | fullsub(a, {vertices}) | skeleton(a,k) | widen(a, {vertices})
    | isoplex(n,i) | isohorn(n,i) | pushout_product(f,g) | class_A(n)

where a, b, f, g are sub-expressions or names of persisted objects.  The
constructors fullsub/skeleton/widen/isohorn/pushout_product/class_A evaluate
to inclusions; check and export-dot accept an inclusion and operate on its
domain.  Exit codes: 0 pass, 1 fail (witness file path printed), 2 usage.
"""

from __future__ import annotations

import argparse
import ast
import os
import sys
import tempfile
from dataclasses import dataclass

from .isohorn import NotNarrowError, decompose_single_narrow, isohorn, isoplex, verify_decomposition
from .kernel import (
    Inclusion,
    SimplicialMap,
    SsetError,
    TruncatedSimplicialSet,
    UsageError,
    full_subcomplex,
    make_boundary,
    make_delta,
    make_J,
    nerve,
    product,
    skeleton,
    validate_map,
    validate_sset,
)
from .labels import fmt, sort_key
from .lifting import FAMILIES, check_rlp, class_A
from .serialize import (
    canonical_dumps,
    category_from_jsonable,
    decomposition_to_jsonable,
    map_from_jsonable,
    map_to_jsonable,
    sset_from_jsonable,
    sset_to_jsonable,
)
from .suites import run_suite
from .widening import widen

import json


# ---------------------------------------------------------------------------
# workspace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Value:
    kind: str                   # "sset" | "inclusion" | "map"
    payload: object

    def as_sset(self) -> TruncatedSimplicialSet:
        if self.kind == "sset":
            return self.payload
        if self.kind in ("inclusion", "map"):
            return self.payload.domain
        raise UsageError(f"cannot view a {self.kind} as an object")

    def require_sset(self) -> TruncatedSimplicialSet:
        if self.kind != "sset":
            raise UsageError(f"expected an object, got a {self.kind}")
        return self.payload

    def require_inclusion(self) -> Inclusion:
        if self.kind != "inclusion":
            raise UsageError(f"expected an inclusion, got a {self.kind}")
        return self.payload


def atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Workspace:
    """A directory of named, revalidated JSON objects."""

    def __init__(self, directory: str):
        self.directory = directory

    def path(self, name: str) -> str:
        if not name or any(ch in name for ch in "/\\"):
            raise UsageError(f"bad object name {name!r}")
        return os.path.join(self.directory, name + ".json")

    def exists(self, name: str) -> bool:
        return os.path.exists(self.path(name))

    def save(self, name: str, value: Value, force: bool = False):
        os.makedirs(self.directory, exist_ok=True)
        if self.exists(name) and not force:
            raise UsageError(f"object {name!r} already exists (use --force)")
        if value.kind == "sset":
            doc = {"kind": "sset", "object": sset_to_jsonable(value.payload)}
        elif value.kind in ("inclusion", "map"):
            doc = {"kind": value.kind, "object": map_to_jsonable(value.payload)}
        else:
            raise UsageError(f"cannot persist a {value.kind}")
        atomic_write(self.path(name), canonical_dumps(doc))

    def load(self, name: str) -> Value:
        path = self.path(name)
        if not os.path.exists(path):
            raise UsageError(f"no object named {name!r} in {self.directory}")
        with open(path) as fh:
            doc = json.load(fh)
        kind = doc.get("kind")
        if kind == "sset":
            obj = sset_from_jsonable(doc["object"])
            rep = validate_sset(obj, subject=name)
            if not rep.ok:
                raise UsageError(f"persisted object {name!r} fails validation:\n{rep}")
            return Value("sset", obj)
        if kind in ("inclusion", "map"):
            f = map_from_jsonable(doc["object"])
            for part, sub in (("domain", f.domain), ("codomain", f.codomain)):
                rep = validate_sset(sub, subject=f"{name}.{part}")
                if not rep.ok:
                    raise UsageError(f"persisted {name!r} {part} fails validation:\n{rep}")
            rep = validate_map(f, subject=name)
            if not rep.ok:
                raise UsageError(f"persisted map {name!r} fails validation:\n{rep}")
            return Value(kind, f)
        raise UsageError(f"unknown kind {kind!r} in {path}")


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------


_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_./-")


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),":
            tokens.append((ch, ch))
            i += 1
        elif ch == "{":
            depth = 0
            j = i
            while j < len(text):
                if text[j] == "{":
                    depth += 1
                elif text[j] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth != 0:
                raise UsageError("unbalanced braces in expression")
            tokens.append(("VSET", text[i:j + 1]))
            i = j + 1
        elif ch in "\"'":
            j = text.find(ch, i + 1)
            if j < 0:
                raise UsageError("unterminated string in expression")
            tokens.append(("WORD", text[i + 1:j]))
            i = j + 1
        elif ch in _WORD_CHARS:
            j = i
            while j < len(text) and text[j] in _WORD_CHARS:
                j += 1
            tokens.append(("WORD", text[i:j]))
            i = j
        else:
            raise UsageError(f"unexpected character {ch!r} in expression")
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None):
        tok = self.peek()
        if tok[0] is None:
            raise UsageError("unexpected end of expression")
        if kind is not None and tok[0] != kind:
            raise UsageError(f"expected {kind}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] is not None:
            raise UsageError(f"trailing input from {self.peek()[1]!r}")
        return node

    def expr(self):
        kind, text = self.take()
        if kind == "VSET":
            return ("vset", text)
        if kind != "WORD":
            raise UsageError(f"expected a name, got {text!r}")
        if self.peek()[0] == "(":
            self.take("(")
            args = []
            if self.peek()[0] != ")":
                args.append(self.expr())
                while self.peek()[0] == ",":
                    self.take(",")
                    args.append(self.expr())
            self.take(")")
            return ("call", text, args)
        return ("word", text)


def _parse_vertex_set(text: str, X: TruncatedSimplicialSet) -> list:
    try:
        raw = ast.literal_eval(text) if text.strip() != "{}" else set()
    except (ValueError, SyntaxError) as exc:
        raise UsageError(f"bad vertex set {text!r}: {exc}") from exc
    if isinstance(raw, dict):
        raise UsageError(f"bad vertex set {text!r}")
    verts = []
    have = X.simplex_set(0)
    for v in raw:
        if v in have:
            verts.append(v)
        elif (v,) in have:
            verts.append((v,))
        else:
            raise UsageError(f"vertex {v!r} not found among "
                             f"{sorted(map(fmt, have))[:8]}")
    return verts


def _parse_literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise UsageError(f"bad literal {text!r}: {exc}") from exc


class Evaluator:
    def __init__(self, workspace: Workspace, D: int):
        self.workspace = workspace
        self.D = D

    def eval(self, node) -> Value:
        if node[0] == "word":
            word = node[1]
            if word == "J":
                return Value("sset", make_J(self.D))
            return self.workspace.load(word)
        if node[0] == "vset":
            raise UsageError("vertex sets are only valid as arguments")
        _, name, args = node

        def ints(k):
            if len(args) != k or any(a[0] != "word" for a in args):
                raise UsageError(f"{name} expects {k} integer argument(s)")
            try:
                return [int(a[1]) for a in args]
            except ValueError as exc:
                raise UsageError(f"{name} expects integers: {exc}") from exc

        if name == "delta":
            (n,) = ints(1)
            return Value("sset", make_delta(n, self.D))
        if name == "boundary":
            (n,) = ints(1)
            return Value("sset", make_boundary(n, self.D))
        if name == "nerve":
            if len(args) != 1 or args[0][0] != "word":
                raise UsageError("nerve expects a category file path")
            path = args[0][1]
            if not os.path.exists(path):
                raise UsageError(f"category file not found: {path}")
            with open(path) as fh:
                C = category_from_jsonable(json.load(fh))
            return Value("sset", nerve(C, self.D))
        if name == "product":
            if len(args) != 2:
                raise UsageError("product expects two objects")
            a = self.eval(args[0]).require_sset()
            b = self.eval(args[1]).require_sset()
            return Value("sset", product(a, b))
        if name == "fullsub":
            if len(args) != 2 or args[1][0] != "vset":
                raise UsageError("fullsub expects (object, {vertices})")
            a = self.eval(args[0]).require_sset()
            return Value("inclusion", full_subcomplex(a, _parse_vertex_set(args[1][1], a)))
        if name == "skeleton":
            if len(args) != 2 or args[1][0] != "word":
                raise UsageError("skeleton expects (object, k)")
            a = self.eval(args[0]).require_sset()
            return Value("inclusion", skeleton(a, int(args[1][1])))
        if name == "widen":
            if len(args) != 2 or args[1][0] != "vset":
                raise UsageError("widen expects (object, {vertices})")
            a = self.eval(args[0]).require_sset()
            return Value("inclusion", widen(a, _parse_vertex_set(args[1][1], a)).result)
        if name == "isoplex":
            n, i = ints(2)
            return Value("sset", isoplex(n, i, self.D).body)
        if name == "isohorn":
            n, i = ints(2)
            return Value("inclusion", isohorn(n, i, self.D).inclusion)
        if name == "pushout_product":
            if len(args) != 2:
                raise UsageError("pushout_product expects two inclusions")
            f = self.eval(args[0]).require_inclusion()
            g = self.eval(args[1]).require_inclusion()
            from .lifting import pushout_product
            return Value("inclusion", pushout_product(f, g))
        if name == "class_A":
            (n,) = ints(1)
            return Value("inclusion", class_A(n, self.D))
        raise UsageError(f"unknown constructor {name!r}")


def evaluate_expression(expr: str, workspace: Workspace, D: int) -> Value:
    return Evaluator(workspace, D).eval(_Parser(_tokenize(expr)).parse())


# ---------------------------------------------------------------------------
# dot export
# ---------------------------------------------------------------------------


def export_dot(X: TruncatedSimplicialSet, name: str = "G") -> str:
    """The 1-skeleton as a digraph; opposite nondegenerate edge pairs are
    marked in blue, matching the double-arrow drawing convention."""
    nodes = list(X.simplices_at(0))
    edges = []
    for e in X.nondegenerate(1):
        src, tgt = X.vertex_tuple(1, e)
        edges.append((src, tgt, e))
    by_pair = {}
    for (src, tgt, e) in edges:
        by_pair.setdefault((src, tgt), []).append(e)
    marked = set()
    for (src, tgt), fwd in sorted(by_pair.items(),
                                  key=lambda kv: (sort_key(kv[0][0]), sort_key(kv[0][1]))):
        if src == tgt or sort_key(src) > sort_key(tgt):
            continue
        back = by_pair.get((tgt, src), [])
        for e1, e2 in zip(fwd, back):
            marked.add((src, tgt, e1))
            marked.add((tgt, src, e2))
    lines = [f'digraph "{name}" {{']
    for v in nodes:
        lines.append(f'  "{fmt(v)}";')
    for (src, tgt, e) in edges:
        attr = " [color=blue]" if (src, tgt, e) in marked else ""
        lines.append(f'  "{fmt(src)}" -> "{fmt(tgt)}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    ws = Workspace(args.workspace)
    value = evaluate_expression(args.expr, ws, args.dim)
    if value.kind == "sset":
        rep = validate_sset(value.payload, subject=args.name)
    else:
        rep = validate_map(value.payload, subject=args.name)
    if not rep.ok:
        print(rep, file=sys.stderr)
        return 1
    ws.save(args.name, value, force=args.force)
    obj = value.as_sset()
    counts = ",".join(str(len(obj.simplices_at(n)))
                      for n in range(obj.truncation_dim + 1))
    print(f"built {args.name} ({value.kind}, D={args.dim}, sizes {counts}) "
          f"-> {ws.path(args.name)}")
    return 0


def _report_path(args, default_name: str) -> str:
    if args.out:
        return args.out
    return os.path.join(args.workspace, default_name)


def cmd_check(args) -> int:
    ws = Workspace(args.workspace)
    value = ws.load(args.name)
    X = value.as_sset()
    N = args.max_horn
    if N > X.truncation_dim:
        raise UsageError(f"--max-horn {N} exceeds the object truncation "
                         f"{X.truncation_dim}")
    report = check_rlp(X, args.family, N, target_name=args.name)
    path = _report_path(args, f"{args.name}.{args.family}.report.json")
    atomic_write(path, canonical_dumps(report.to_jsonable()))
    if args.format == "text":
        for v in report.verdicts:
            print(f"{'pass' if v.passed else 'FAIL'}  {v.map_id}  "
                  f"({v.squares_checked} squares)")
    if report.passed:
        print(f"{args.name}: pass (no obstruction up to D="
              f"{X.truncation_dim}); report: {path}")
        return 0
    failed = ", ".join(v.map_id for v in report.failures())
    print(f"{args.name}: FAIL against {failed}; witness file: {path}")
    return 1


def cmd_decompose(args) -> int:
    ws = Workspace(args.workspace)
    value = ws.load(args.name)
    inner = value.require_inclusion()
    Y = inner.codomain
    vert = _parse_literal(args.vertex)
    if not Y.has_simplex(0, vert):
        if Y.has_simplex(0, (vert,)):
            vert = (vert,)
        else:
            raise UsageError(f"vertex {args.vertex!r} not in the codomain")
    try:
        dec = decompose_single_narrow(inner, vert)
    except NotNarrowError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    verification = verify_decomposition(dec)
    doc = decomposition_to_jsonable(dec)
    doc["verification"] = verification.to_jsonable()
    path = _report_path(args, f"{args.name}.decomposition.json")
    atomic_write(path, canonical_dumps(doc))
    pre = 1 if dec.prestage is not None else 0
    print(f"decomposed {args.name} at {fmt(vert)}: "
          f"{len(dec.stages)} stage(s){' + prestage' if pre else ''}, "
          f"{dec.total_cells()} cell(s)")
    for k, c in sorted(dec.counts.items()):
        print(f"  N_{k} = {c}")
    if dec.truncated:
        print(f"  truncated: unattached cells {dec.leftover} "
              f"(sound through dimension {dec.sound_dim})")
    print(f"report: {path}")
    return 0 if (dec.ok and verification.ok) else 1


def cmd_verify(args) -> int:
    result = run_suite(args.suite, args.dim, args.max_horn)
    path = _report_path(args, f"verify.{args.suite}.json")
    atomic_write(path, canonical_dumps(result.to_jsonable()))
    print(result.table())
    print(f"report: {path}")
    return 0 if result.ok else 1


def cmd_export_dot(args) -> int:
    ws = Workspace(args.workspace)
    value = ws.load(args.name)
    X = value.as_sset()
    if args.format == "json":
        from .serialize import sset_to_jsonable
        text = canonical_dumps(sset_to_jsonable(X))
    else:
        text = export_dot(X, name=args.name)
    if args.out:
        atomic_write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssetlift",
        description="Truncated simplicial sets: widenings, iso-horns, "
                    "and brute-force lifting checks.")
    parser.add_argument("--workspace", default="workspace",
                        help="directory of persisted objects (default: ./workspace)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="evaluate an expression and persist it")
    p.add_argument("expr", help="e.g. 'widen(delta(2), {2})' or 'isohorn(2,0)'")
    p.add_argument("--name", required=True)
    p.add_argument("--dim", type=int, required=True, help="truncation dimension D")
    p.add_argument("--force", action="store_true", help="replace an existing name")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="truncated RLP check against a family")
    p.add_argument("name")
    p.add_argument("--family", choices=FAMILIES, default="iso_horns")
    p.add_argument("--max-horn", type=int, required=True, help="largest index N")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decompose",
                       help="cell decomposition of a widened inclusion")
    p.add_argument("name", help="a persisted inclusion X -> Y")
    p.add_argument("--vertex", required=True,
                   help="narrow vertex of the codomain, e.g. '0' or '(0, 1)'")
    p.add_argument("--dim", type=int, help="must match the object truncation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="run a built-in verification suite")
    p.add_argument("--suite", choices=("sec4", "sec5", "theorem"), required=True)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--max-horn", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot", help="emit the 1-skeleton as a digraph")
    p.add_argument("name")
    p.add_argument("--out")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SsetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
