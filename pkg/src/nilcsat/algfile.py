"""Reading and writing the line-oriented algebra format.

    ALGEBRA v1
    q 2
    alphas 1 1
    op + 2 builtin-sum
    op p1 2 structured
      level 1 linear [[0]] [[0]] tail poly x2*y2
      level 2 linear [[0]] [[0]] tail const 0
    op t 2 table
      00 00 -> 00
      ...
    END

Structured levels: ``linear`` takes one alpha_j x alpha_j matrix per argument
(JSON nested lists); ``tail`` is one of

* ``poly P1 ; P2 ; ...`` -- alpha_j polynomials in the deeper coordinates,
  named by argument letter (x, y, z, w, ...) and global coordinate index,
* ``const c1 c2 ...`` -- alpha_j residues (required form for the last level),
* ``table`` -- followed by q**v indented lines ``DIGITS -> DIGITS`` listing
  the deeper coordinates of all arguments and the alpha_j output residues,
* omitted -- zero.

``table`` operations list every argument tuple as ``ARGS -> RESULT`` in
element digit strings. ``#`` starts a comment.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

import numpy as np

from .algebra import (
    ARG_NAMES,
    CoordAlgebra,
    Coordinatization,
    LevelSpec,
    OperationSpec,
    Tail,
    coordinate_names,
)
from .errors import CsatError, FormatError
from .gf import PrimeField
from .poly import format_poly, parse_poly


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield no, line


def _bracket_groups(text, lineno):
    groups, depth, start = [], 0, None
    for i, ch in enumerate(text):
        if ch == "[":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise FormatError("unbalanced ']'", lineno)
            if depth == 0:
                groups.append(text[start : i + 1])
        elif depth == 0 and not ch.isspace():
            raise FormatError(f"unexpected {ch!r} in linear part", lineno)
    if depth:
        raise FormatError("unbalanced '['", lineno)
    try:
        return [json.loads(g) for g in groups]
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad matrix: {exc}", lineno) from None


class _Reader:
    def __init__(self, text):
        self.items = list(_lines(text))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self, what):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise FormatError(f"unexpected end of file, expected {what}", last)
        item = self.items[self.pos]
        self.pos += 1
        return item


def parse_algebra(text: str) -> CoordAlgebra:
    r = _Reader(text)
    no, line = r.next("header")
    if line.split() != ["ALGEBRA", "v1"]:
        raise FormatError("expected header 'ALGEBRA v1'", no)
    q = alphas = None
    for key in ("q", "alphas"):
        no, line = r.next(key)
        parts = line.split()
        if not parts or parts[0] != key or len(parts) < 2:
            raise FormatError(f"expected '{key} ...'", no)
        try:
            vals = [int(v) for v in parts[1:]]
        except ValueError:
            raise FormatError(f"non-integer in {key!r} line", no) from None
        if key == "q":
            if len(vals) != 1:
                raise FormatError("q takes one value", no)
            q = vals[0]
        else:
            alphas = tuple(vals)
    try:
        coord = Coordinatization(q, alphas)
    except CsatError as exc:
        raise FormatError(str(exc), no) from None
    ops = []
    while True:
        no, line = r.next("'op' or 'END'")
        parts = line.split()
        if parts == ["END"]:
            break
        if len(parts) != 4 or parts[0] != "op":
            raise FormatError("expected 'op NAME ARITY KIND' or 'END'", no)
        _, name, arity_s, kind = parts
        try:
            arity = int(arity_s)
        except ValueError:
            raise FormatError(f"bad arity {arity_s!r}", no) from None
        if arity < 1:
            raise FormatError("arity must be >= 1", no)
        try:
            if kind == "builtin-sum":
                ops.append(OperationSpec.builtin_sum(coord, arity, name))
            elif kind == "structured":
                ops.append(_parse_structured(r, coord, name, arity, no))
            elif kind == "table":
                ops.append(_parse_table(r, coord, name, arity, no))
            else:
                raise FormatError(f"unknown operation kind {kind!r}", no)
        except FormatError:
            raise
        except CsatError as exc:
            raise FormatError(str(exc), no) from None
    if r.peek()[0] is not None:
        raise FormatError("content after END", r.peek()[0])
    try:
        return CoordAlgebra(coord, ops)
    except CsatError as exc:
        raise FormatError(str(exc), no) from None


def _parse_structured(r, coord, name, arity, op_line):
    q, field = coord.q, PrimeField(coord.q)
    if arity > len(ARG_NAMES):
        raise FormatError(f"structured operations support arity <= {len(ARG_NAMES)}", op_line)
    levels = {}
    while True:
        no, line = r.peek()
        if line is None or not line.lstrip().startswith("level "):
            break
        r.next("level")
        body = line.strip()[len("level ") :]
        head, _, rest = body.partition(" ")
        try:
            j = int(head)
        except ValueError:
            raise FormatError(f"bad level number {head!r}", no) from None
        if not 1 <= j <= coord.s:
            raise FormatError(f"level {j} out of range 1..{coord.s}", no)
        if j in levels:
            raise FormatError(f"level {j} given twice", no)
        rest = rest.strip()
        if not rest.startswith("linear"):
            raise FormatError("expected 'linear' after the level number", no)
        rest = rest[len("linear") :]
        lin_text, tail_kw, tail_text = rest.partition(" tail ")
        if not tail_kw and rest.rstrip().endswith(" tail"):
            lin_text, tail_text, tail_kw = rest.rstrip()[: -len(" tail")], "", "tail"
        mats = _bracket_groups(lin_text, no)
        a = coord.alphas[j - 1]
        if len(mats) != arity:
            raise FormatError(f"level {j} needs {arity} linear matrices, got {len(mats)}", no)
        for m in mats:
            if (
                not isinstance(m, list)
                or len(m) != a
                or any(not isinstance(row, list) or len(row) != a for row in m)
            ):
                raise FormatError(f"level {j}: linear parts must be {a}x{a} matrices", no)
        linear = tuple(tuple(tuple(int(v) % q for v in row) for row in m) for m in mats)
        deeper = coord.tail_coords(j)
        n_tail = arity * len(deeper)
        tail_text = tail_text.strip()
        kw, _, arg = tail_text.partition(" ")
        if not tail_kw:
            tail = Tail(q, n_tail, a)
        elif kw == "const":
            vals = arg.split()
            if len(vals) != a or not all(v.isdigit() for v in vals):
                raise FormatError(f"tail const needs {a} residues", no)
            if n_tail:
                table = np.tile(np.array([int(v) for v in vals]), (q**n_tail, 1))
                tail = Tail(q, n_tail, a, table=table)
            else:
                tail = Tail.const(q, a, [int(v) for v in vals])
        elif kw == "poly":
            names = coordinate_names(arity, coord.h, deeper)
            pieces = arg.split(";")
            if len(pieces) != a:
                raise FormatError(f"tail poly needs {a} ';'-separated polynomials", no)
            try:
                polys = [parse_poly(s, field, names) for s in pieces]
            except FormatError as exc:
                raise FormatError(
                    f"{exc} (level {j} tails may only read coordinates {deeper})", no
                ) from None
            tail = Tail(q, n_tail, a, polys=polys)
        elif kw == "table":
            rows = {}
            for _ in range(q**n_tail):
                tno, tline = r.next("tail table row")
                lhs, arrow, rhs = tline.partition("->")
                lhs, rhs = lhs.strip(), rhs.strip()
                if not arrow or len(lhs) != n_tail or len(rhs) != a:
                    raise FormatError(f"tail row must be {n_tail} digits -> {a} digits", tno)
                if not (lhs + rhs).isdigit() or any(int(c) >= q for c in lhs + rhs):
                    raise FormatError("tail row digits must be residues", tno)
                key = 0
                for c in lhs:
                    key = key * q + int(c)
                if key in rows:
                    raise FormatError(f"duplicate tail row {lhs}", tno)
                rows[key] = [int(c) for c in rhs]
            tail = Tail(q, n_tail, a, table=[rows[k] for k in range(q**n_tail)])
        else:
            raise FormatError(f"unknown tail kind {kw!r}", no)
        levels[j] = LevelSpec(linear, tail)
    missing = [j for j in range(1, coord.s + 1) if j not in levels]
    if missing:
        raise FormatError(f"operation {name} is missing levels {missing}", op_line)
    return OperationSpec.structured(coord, name, arity, [levels[j] for j in range(1, coord.s + 1)])


def _parse_table(r, coord, name, arity, op_line):
    q, h, size = coord.q, coord.h, coord.size
    n = size**arity
    table = np.full(n, -1, dtype=np.int64)

    def index(text, lineno):
        if len(text) != h or not text.isdigit() or any(int(c) >= q for c in text):
            raise FormatError(f"{text!r} is not an element ({h} base-{q} digits)", lineno)
        v = 0
        for c in text:
            v = v * q + int(c)
        return v

    for _ in range(n):
        no, line = r.next(f"table row of {name}")
        lhs, arrow, rhs = line.partition("->")
        args = lhs.split()
        if not arrow or len(args) != arity:
            raise FormatError(f"table row must be {arity} elements -> element", no)
        key = 0
        for a in args:
            key = key * size + index(a, no)
        if table[key] >= 0:
            raise FormatError(f"duplicate table row {lhs.strip()}", no)
        table[key] = index(rhs.strip(), no)
    return OperationSpec.from_table(name, arity, table)


def load_algebra(path) -> CoordAlgebra:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_algebra(text)


def format_algebra(alg: CoordAlgebra) -> str:
    coord = alg.coord
    out = ["ALGEBRA v1", f"q {alg.q}", "alphas " + " ".join(map(str, alg.alphas))]
    for name, op in alg.ops.items():
        out.append(f"op {name} {op.arity} " + {"sum": "builtin-sum"}.get(op.kind, op.kind))
        if op.kind == "sum":
            continue
        if op.kind == "table":
            for i, args in enumerate(product(range(alg.size), repeat=op.arity)):
                lhs = " ".join(alg.format_element(alg.decode(a)) for a in args)
                out.append(f"  {lhs} -> {alg.format_element(alg.decode(int(op.table[i])))}")
            continue
        for j, lv in enumerate(op.levels, start=1):
            lin = " ".join(json.dumps([list(row) for row in m]).replace(" ", "") for m in lv.linear)
            line = f"  level {j} linear {lin}"
            tail = lv.tail
            if tail.n_vars == 0:
                line += " tail const " + " ".join(str(v) for v in tail.evaluate(()))
            elif not tail.is_zero():
                names = coordinate_names(op.arity, alg.h, coord.tail_coords(j))
                line += " tail poly " + " ; ".join(format_poly(p, names) for p in tail.as_polys())
            out.append(line)
    out.append("END")
    return "\n".join(out) + "\n"


def save_algebra(alg: CoordAlgebra, path):
    Path(path).write_text(format_algebra(alg), encoding="utf-8")
