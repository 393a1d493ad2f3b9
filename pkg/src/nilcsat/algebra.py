"""Supernilpotent algebras of order q**h in coordinatized (wreath product) form.

An element is a tuple of h residues mod q, grouped into levels of sizes
alphas[0], ..., alphas[s-1], level 1 first. Every basic operation acts on
level j as a linear map of the level-j coordinates of its arguments plus a
tail that reads only coordinates of deeper levels j+1 .. s. The deepest
level s therefore has a constant tail.

Elements are also addressed by an integer index: the base-q number whose
digits are the coordinates, level-1 digit most significant. Circuits and
solvers work on indices; `eval_op` works on coordinate tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from . import config
from .errors import DomainError, FormatError, UsageError
from .gf import PrimeField
from .poly import MultiPoly, format_poly, interpolate

Element = tuple  # tuple[int, ...] of coordinates

ARG_NAMES = "xyzwvutsrponmlkjihgfedcba"


def coordinate_names(n_args: int, h: int, coords: Sequence[int] | None = None) -> list:
    """Names for coordinate k (1-based) of argument i: x2, y1, ... ."""
    coords = range(1, h + 1) if coords is None else coords
    if n_args <= len(ARG_NAMES):
        return [f"{ARG_NAMES[i]}{k}" for i in range(n_args) for k in coords]
    return [f"v{i + 1}_{k}" for i in range(n_args) for k in coords]


@dataclass(frozen=True)
class Coordinatization:
    q: int
    alphas: tuple

    def __post_init__(self):
        PrimeField(self.q)
        if not self.alphas or any(a < 1 for a in self.alphas):
            raise DomainError(f"alphas must be positive, got {self.alphas}")
        object.__setattr__(self, "alphas", tuple(int(a) for a in self.alphas))

    @property
    def s(self) -> int:
        return len(self.alphas)

    @property
    def h(self) -> int:
        return sum(self.alphas)

    @property
    def size(self) -> int:
        return self.q**self.h

    def offset(self, level: int) -> int:
        """Number of coordinates in levels 1 .. level-1."""
        return sum(self.alphas[: level - 1])

    def level_slice(self, level: int) -> slice:
        start = self.offset(level)
        return slice(start, start + self.alphas[level - 1])

    def level_of(self, k: int) -> int:
        """Level of the 1-based coordinate k."""
        if not 1 <= k <= self.h:
            raise UsageError(f"coordinate {k} out of range 1..{self.h}")
        acc = 0
        for j, a in enumerate(self.alphas, start=1):
            acc += a
            if k <= acc:
                return j
        raise AssertionError("unreachable")

    def tail_coords(self, level: int) -> list:
        """1-based coordinates read by a level's tail (all deeper levels)."""
        return list(range(self.offset(level) + self.alphas[level - 1] + 1, self.h + 1))


class Tail:
    """The tail t_f^j of one level: a map from deeper coordinates to alpha_j values.

    Stored as a value table (canonical) when it fits, otherwise as polynomials.
    Inputs are ordered argument by argument, each contributing its deeper
    coordinates in coordinate order.
    """

    def __init__(self, q: int, n_vars: int, width: int, table=None, polys=None):
        self.q, self.n_vars, self.width = q, n_vars, width
        if table is None and polys is None:
            table = np.zeros((q**n_vars, width), dtype=np.int64)
        if table is not None:
            table = np.asarray(table, dtype=np.int64).reshape(q**n_vars, width) % q
        if polys is not None:
            polys = tuple(polys)
            if len(polys) != width or any(p.n_vars != n_vars for p in polys):
                raise UsageError(f"tail needs {width} polynomials in {n_vars} variables")
            if table is None and q**n_vars <= config.TABLE_LIMIT:
                table = np.stack([p.value_table() for p in polys], axis=1)
                polys = None
        self.table, self.polys = table, polys

    @classmethod
    def const(cls, q, width, values):
        return cls(q, 0, width, table=np.asarray(values, dtype=np.int64).reshape(1, width))

    def is_zero(self) -> bool:
        if self.table is not None:
            return not self.table.any()
        return all(p.is_zero() for p in self.polys)

    def as_polys(self) -> list:
        if self.polys is not None:
            return list(self.polys)
        field = PrimeField(self.q)
        return [interpolate(field, self.n_vars, self.table[:, c]) for c in range(self.width)]

    def evaluate(self, inputs: Sequence[int]) -> tuple:
        if self.table is not None:
            idx = 0
            for v in inputs:
                idx = idx * self.q + v
            return tuple(int(v) for v in self.table[idx])
        return tuple(p.evaluate(inputs).value for p in self.polys)

    def evaluate_many(self, inputs: np.ndarray) -> np.ndarray:
        """inputs: (P, n_vars) residues -> (P, width)."""
        if self.table is not None:
            idx = np.zeros(inputs.shape[0], dtype=np.int64)
            for c in range(self.n_vars):
                idx = idx * self.q + inputs[:, c]
            return self.table[idx]
        return np.stack([p.evaluate_many(inputs) for p in self.polys], axis=1)


@dataclass(frozen=True)
class LevelSpec:
    linear: tuple  # one alpha_j x alpha_j matrix (tuple of row tuples) per argument
    tail: Tail


@dataclass(frozen=True)
class OperationSpec:
    """A basic operation. kind is "sum", "structured" or "table"."""

    name: str
    arity: int
    kind: str
    levels: tuple | None = None
    table: np.ndarray | None = None  # result index per argument-index tuple

    @classmethod
    def builtin_sum(cls, coord: Coordinatization, arity: int = 2, name: str = "+"):
        q, levels = coord.q, []
        for j, a in enumerate(coord.alphas, start=1):
            ident = tuple(tuple(int(r == c) for c in range(a)) for r in range(a))
            n_tail = arity * len(coord.tail_coords(j))
            levels.append(LevelSpec((ident,) * arity, Tail(q, n_tail, a)))
        return cls(name, arity, "sum", tuple(levels))

    @classmethod
    def structured(cls, coord: Coordinatization, name: str, arity: int, levels: Sequence):
        levels = tuple(levels)
        if len(levels) != coord.s:
            raise UsageError(f"operation {name} needs {coord.s} levels, got {len(levels)}")
        for j, (lv, a) in enumerate(zip(levels, coord.alphas), start=1):
            if len(lv.linear) != arity:
                raise UsageError(f"{name} level {j}: need {arity} linear matrices")
            for mat in lv.linear:
                if len(mat) != a or any(len(row) != a for row in mat):
                    raise UsageError(f"{name} level {j}: linear parts must be {a}x{a}")
            n_tail = arity * len(coord.tail_coords(j))
            if lv.tail.n_vars != n_tail or lv.tail.width != a:
                raise UsageError(
                    f"{name} level {j}: tail must map {n_tail} coordinates to {a} values"
                )
        return cls(name, arity, "structured", levels)

    @classmethod
    def from_table(cls, name: str, arity: int, table):
        return cls(name, arity, "table", table=np.asarray(table, dtype=np.int64))


class DegreeBound(NamedTuple):
    coarse: int
    refined: int

    def get(self, choice: str) -> int:
        if choice not in ("coarse", "refined"):
            raise UsageError(f"d choice must be 'refined' or 'coarse', got {choice!r}")
        return getattr(self, choice)


class _FiniteAlgebra:
    """Shared machinery: index codec, elements, cached operation tables."""

    size: int
    arities: dict

    def __init__(self):
        self._tables: dict = {}

    @property
    def max_arity(self) -> int:
        return max(self.arities.values(), default=0)

    def arity(self, name: str) -> int:
        if name not in self.arities:
            raise UsageError(f"unknown operation {name!r}")
        return self.arities[name]

    def elements(self):
        return [self.decode(i) for i in range(self.size)]

    @property
    def zero(self):
        return self.decode(0)

    def op_table(self, name: str):
        """Flat result-index table over all argument tuples, or None if too large."""
        if name not in self._tables:
            l = self.arity(name)
            n = self.size**l
            if n > config.TABLE_LIMIT:
                self._tables[name] = None
            else:
                idx = np.arange(n, dtype=np.int64)
                args = []
                for _ in range(l):
                    args.append(idx % self.size)
                    idx = idx // self.size
                self._tables[name] = self._apply_many(name, args[::-1])
        return self._tables[name]

    def apply_many(self, name: str, args: Sequence[np.ndarray]) -> np.ndarray:
        """Apply an operation to arrays of element indices, elementwise."""
        l = self.arity(name)
        if len(args) != l:
            raise UsageError(f"{name} has arity {l}, got {len(args)} arguments")
        table = self.op_table(name)
        if table is None:
            return self._apply_many(name, args)
        idx = np.zeros(np.shape(args[0]) if l else (), dtype=np.int64)
        for a in args:
            idx = idx * self.size + a
        return table[idx]

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_tables", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._tables = {}


class CoordAlgebra(_FiniteAlgebra):
    def __init__(self, coord: Coordinatization, operations: Sequence[OperationSpec], validate=True):
        super().__init__()
        self.coord = coord
        self.ops = {}
        for op in operations:
            if op.name in self.ops:
                raise UsageError(f"operation {op.name!r} defined twice")
            if op.arity < 1:
                raise UsageError(f"operation {op.name!r} must have arity >= 1")
            if op.kind == "table" and op.table.size != coord.size**op.arity:
                raise UsageError(f"table of {op.name} needs {coord.size ** op.arity} entries")
            self.ops[op.name] = op
        if "+" not in self.ops:
            raise DomainError("algebra must contain the componentwise sum '+'")
        if validate:
            report = validate_triangular(self, strict=False)
            if not report.valid:
                raise DomainError("operations are not triangular: " + "; ".join(report.issues[:5]))

    @property
    def q(self) -> int:
        return self.coord.q

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.coord.q)

    @property
    def h(self) -> int:
        return self.coord.h

    @property
    def alphas(self) -> tuple:
        return self.coord.alphas

    @property
    def size(self) -> int:
        return self.coord.size

    @cached_property
    def arities(self) -> dict:
        return {name: op.arity for name, op in self.ops.items()}

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array([self.q ** (self.h - 1 - k) for k in range(self.h)], dtype=np.int64)

    def __repr__(self):
        return f"CoordAlgebra(q={self.q}, alphas={self.alphas}, ops={list(self.ops)})"

    # -- codec ------------------------------------------------------------

    def encode(self, elem: Element) -> int:
        self.check_element(elem)
        idx = 0
        for v in elem:
            idx = idx * self.q + v
        return idx

    def decode(self, idx: int) -> Element:
        if not 0 <= idx < self.size:
            raise UsageError(f"element index {idx} out of range")
        out = []
        for _ in range(self.h):
            idx, r = divmod(idx, self.q)
            out.append(r)
        return tuple(reversed(out))

    def digits_many(self, idx: np.ndarray) -> np.ndarray:
        """(P,) element indices -> (P, h) coordinates."""
        return (np.asarray(idx, dtype=np.int64)[:, None] // self._weights) % self.q

    def encode_many(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self._weights

    def check_element(self, elem: Element):
        if len(elem) != self.h or any(not 0 <= v < self.q for v in elem):
            raise UsageError(f"{elem!r} is not an element of an algebra of order {self.q}^{self.h}")

    def parse_element(self, text: str) -> Element:
        text = text.strip()
        if len(text) != self.h or not text.isdigit():
            raise FormatError(f"element {text!r} must be {self.h} base-{self.q} digits")
        elem = tuple(int(c) for c in text)
        if any(v >= self.q for v in elem):
            raise FormatError(f"element {text!r} has a digit >= {self.q}")
        return elem

    def format_element(self, elem: Element) -> str:
        self.check_element(elem)
        return "".join(str(v) for v in elem)

    def unit(self, level: int) -> Element:
        """1 at the first coordinate of `level`, 0 elsewhere."""
        out = [0] * self.h
        out[self.coord.offset(level)] = 1
        return tuple(out)

    # -- evaluation -------------------------------------------------------

    def eval_op(self, name: str, args: Sequence[Element]) -> Element:
        """Reference evaluation straight from the level-wise operation law."""
        op = self.ops.get(name)
        if op is None:
            raise UsageError(f"unknown operation {name!r}")
        if len(args) != op.arity:
            raise UsageError(f"{name} has arity {op.arity}, got {len(args)} arguments")
        for a in args:
            self.check_element(a)
        if op.kind == "table":
            idx = 0
            for a in args:
                idx = idx * self.size + self.encode(a)
            return self.decode(int(op.table[idx]))
        q, coord = self.q, self.coord
        out = [0] * self.h
        for j, lv in enumerate(op.levels, start=1):
            sl = coord.level_slice(j)
            deeper = [c - 1 for c in coord.tail_coords(j)]
            tail_in = [a[c] for a in args for c in deeper]
            acc = list(lv.tail.evaluate(tail_in))
            for mat, a in zip(lv.linear, args):
                part = a[sl]
                for r, row in enumerate(mat):
                    acc[r] += sum(m * v for m, v in zip(row, part))
            out[sl] = [v % q for v in acc]
        return tuple(out)

    def _apply_many(self, name: str, args: Sequence[np.ndarray]) -> np.ndarray:
        op = self.ops[name]
        args = [np.asarray(a, dtype=np.int64) for a in args]
        if op.kind == "table":
            idx = np.zeros(args[0].shape, dtype=np.int64)
            for a in args:
                idx = idx * self.size + a
            return op.table[idx]
        q, coord = self.q, self.coord
        digits = [self.digits_many(a) for a in args]
        out = np.zeros((args[0].shape[0], self.h), dtype=np.int64)
        for j, lv in enumerate(op.levels, start=1):
            sl = coord.level_slice(j)
            deeper = [c - 1 for c in coord.tail_coords(j)]
            if lv.tail.n_vars:
                tail_in = np.concatenate([d[:, deeper] for d in digits], axis=1)
            else:
                tail_in = np.zeros((out.shape[0], 0), dtype=np.int64)
            acc = lv.tail.evaluate_many(tail_in).copy()
            for mat, d in zip(lv.linear, digits):
                m = np.asarray(mat, dtype=np.int64)
                if m.any():
                    acc += d[:, sl] @ m.T
            out[:, sl] = acc % q
        return self.encode_many(out)


@dataclass
class TriangularityReport:
    issues: list
    checked: list  # operation names that were checked semantically

    @property
    def valid(self) -> bool:
        return not self.issues


def validate_triangular(alg: CoordAlgebra, strict=True, limit=None) -> TriangularityReport:
    """Interpolate every output coordinate and check it only reads what it may.

    A level-j output coordinate may contain any monomial in coordinates of
    deeper levels, and degree-1 monomials in a single level-j coordinate.
    Anything else (level-j products, mixed terms, reads of shallower levels)
    is reported with the coordinate and the offending monomial.
    With strict=False, operations too large to interpolate are skipped
    (structured operations are triangular by construction).
    """
    coord, q, h = alg.coord, alg.q, alg.h
    field = PrimeField(q)
    issues, checked = [], []
    for name, op in alg.ops.items():
        l = op.arity
        points = q ** (h * l)
        if points > (config.EXHAUSTION_LIMIT if limit is None else limit):
            if strict or op.kind == "table":
                config.check_exhaustion(points, f"triangularity check of {name}", limit)
            continue
        checked.append(name)
        results = alg.digits_many(alg._apply_many(name, _all_arg_indices(alg.size, l)))
        names = coordinate_names(l, h)
        for k in range(h):
            level = coord.level_of(k + 1)
            p = interpolate(field, h * l, results[:, k])
            for exps, _ in p.terms():
                used = [i for i, e in enumerate(exps) if e]
                levels = [coord.level_of(i % h + 1) for i in used]
                if all(lv > level for lv in levels):
                    continue
                if len(used) == 1 and levels[0] == level and exps[used[0]] == 1:
                    continue
                mono = MultiPoly(field, h * l, {exps: 1})
                issues.append(
                    f"{name}: output coordinate {k + 1} (level {level}) has monomial "
                    f"{format_poly(mono, names)}"
                )
    return TriangularityReport(issues, checked)


def _all_arg_indices(size: int, arity: int) -> list:
    idx = np.arange(size**arity, dtype=np.int64)
    args = []
    for _ in range(arity):
        args.append(idx % size)
        idx //= size
    return args[::-1]


def build_example(q: int, h: int, m: int) -> CoordAlgebra:
    """A[h, m]: h copies of Z_q with + and p_1..p_{h-1}.

    p_i writes the product of coordinate i+1 of its m arguments into
    coordinate i and zero everywhere else.
    """
    if h < 1:
        raise DomainError(f"h must be >= 1, got {h}")
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    coord = Coordinatization(q, (1,) * h)
    field = PrimeField(q)
    zero_mat = ((0,),)
    ops = [OperationSpec.builtin_sum(coord)]
    for i in range(1, h):
        levels = []
        for j in range(1, h + 1):
            n_tail = m * (h - j)
            if j == i:
                # each argument contributes coordinates j+1..h; take the first of each block
                exps = [0] * n_tail
                for a in range(m):
                    exps[a * (h - j)] = 1
                tail = Tail(q, n_tail, 1, polys=[MultiPoly(field, n_tail, {tuple(exps): 1})])
            else:
                tail = Tail(q, n_tail, 1)
            levels.append(LevelSpec((zero_mat,) * m, tail))
        ops.append(OperationSpec.structured(coord, f"p{i}", m, levels))
    return CoordAlgebra(coord, ops)


def degree_bound(alg: CoordAlgebra) -> DegreeBound:
    """Bounds on the degree of the field polynomial f of any equation over alg.

    coarse = (m q)**h, which equals |A|**(log_q m + 1);
    refined = (q - 1) (m q)**(h - alpha_s) alpha_s.
    """
    q, h, m = alg.q, alg.h, alg.max_arity
    a_s = alg.alphas[-1]
    return DegreeBound(coarse=(m * q) ** h, refined=(q - 1) * (m * q) ** (h - a_s) * a_s)


def sys_pol_bound(alg: CoordAlgebra) -> int:
    """(m q)**(alpha_1 + ... + alpha_{s-1}) * alpha_s."""
    m, q = alg.max_arity, alg.q
    return (m * q) ** (alg.h - alg.alphas[-1]) * alg.alphas[-1]


class ProductAlgebra(_FiniteAlgebra):
    """Direct product of algebras with a common signature (primes may differ).

    Elements are tuples of factor elements; indices are mixed-radix with the
    first factor most significant. Text form joins factor digit strings by '|'.
    """

    def __init__(self, factors: Sequence):
        super().__init__()
        self.factors = tuple(factors)
        if len(self.factors) < 2:
            raise UsageError("a product needs at least two factors")
        sig = self.factors[0].arities
        for f in self.factors[1:]:
            if f.arities != sig:
                raise UsageError(
                    f"signature mismatch: {sorted(sig.items())} vs {sorted(f.arities.items())}"
                )
        self.arities = dict(sig)
        self.size = math.prod(f.size for f in self.factors)

    def __repr__(self):
        return f"ProductAlgebra({', '.join(repr(f) for f in self.factors)})"

    @property
    def ops(self):
        return self.arities

    def encode(self, elem) -> int:
        if len(elem) != len(self.factors):
            raise UsageError(f"product element needs {len(self.factors)} components")
        idx = 0
        for f, e in zip(self.factors, elem):
            idx = idx * f.size + f.encode(e)
        return idx

    def decode(self, idx: int):
        if not 0 <= idx < self.size:
            raise UsageError(f"element index {idx} out of range")
        out = []
        for f in reversed(self.factors):
            idx, r = divmod(idx, f.size)
            out.append(f.decode(r))
        return tuple(reversed(out))

    def split_many(self, idx: np.ndarray) -> list:
        """(P,) product indices -> one (P,) index array per factor."""
        idx = np.asarray(idx, dtype=np.int64)
        out = []
        for f in reversed(self.factors):
            out.append(idx % f.size)
            idx = idx // f.size
        return out[::-1]

    def join_many(self, parts: Sequence[np.ndarray]) -> np.ndarray:
        idx = np.zeros(np.shape(parts[0]), dtype=np.int64)
        for f, p in zip(self.factors, parts):
            idx = idx * f.size + p
        return idx

    def project(self, elem, i: int):
        return elem[i]

    def parse_element(self, text: str):
        parts = text.strip().split("|")
        if len(parts) != len(self.factors):
            raise FormatError(f"product element {text!r} needs {len(self.factors)} '|'-separated parts")
        return tuple(f.parse_element(p) for f, p in zip(self.factors, parts))

    def format_element(self, elem) -> str:
        return "|".join(f.format_element(e) for f, e in zip(self.factors, elem))

    def eval_op(self, name: str, args):
        self.arity(name)
        return tuple(
            f.eval_op(name, [a[i] for a in args]) for i, f in enumerate(self.factors)
        )

    def _apply_many(self, name: str, args):
        split = [self.split_many(a) for a in args]
        parts = [
            f.apply_many(name, [s[i] for s in split]) for i, f in enumerate(self.factors)
        ]
        return self.join_many(parts)


def direct_product(*algebras) -> ProductAlgebra:
    return ProductAlgebra(algebras)


def all_tuples(alg, arity: int):
    return product(alg.elements(), repeat=arity)
