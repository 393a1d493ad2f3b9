"""Multivariate polynomials over F_q in normal form modulo x**q = x.

Every function F_q^n -> F_q has exactly one representation in which all
exponents lie in {0, ..., q-1}; MultiPoly always stores that one, so
structural equality is functional equality.

Full value tables are flat arrays in ``itertools.product`` order, i.e. the
index of a point is sum(x_i * q**(n-1-i)), first variable most significant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import config
from .errors import FormatError, UsageError
from .gf import FieldElement, PrimeField, reduce_exponent

Monomial = tuple  # tuple[int, ...], one reduced exponent per variable


def _grlex_key(exps):
    return (sum(exps), tuple(-e for e in exps))


class MultiPoly:
    """Immutable sparse polynomial; coefficients are stored as ints mod q."""

    __slots__ = ("field", "n_vars", "_terms", "_hash")

    def __init__(self, field: PrimeField, n_vars: int, terms: Mapping | None = None):
        q = field.q
        clean: dict = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n_vars:
                raise UsageError(f"monomial {exps} does not have {n_vars} exponents")
            if isinstance(c, FieldElement):
                if c.field is not field:
                    raise UsageError("coefficient from a different field")
                c = c.value
            exps = tuple(reduce_exponent(e, q) for e in exps)
            clean[exps] = (clean.get(exps, 0) + int(c)) % q
        self._init(field, n_vars, {k: v for k, v in clean.items() if v})

    def _init(self, field, n_vars, terms):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n_vars", n_vars)
        object.__setattr__(self, "_terms", terms)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, field, n_vars, terms) -> "MultiPoly":
        # terms must already be reduced with no zero coefficients
        obj = object.__new__(cls)
        obj._init(field, n_vars, terms)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    def __reduce__(self):
        return (MultiPoly, (self.field, self.n_vars, dict(self._terms)))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, field, n_vars):
        return cls._raw(field, n_vars, {})

    @classmethod
    def constant(cls, field, n_vars, c):
        c = int(c) % field.q
        return cls._raw(field, n_vars, {(0,) * n_vars: c} if c else {})

    @classmethod
    def one(cls, field, n_vars):
        return cls.constant(field, n_vars, 1)

    @classmethod
    def variable(cls, field, n_vars, i):
        if not 0 <= i < n_vars:
            raise UsageError(f"variable index {i} out of range for arity {n_vars}")
        exps = [0] * n_vars
        exps[i] = 1
        return cls._raw(field, n_vars, {tuple(exps): 1})

    @classmethod
    def linear(cls, field, coeffs: Sequence[int], const: int = 0):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exps = [0] * n
            exps[i] = 1
            terms[tuple(exps)] = c
        terms[(0,) * n] = const
        return cls(field, n, terms)

    # -- inspection -------------------------------------------------------

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def coefficients(self) -> Mapping:
        """Read-only view monomial -> int coefficient."""
        return dict(self._terms)

    def terms(self):
        """(monomial, FieldElement) pairs in graded lexicographic order."""
        for exps in sorted(self._terms, key=_grlex_key):
            yield exps, FieldElement(self._terms[exps], self.field)

    def coefficient(self, exps) -> FieldElement:
        return FieldElement(self._terms.get(tuple(exps), 0), self.field)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def constant_term(self) -> FieldElement:
        return self.coefficient((0,) * self.n_vars)

    def support(self) -> set:
        """Indices of variables that occur in some monomial."""
        return {i for exps in self._terms for i, e in enumerate(exps) if e}

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.field is other.field
            and self.n_vars == other.n_vars
            and self._terms == other._terms
        )

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash((self.q, self.n_vars, frozenset(self._terms.items())))
            )
        return self._hash

    def __repr__(self):
        return f"MultiPoly(F{self.q}, n={self.n_vars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.field is not self.field or other.n_vars != self.n_vars:
                raise UsageError(
                    f"polynomials over F_{other.q}^{other.n_vars} and "
                    f"F_{self.q}^{self.n_vars} do not mix"
                )
            return other
        if isinstance(other, (int, FieldElement)):
            if isinstance(other, FieldElement) and other.field is not self.field:
                raise UsageError("scalar from a different field")
            return MultiPoly.constant(self.field, self.n_vars, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self.q
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = (out.get(exps, 0) + c) % q
            if v:
                out[exps] = v
            else:
                out.pop(exps, None)
        return MultiPoly._raw(self.field, self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        q = self.q
        return MultiPoly._raw(self.field, self.n_vars, {e: q - c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "MultiPoly":
        c = int(c) % self.q
        if not c:
            return MultiPoly.zero(self.field, self.n_vars)
        q = self.q
        return MultiPoly._raw(self.field, self.n_vars, {e: v * c % q for e, v in self._terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self.q
        qm1 = q - 1
        out: dict = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                exps = tuple(
                    a + b - qm1 if a + b >= q else a + b for a, b in zip(ea, eb)
                )
                out[exps] = (out.get(exps, 0) + ca * cb) % q
        return MultiPoly._raw(self.field, self.n_vars, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise UsageError("negative powers of polynomials are not defined")
        result = MultiPoly.one(self.field, self.n_vars)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- evaluation -------------------------------------------------------

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> FieldElement:
        if len(point) != self.n_vars:
            raise UsageError(f"expected {self.n_vars} coordinates, got {len(point)}")
        q = self.q
        xs = []
        for x in point:
            if isinstance(x, FieldElement) and x.field is not self.field:
                raise UsageError("point coordinate from a different field")
            xs.append(int(x) % q)
        total = 0
        for exps, c in self._terms.items():
            t = c
            for x, e in zip(xs, exps):
                if e:
                    t = t * pow(x, e, q) % q
            total += t
        return FieldElement(total, self.field)

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; `points` has shape (P, n_vars) of residues."""
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.n_vars:
            raise UsageError(f"points must have shape (P, {self.n_vars})")
        q = self.q
        powers = [[None] * q for _ in range(self.n_vars)]
        out = np.zeros(points.shape[0], dtype=np.int64)
        for exps, c in self._terms.items():
            t = np.full(points.shape[0], c, dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    if powers[i][e] is None:
                        powers[i][e] = np.mod(points[:, i] ** e, q)
                    t = t * powers[i][e] % q
            out += t
        return out % q

    def value_table(self, limit=None) -> np.ndarray:
        """All q**n values, in product order."""
        q, n = self.q, self.n_vars
        config.check_exhaustion(q**n, "value table", limit)
        coeffs = np.zeros((q,) * n, dtype=np.int64)
        for exps, c in self._terms.items():
            coeffs[exps] = c
        return _axis_transform(coeffs, _vandermonde(q), q).reshape(-1)

    # -- substitution -----------------------------------------------------

    def compose(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace variable i by images[i]; all images share one arity."""
        if len(images) != self.n_vars:
            raise UsageError(f"need {self.n_vars} images, got {len(images)}")
        if not images:
            return self
        field, m = images[0].field, images[0].n_vars
        for img in images:
            if img.field is not field or img.n_vars != m:
                raise UsageError("images must share field and arity")
        if field is not self.field:
            raise UsageError("images over a different field")
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = images[i] ** e
            return cache[key]

        result = MultiPoly.zero(field, m)
        for exps, c in self._terms.items():
            t = MultiPoly.constant(field, m, c)
            for i, e in enumerate(exps):
                if e:
                    t = t * power(i, e)
            result = result + t
        return result

    def substitute(self, var: int, replacement) -> "MultiPoly":
        return substitute(self, var, replacement)

    def drop_unused(self) -> "MultiPoly":
        """Same polynomial with variables that never occur removed."""
        keep = sorted(self.support())
        terms = {tuple(exps[i] for i in keep): c for exps, c in self._terms.items()}
        return MultiPoly._raw(self.field, len(keep), terms)


# -- substitution -----------------------------------------------------------


@dataclass(frozen=True)
class Const:
    """Substitute a variable by a constant."""

    value: int


@dataclass(frozen=True)
class Affine:
    """Substitute a variable by sum(coeffs[j] * y_j) + const over the remaining variables."""

    coeffs: tuple
    const: int = 0


def substitute(p: MultiPoly, var: int, replacement) -> MultiPoly:
    """Eliminate variable `var`; the result has arity n_vars - 1."""
    n = p.n_vars
    if not 0 <= var < n:
        raise UsageError(f"variable index {var} out of range for arity {n}")
    field, m = p.field, n - 1
    if isinstance(replacement, (int, FieldElement)):
        replacement = Const(int(replacement))
    if isinstance(replacement, Const):
        image = MultiPoly.constant(field, m, replacement.value)
    elif isinstance(replacement, Affine):
        if len(replacement.coeffs) != m:
            raise UsageError(f"affine replacement needs {m} coefficients")
        image = MultiPoly.linear(field, [int(c) for c in replacement.coeffs], int(replacement.const))
    elif isinstance(replacement, MultiPoly):
        image = replacement
    else:
        raise UsageError(f"unsupported replacement {replacement!r}")
    images = []
    for j in range(n):
        if j == var:
            images.append(image)
        else:
            images.append(MultiPoly.variable(field, m, j if j < var else j - 1))
    return p.compose(images)


# -- arithmetic front ends --------------------------------------------------


def poly_arith(a: MultiPoly, b: MultiPoly, kind: str) -> MultiPoly:
    if kind == "add":
        return a + a._coerce(b)
    if kind == "sub":
        return a - a._coerce(b)
    if kind == "mul":
        return a * a._coerce(b)
    raise UsageError(f"unknown polynomial operation {kind!r}")


def evaluate(p: MultiPoly, point: Sequence) -> FieldElement:
    return p.evaluate(point)


def degree(p: MultiPoly) -> int:
    return p.degree()


# -- interpolation ----------------------------------------------------------


@lru_cache(maxsize=None)
def _vandermonde(q: int) -> np.ndarray:
    """V[a, k] = a**k mod q (with 0**0 = 1): coefficients -> values."""
    return np.array([[pow(a, k, q) for k in range(q)] for a in range(q)], dtype=np.int64)


@lru_cache(maxsize=None)
def _point_basis(q: int) -> np.ndarray:
    """M[k, a] = coefficient of x**k in 1 - (x - a)**(q-1): values -> coefficients."""
    m = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for k in range(q):
            c = -comb(q - 1, k) * pow(-a, q - 1 - k)
            if k == 0:
                c += 1
            m[k, a] = c % q
    return m


def _axis_transform(arr: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    for axis in range(arr.ndim):
        arr = np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis) % q
    return arr


def interpolate(field: PrimeField, n_vars: int, table, limit=None) -> MultiPoly:
    """The unique normal-form polynomial with the given value table.

    The pointwise basis prod_i (1 - (x_i - a_i)**(q-1)) factors over the
    variables, so it is applied one axis at a time.
    """
    q = field.q
    config.check_exhaustion(q**n_vars, "interpolation", limit)
    values = np.asarray(
        [int(v) for v in table] if not isinstance(table, np.ndarray) else table,
        dtype=np.int64,
    )
    if values.size != q**n_vars:
        raise UsageError(f"table has {values.size} entries, expected {q ** n_vars}")
    if n_vars == 0:
        return MultiPoly.constant(field, 0, int(values[0]))
    coeffs = _axis_transform(np.mod(values, q).reshape((q,) * n_vars), _point_basis(q), q)
    terms = {}
    for row in np.argwhere(coeffs):
        exps = tuple(int(v) for v in row)
        terms[exps] = int(coeffs[exps])
    return MultiPoly._raw(field, n_vars, terms)


def interpolate_naive(field: PrimeField, n_vars: int, table) -> MultiPoly:
    """Direct sum over points of value * point indicator, in MultiPoly arithmetic."""
    q = field.q
    values = [int(v) % q for v in table]
    if len(values) != q**n_vars:
        raise UsageError(f"table has {len(values)} entries, expected {q ** n_vars}")
    one = MultiPoly.one(field, n_vars)
    xs = [MultiPoly.variable(field, n_vars, i) for i in range(n_vars)]
    result = MultiPoly.zero(field, n_vars)
    for point, v in zip(product(range(q), repeat=n_vars), values):
        if not v:
            continue
        ind = one
        for x, a in zip(xs, point):
            ind = ind * (one - (x - a) ** (q - 1))
        result = result + ind.scale(v)
    return result


# -- text syntax ------------------------------------------------------------


def default_names(n_vars: int) -> list:
    return [f"x{i + 1}" for i in range(n_vars)]


def format_poly(p: MultiPoly, names: Sequence[str] | None = None) -> str:
    names = default_names(p.n_vars) if names is None else list(names)
    if len(names) != p.n_vars:
        raise UsageError(f"need {p.n_vars} variable names, got {len(names)}")
    parts = []
    for exps, c in p.terms():
        factors = [
            names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(exps) if e
        ]
        if c.value != 1 or not factors:
            factors.insert(0, str(c.value))
        parts.append("*".join(factors))
    return " + ".join(parts) if parts else "0"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, sym = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("sym", sym))
        pos = m.end()
    return out


def parse_poly(
    text: str,
    field: PrimeField,
    names: Sequence[str] | None = None,
    n_vars: int | None = None,
) -> MultiPoly:
    """Parse `c*x1^e1*x2 + ...`; without `names`, variables are x1..xn."""
    if names is None:
        if n_vars is None:
            found = [int(k) for k in re.findall(r"\bx(\d+)\b", text)]
            n_vars = max(found, default=0)
        names = default_names(n_vars)
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    tokens = _tokenize(text)
    if not tokens:
        raise FormatError("empty polynomial")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take(kind, value=None):
        nonlocal pos
        tok = peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise FormatError(f"expected {value or kind} in {text!r}")
        pos += 1
        return tok[1]

    terms: dict = {}
    sign = 1
    if peek() == ("sym", "-"):
        take("sym")
        sign = -1
    while True:
        coeff, exps = 1, [0] * n
        while True:
            kind, val = peek()
            if kind == "num":
                coeff *= take("num")
            elif kind == "name":
                name = take("name")
                if name not in index:
                    raise FormatError(f"unknown variable {name!r} in {text!r}")
                e = 1
                if peek() == ("sym", "^"):
                    take("sym", "^")
                    e = take("num")
                exps[index[name]] += e
            else:
                raise FormatError(f"expected a factor in {text!r}")
            if peek() == ("sym", "*"):
                take("sym", "*")
                continue
            break
        key = tuple(reduce_exponent(e, field.q) for e in exps)
        terms[key] = terms.get(key, 0) + sign * coeff
        kind, val = peek()
        if kind is None:
            break
        if kind == "sym" and val in "+-":
            take("sym")
            sign = 1 if val == "+" else -1
            continue
        raise FormatError(f"unexpected {val!r} in {text!r}")
    return MultiPoly(field, n, terms)


def all_monomials(q: int, n_vars: int) -> Iterable[tuple]:
    return product(range(q), repeat=n_vars)


def random_poly(field: PrimeField, n_vars: int, rng, max_degree: int | None = None, n_terms: int | None = None) -> MultiPoly:
    """A random normal-form polynomial: n_terms draws of (monomial, coefficient).

    Monomials are uniform among those of degree <= max_degree; repeated
    draws add up, so the result may have fewer terms.
    """
    q = field.q
    top = (q - 1) * n_vars if max_degree is None else max_degree
    mons = [e for e in all_monomials(q, n_vars) if sum(e) <= top]
    if n_terms is None:
        n_terms = 1 + rng.below(len(mons))
    terms: dict = {}
    for _ in range(n_terms):
        e = rng.choice(mons)
        terms[e] = terms.get(e, 0) + 1 + rng.below(q - 1)
    return MultiPoly(field, n_vars, terms)
