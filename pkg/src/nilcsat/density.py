"""Preimage counting and the lower bound on nonempty preimages.

For an n-ary polynomial f of degree d over F_q, every attained value y has
at least q**(n - d - q*log2(q)) preimages. `preimage_reduction` replays the
constructive argument behind that bound: it eliminates variables one at a
time (by a constant, or by an affine combination of the others) while
shrinking the preimage of y, and records enough to audit every step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import config
from .errors import DomainError
from .gf import FieldElement
from .poly import Affine, Const, MultiPoly, substitute


def _y(p: MultiPoly, y) -> int:
    if isinstance(y, FieldElement) and y.field is not p.field:
        raise DomainError("y lies in a different field")
    return int(y) % p.q


def count_preimage(p: MultiPoly, y, limit=None) -> int:
    table = p.value_table(limit)
    return int(np.count_nonzero(table == _y(p, y)))


def preimage_counts(p: MultiPoly, limit=None) -> list:
    """Preimage size of every y in F_q."""
    return np.bincount(p.value_table(limit), minlength=p.q).tolist()


@dataclass(frozen=True)
class DensityBound:
    """The bound q**(n - d - q*log2 q), kept as the exact pair (n - d, q)."""

    n_minus_d: int
    q: int

    @property
    def exponent(self) -> float:
        return self.n_minus_d - self.q * math.log2(self.q)

    @property
    def value(self) -> float:
        return float(self.q) ** self.exponent

    def exact(self) -> Fraction | None:
        """Exact value when q*log2(q) is an integer (q = 2), else None."""
        if self.q != 2:
            return None
        e = self.n_minus_d - 2
        return Fraction(2) ** e

    def admits(self, count: int) -> bool:
        """True iff count >= q**exponent."""
        exact = self.exact()
        if exact is not None:
            return count >= exact
        if count <= 0:
            return False
        # log2(3) is transcendental, so equality cannot occur for odd q
        lq = math.log2(self.q)
        return math.log2(count) >= self.n_minus_d * lq - self.q * lq * lq


def density_bound(n: int, d: int, q: int) -> DensityBound:
    return DensityBound(n - d, q)


class Density(enum.Enum):
    HOLDS = "holds"
    VACUOUS = "vacuous"
    VIOLATION = "violation"


def check_density(p: MultiPoly, y, limit=None) -> Density:
    count = count_preimage(p, y, limit)
    if count == 0:
        return Density.VACUOUS
    bound = density_bound(p.n_vars, p.degree(), p.q)
    return Density.HOLDS if bound.admits(count) else Density.VIOLATION


# -- reduction traces -------------------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "const" or "affine"
    var: int  # index of the eliminated variable in the arity before the step
    replacement: object  # Const or Affine
    preimage_before: int
    preimage_after: int
    degree_after: int
    beta: tuple | None = None  # dual vector of an affine step


@dataclass
class ReductionTrace:
    q: int
    n: int
    y: int
    polys: list  # f_0 .. f_l
    preimages: list  # |f_i^{-1}(y)|
    steps: list = field(default_factory=list)
    final_point: tuple | None = None  # the unique preimage of f_l, if singleton

    @property
    def l(self) -> int:
        return len(self.steps)

    @property
    def l1(self) -> int:
        return sum(1 for s in self.steps if s.kind == "const")

    @property
    def l2(self) -> int:
        return sum(1 for s in self.steps if s.kind == "affine")

    @property
    def initial(self) -> MultiPoly:
        return self.polys[0]

    @property
    def final(self) -> MultiPoly:
        return self.polys[-1]

    @property
    def K(self) -> int:
        return self.preimages[0]

    def violations(self) -> list:
        """Every way this trace fails the procedure's guarantees (empty if none)."""
        q, out = self.q, []
        threshold = q**q
        for i, s in enumerate(self.steps):
            if s.preimage_after < 1:
                out.append(f"step {i}: preimage became empty")
            if s.kind == "const":
                if s.preimage_before >= threshold:
                    out.append(f"step {i}: constant step on a preimage of size >= q^q")
                if 2 * s.preimage_after > s.preimage_before:
                    out.append(f"step {i}: constant step did not halve the preimage")
            else:
                if s.preimage_before < threshold:
                    out.append(f"step {i}: affine step on a preimage of size < q^q")
                if q * s.preimage_after > s.preimage_before:
                    out.append(f"step {i}: affine step did not divide the preimage by q")
        for i in range(self.l):
            a, b = self.polys[i], self.polys[i + 1]
            if b.n_vars != a.n_vars - 1:
                out.append(f"step {i}: arity did not drop by one")
            if b.degree() > a.degree():
                out.append(f"step {i}: degree grew from {a.degree()} to {b.degree()}")
            recount = count_preimage(b, self.y)
            if recount != self.preimages[i + 1]:
                out.append(f"step {i}: recorded preimage {self.preimages[i + 1]}, actual {recount}")
        last = self.preimages[-1]
        if not (last == 1 or self.final.n_vars <= 1):
            out.append("trace stopped before reaching a singleton or a univariate polynomial")
        if 2**self.l1 > q**q:
            out.append(f"l1 = {self.l1} exceeds q*log2(q)")
        if q**self.l2 > self.K:
            out.append(f"l2 = {self.l2} exceeds log_q K with K = {self.K}")
        if self.initial.degree() < self.n - self.l:
            out.append(f"deg f = {self.initial.degree()} < n - l = {self.n - self.l}")
        if last == 1 and self.final_point is not None:
            out.extend(_check_point_indicator(self.final, self.y, self.final_point))
        return out

    @property
    def ok(self) -> bool:
        return not self.violations()


def _check_point_indicator(f: MultiPoly, y: int, point: tuple) -> list:
    """1 - (f(x + a) - y)**(q-1) must be the indicator prod(1 - x_i**(q-1))."""
    field, k, q = f.field, f.n_vars, f.q
    shifted = f.compose(
        [MultiPoly.variable(field, k, i) + point[i] for i in range(k)]
    )
    indicator = 1 - (shifted - y) ** (q - 1)
    expected = MultiPoly.one(field, k)
    for i in range(k):
        expected = expected * (1 - MultiPoly.variable(field, k, i) ** (q - 1))
    out = []
    if indicator != expected:
        out.append("shifted indicator of f_l is not prod(1 - x_i^(q-1))")
    if expected.degree() != (q - 1) * k:
        out.append("point indicator has unexpected degree")
    if (q - 1) * f.degree() < expected.degree():
        out.append("deg f_l * (q-1) below the degree of the point indicator")
    return out


def _points(table: np.ndarray, y: int, q: int, n: int) -> np.ndarray:
    idx = np.flatnonzero(table == y)
    if n == 0:
        return np.zeros((len(idx), 0), dtype=np.int64)
    return np.stack(np.unravel_index(idx, (q,) * n), axis=1).astype(np.int64)


def _independent_rows(points: np.ndarray, q: int, k: int) -> list:
    """Indices of the first k rows (greedy, in order) that are linearly independent."""
    basis: list = []  # (pivot column, normalized row) pairs
    chosen = []
    for r, row in enumerate(points):
        v = [int(x) % q for x in row]
        for piv, b in basis:
            if v[piv]:
                c = v[piv]
                v = [(x - c * y) % q for x, y in zip(v, b)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            continue
        inv = pow(v[piv], q - 2, q)
        basis.append((piv, [x * inv % q for x in v]))
        chosen.append(r)
        if len(chosen) == k:
            break
    return chosen


def _solve(rows: list, rhs: list, q: int) -> tuple:
    """A solution beta of rows @ beta = rhs over F_q (rows independent)."""
    n = len(rows[0])
    aug = [list(r) + [t] for r, t in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(aug)) if aug[i][c] % q), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = pow(aug[r][c], q - 2, q)
        aug[r] = [x * inv % q for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % q for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    beta = [0] * n
    for i, c in enumerate(pivots):
        beta[c] = aug[i][n]
    return tuple(beta)


def _separates(points: np.ndarray, beta, q: int) -> bool:
    dots = points @ np.asarray(beta, dtype=np.int64) % q
    return len(np.unique(dots)) == q


def _affine_beta(points: np.ndarray, q: int) -> tuple:
    """Lexicographically smallest nonzero beta with beta.v taking every value on the preimage."""
    chosen = _independent_rows(points, q, q)
    if len(chosen) < q:
        raise DomainError("preimage of size >= q^q without q independent vectors")
    certified = _solve([points[i].tolist() for i in chosen], list(range(q)), q)
    for beta in product(range(q), repeat=points.shape[1]):
        if any(beta) and _separates(points, beta, q):
            return beta
        if beta == certified:
            break
    return certified


def preimage_reduction(p: MultiPoly, y, limit=None) -> ReductionTrace:
    q, n = p.q, p.n_vars
    config.check_exhaustion(q**n, "preimage reduction", limit)
    yv = _y(p, y)
    if p.is_constant():
        raise DomainError("preimage reduction needs a non-constant polynomial")
    pts = _points(p.value_table(), yv, q, n)
    if len(pts) == 0:
        raise DomainError(f"y = {yv} is not attained")
    trace = ReductionTrace(q=q, n=n, y=yv, polys=[p], preimages=[len(pts)])
    f = p
    threshold = q**q
    while f.n_vars > 1 and len(pts) > 1:
        before = len(pts)
        if before < threshold:
            differ = np.flatnonzero(pts.min(axis=0) != pts.max(axis=0))
            j = int(differ[-1])
            counts = np.bincount(pts[:, j], minlength=q)
            c = min((cnt, v) for v, cnt in enumerate(counts.tolist()) if cnt)[1]
            repl, beta, kind = Const(c), None, "const"
            keep = pts[:, j] == c
        else:
            beta = _affine_beta(pts, q)
            j = max(i for i, b in enumerate(beta) if b)
            dots = pts @ np.asarray(beta, dtype=np.int64) % q
            sizes = np.bincount(dots, minlength=q)
            b = int(np.argmin(sizes))
            inv = pow(beta[j], q - 2, q)
            coeffs = tuple((-inv * beta[i]) % q for i in range(len(beta)) if i != j)
            repl, kind = Affine(coeffs, inv * b % q), "affine"
            keep = dots == b
        pts = np.delete(pts[keep], j, axis=1)
        f = substitute(f, j, repl)
        trace.polys.append(f)
        trace.preimages.append(len(pts))
        trace.steps.append(
            ReductionStep(kind, j, repl, before, len(pts), f.degree(), beta)
        )
    if len(pts) == 1:
        trace.final_point = tuple(int(v) for v in pts[0])
    return trace
