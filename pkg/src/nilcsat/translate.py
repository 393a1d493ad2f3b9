"""From circuits over A to equations over F_q, and back.

`circuit_to_system` turns a circuit into h coordinate polynomials whose
common zeros are exactly the satisfying assignments; `combine` folds them
into one polynomial f with f = 1 precisely there. The translation is
semantic: it interpolates value tables rather than expanding gates, so it
is a desk-scale verification tool, not part of any solver.

`encode_field_equation` goes the other way and writes a polynomial equation
over F_q as a circuit over A[h, m].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .algebra import CoordAlgebra, build_example, degree_bound, sys_pol_bound
from .circuit import Circuit, Gate
from .errors import DomainError, UsageError
from .poly import MultiPoly, interpolate


def _coord_algebra(c: Circuit) -> CoordAlgebra:
    if not isinstance(c.algebra, CoordAlgebra):
        raise UsageError("translation needs a circuit over a coordinatized algebra")
    return c.algebra


def _output_digits(c: Circuit, limit=None):
    alg = _coord_algebra(c)
    n = c.n_inputs
    config.check_exhaustion(alg.size**n, "circuit translation", limit)
    idx = np.arange(alg.size**n, dtype=np.int64)
    x = np.empty((len(idx), n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        x[:, i] = idx % alg.size
        idx //= alg.size
    a, b = c.evaluator().outputs_many(x)
    return alg.digits_many(a), alg.digits_many(b)


def gate_polys(c: Circuit, limit=None) -> tuple:
    """Coordinate polynomials of both output gates, in n*h variables.

    Variable i*h + k is coordinate k of input i.
    """
    alg = _coord_algebra(c)
    nv = c.n_inputs * alg.h
    da, db = _output_digits(c, limit)
    return tuple(
        [interpolate(alg.field, nv, d[:, k], limit) for k in range(alg.h)] for d in (da, db)
    )


def circuit_to_system(c: Circuit, limit=None) -> list:
    """h polynomials p_k = pi_k(g1) - pi_k(g2) over F_q in n*h variables."""
    alg = _coord_algebra(c)
    nv = c.n_inputs * alg.h
    da, db = _output_digits(c, limit)
    diff = (da - db) % alg.q
    return [interpolate(alg.field, nv, diff[:, k], limit) for k in range(alg.h)]


def combine(system) -> MultiPoly:
    """f = prod (1 - p_i**(q-1)): 1 on common zeros of the system, 0 elsewhere."""
    if not system:
        raise UsageError("empty system")
    first = system[0]
    f = MultiPoly.one(first.field, first.n_vars)
    for p in system:
        if p.field is not first.field or p.n_vars != first.n_vars:
            raise UsageError("system polynomials must share field and arity")
        f = f * (1 - p ** (first.q - 1))
    return f


def level_degrees(alg: CoordAlgebra, polys) -> list:
    """d_i: the largest degree among the coordinate polynomials of level i."""
    coord = alg.coord
    return [
        max(p.degree() for p in polys[coord.level_slice(j)]) for j in range(1, coord.s + 1)
    ]


@dataclass
class TranslationReport:
    degree: int
    refined: int
    coarse: int
    sys_pol_bound: int
    level_degrees: dict  # "g1", "g2", "system" -> [d_1 .. d_s]
    aggregates: dict  # same keys -> sum alpha_i d_i
    assignments: int
    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def degree_line(self) -> str:
        return f"deg {self.degree} <= {self.refined} <= {self.coarse}"


def verify_translation(c: Circuit, f: MultiPoly | None = None, limit=None) -> TranslationReport:
    """Exhaustively confirm f = 1 exactly on satisfying assignments, and the degree bounds."""
    alg = _coord_algebra(c)
    system = circuit_to_system(c, limit)
    if f is None:
        f = combine(system)
    bounds = degree_bound(alg)
    spb = sys_pol_bound(alg)
    g1, g2 = gate_polys(c, limit)
    levels = {
        "g1": level_degrees(alg, g1),
        "g2": level_degrees(alg, g2),
        "system": level_degrees(alg, system),
    }
    aggregates = {k: sum(a * d for a, d in zip(alg.alphas, v)) for k, v in levels.items()}
    report = TranslationReport(
        degree=f.degree(),
        refined=bounds.refined,
        coarse=bounds.coarse,
        sys_pol_bound=spb,
        level_degrees=levels,
        aggregates=aggregates,
        assignments=alg.size**c.n_inputs,
    )
    issues = report.issues
    if f.q != alg.q:
        issues.append(f"f is over F_{f.q}, expected F_{alg.q}")
        return report
    if f.n_vars != c.n_inputs * alg.h:
        issues.append(f"f has {f.n_vars} variables, expected {c.n_inputs * alg.h}")
        return report
    values = f.value_table(limit)
    if np.any(values > 1):
        issues.append("f takes values outside {0, 1}")
    da, db = _output_digits(c, limit)
    sat = np.all(da == db, axis=1)
    bad = np.flatnonzero(sat != (values == 1))
    if len(bad):
        issues.append(f"f = 1 disagrees with satisfaction at {len(bad)} assignments (first index {bad[0]})")
    if not report.degree <= report.refined:
        issues.append(f"deg f = {report.degree} exceeds the refined bound {report.refined}")
    if not report.refined <= report.coarse:
        issues.append(f"refined bound {report.refined} exceeds coarse bound {report.coarse}")
    for k, agg in aggregates.items():
        if agg > spb:
            issues.append(f"{k}: sum alpha_i d_i = {agg} exceeds {spb}")
    return report


# -- field equations as circuits -------------------------------------------------


def encode_field_equation(p: MultiPoly, y, h: int, m: int, algebra: CoordAlgebra | None = None) -> Circuit:
    """Circuit over A[h, m] satisfied by (0,..,0,a_1), .., (0,..,0,a_n) iff p(a) = y.

    Every monomial is an m-ary tree of p-gates: leaves are inputs at level h,
    the gate p_L lifts the product of its children's level-(L+1) coordinates
    to level L, and unused child slots get the unit constant of level L+1.
    Coefficients are repeated additions. All terms are accumulated at level 1
    and compared against y - p(0) placed at level 1.
    """
    q = p.q
    alg = algebra if algebra is not None else build_example(q, h, m)
    if alg.q != q or alg.h != h:
        raise UsageError("algebra does not match q and h")
    cap = m ** (h - 1)
    if p.degree() > cap:
        raise DomainError(f"deg too high for this h,m: deg {p.degree()} > m^(h-1) = {cap}")
    n = p.n_vars
    gates = [Gate("input", index=i) for i in range(n)]
    consts: dict = {}

    def emit(g):
        gates.append(g)
        return len(gates)

    def const(elem):
        if elem not in consts:
            consts[elem] = emit(Gate("const", value=elem))
        return consts[elem]

    def build(factors, level):
        if level == h:
            return factors[0] + 1
        size = m ** (h - level - 1)
        children = []
        for k in range(m):
            group = factors[k * size : (k + 1) * size]
            children.append(build(group, level + 1) if group else const(alg.unit(level + 1)))
        return emit(Gate("apply", op=f"p{level}", args=tuple(children)))

    total = None
    for exps, coef in p.terms():
        if not any(exps):
            continue
        factors = [i for i, e in enumerate(exps) for _ in range(e)]
        t = build(factors, 1)
        acc = t
        for _ in range(int(coef) - 1):
            acc = emit(Gate("apply", op="+", args=(acc, t)))
        total = acc if total is None else emit(Gate("apply", op="+", args=(total, acc)))
    rhs = (int(y) - int(p.constant_term)) % q
    target = [0] * h
    target[0] = rhs
    lhs = total if total is not None else const(alg.zero)
    rhs_gate = emit(Gate("const", value=tuple(target)))
    return Circuit(alg, n, gates, (lhs, rhs_gate))


def embed(alg: CoordAlgebra, values) -> tuple:
    """Field values a_i as elements (0, .., 0, a_i)."""
    return tuple(tuple([0] * (alg.h - 1) + [int(v) % alg.q]) for v in values)


def bottom(assignment) -> tuple:
    """The bottom coordinate of each element of an assignment."""
    return tuple(e[-1] for e in assignment)
