import math
import pickle
from itertools import product

import numpy as np
import pytest

from nilcsat.algebra import (
    CoordAlgebra,
    Coordinatization,
    LevelSpec,
    OperationSpec,
    Tail,
    build_example,
    coordinate_names,
    degree_bound,
    direct_product,
    sys_pol_bound,
    validate_triangular,
)
from nilcsat.errors import DomainError, FormatError, UsageError
from nilcsat.gf import PrimeField
from nilcsat.poly import parse_poly


def defining_formula(q, h, name, args):
    """A[h, m] straight from its definition: p_i puts prod of coordinate i+1 at coordinate i."""
    if name == "+":
        return tuple(sum(col) % q for col in zip(*args))
    i = int(name[1:])
    out = [0] * h
    out[i - 1] = math.prod(a[i] for a in args) % q
    return tuple(out)


def test_eval_op_examples(a22, b322):
    assert a22.eval_op("p1", [(0, 1), (0, 1)]) == (1, 0)
    assert a22.eval_op("p1", [(1, 1), (0, 0)]) == (0, 0)
    assert b322.eval_op("p1", [(0, 2), (0, 2)]) == (1, 0)
    for alg in (a22, b322):
        for a in alg.elements():
            assert alg.eval_op("+", [a, alg.zero]) == a


def test_eval_op_errors(a22):
    with pytest.raises(UsageError):
        a22.eval_op("p7", [(0, 0), (0, 0)])
    with pytest.raises(UsageError):
        a22.eval_op("p1", [(0, 0)])
    with pytest.raises(UsageError):
        a22.eval_op("p1", [(0, 2), (0, 0)])


@pytest.mark.parametrize("q,h,m", [(2, 1, 2), (2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2), (3, 3, 2)])
def test_example_algebras_match_definition(q, h, m):
    alg = build_example(q, h, m)
    assert alg.size == q**h
    assert set(alg.arities) == {"+"} | {f"p{i}" for i in range(1, h)}
    for name, arity in alg.arities.items():
        for args in product(alg.elements(), repeat=arity):
            assert alg.eval_op(name, list(args)) == defining_formula(q, h, name, args)


@pytest.mark.parametrize("q,h,m", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)])
def test_vectorized_application_matches_reference(q, h, m):
    alg = build_example(q, h, m)
    for name, arity in alg.arities.items():
        combos = list(product(range(alg.size), repeat=arity))
        cols = [np.array(c, dtype=np.int64) for c in zip(*combos)]
        fast = alg.apply_many(name, cols)
        slow = [alg.encode(alg.eval_op(name, [alg.decode(i) for i in c])) for c in combos]
        assert fast.tolist() == slow


def test_frozen_p1_table(a22):
    # indices of p1(x, y) over x, y in 00, 01, 10, 11; only x2 = y2 = 1 gives 10 (index 2)
    assert a22.op_table("p1").tolist() == [0, 0, 0, 0, 0, 2, 0, 2, 0, 0, 0, 0, 0, 2, 0, 2]


def test_build_example_shapes_and_errors():
    z2 = build_example(2, 1, 2)
    assert z2.size == 2 and list(z2.arities) == ["+"]
    a22 = build_example(2, 2, 2)
    assert a22.size == 4 and set(a22.arities) == {"+", "p1"}
    with pytest.raises(DomainError):
        build_example(4, 2, 2)
    with pytest.raises(DomainError):
        build_example(2, 0, 2)
    with pytest.raises(DomainError):
        build_example(2, 2, 1)


def test_degree_bound_examples(a22, b322):
    assert degree_bound(a22) == (16, 4)
    assert degree_bound(b322).coarse == 36
    assert degree_bound(build_example(2, 1, 2)).refined == 1
    assert sys_pol_bound(a22) == 4
    assert degree_bound(a22).get("refined") == 4
    with pytest.raises(UsageError):
        degree_bound(a22).get("tight")


def test_coarse_bound_is_power_of_order():
    for q in (2, 3, 5, 7):
        for h in range(1, 5):
            for m in range(2, 5):
                coarse = (m * q) ** h
                assert coarse == q**h * m**h
                size = q**h
                assert math.isclose(size ** (math.log(m, q) + 1), coarse, rel_tol=1e-9)
                refined = (q - 1) * (m * q) ** (h - 1)
                assert refined <= coarse


def test_validation_accepts_examples_and_sum(a22, b322):
    for alg in (a22, b322, build_example(2, 3, 2)):
        assert validate_triangular(alg).valid
    coord = Coordinatization(3, (2, 1))
    assert validate_triangular(CoordAlgebra(coord, [OperationSpec.builtin_sum(coord)])).valid


def _reads_upward(coord, q):
    """Unary op whose level-2 output copies the level-1 coordinate."""
    table = []
    for i in range(coord.size):
        top = (i // q ** (coord.h - 1)) % q
        table.append(top)  # element (0, top)
    return OperationSpec.from_table("bad", 1, table)


def test_validation_rejects_reading_a_shallower_level():
    coord = Coordinatization(2, (1, 1))
    ops = [OperationSpec.builtin_sum(coord), _reads_upward(coord, 2)]
    alg = CoordAlgebra(coord, ops, validate=False)
    report = validate_triangular(alg)
    assert not report.valid
    assert any("bad: output coordinate 2 (level 2) has monomial x1" in s for s in report.issues)
    with pytest.raises(DomainError):
        CoordAlgebra(coord, ops)


def test_validation_rejects_products_within_a_level():
    coord = Coordinatization(2, (1, 1))
    alg = build_example(2, 2, 2)
    # x * y on the bottom coordinate
    table = [alg.encode((0, a[1] * b[1])) for a in alg.elements() for b in alg.elements()]
    bad = CoordAlgebra(coord, [OperationSpec.builtin_sum(coord), OperationSpec.from_table("m", 2, table)], False)
    report = validate_triangular(bad)
    assert any("x2*y2" in s for s in report.issues)


def test_structured_levels_with_linear_parts():
    coord = Coordinatization(3, (1, 2))
    F = PrimeField(3)
    names = coordinate_names(2, 3, coord.tail_coords(1))
    tail = Tail(3, 4, 1, polys=[parse_poly("x2*y3 + 2", F, names)])
    levels = [
        LevelSpec((((2,),), ((1,),)), tail),
        LevelSpec((((1, 1), (0, 1)), ((0, 0), (0, 0))), Tail.const(3, 2, [1, 0])),
    ]
    op = OperationSpec.structured(coord, "f", 2, levels)
    alg = CoordAlgebra(coord, [OperationSpec.builtin_sum(coord), op])
    x, y = (1, 2, 0), (2, 1, 2)
    # level 1: 2*1 + 1*2 + x2*y3 + 2 = 2 + 2 + 4 + 2 = 10 = 1 mod 3
    # level 2: (x2 + x3 + 1, x3) = (0, 0)
    assert alg.eval_op("f", [x, y]) == (1, 0, 0)
    assert validate_triangular(alg).valid
    with pytest.raises(UsageError):
        OperationSpec.structured(coord, "g", 2, levels[:1])


def test_codec(a22):
    assert a22.parse_element("10") == (1, 0)
    assert a22.parse_element("00") == a22.zero
    assert build_example(3, 2, 2).parse_element("21") == (2, 1)
    for bad in ("1", "012", "12", "a0"):
        with pytest.raises(FormatError):
            a22.parse_element(bad)
    for i in range(a22.size):
        assert a22.encode(a22.decode(i)) == i
    assert a22.digits_many(np.arange(4)).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_coordinatization_layout():
    c = Coordinatization(2, (2, 1, 3))
    assert (c.s, c.h, c.size) == (3, 6, 64)
    assert [c.level_of(k) for k in range(1, 7)] == [1, 1, 2, 3, 3, 3]
    assert c.tail_coords(1) == [3, 4, 5, 6] and c.tail_coords(3) == []
    with pytest.raises(DomainError):
        Coordinatization(2, ())


def test_sum_is_required():
    coord = Coordinatization(2, (1,))
    with pytest.raises(DomainError):
        CoordAlgebra(coord, [OperationSpec.from_table("f", 1, [0, 1])])


def test_direct_product(a22):
    z2, z3 = build_example(2, 1, 2), build_example(3, 1, 2)
    p = direct_product(z2, z3)
    assert p.size == 6
    assert p.project(((1,), (2,)), 1) == (2,)
    sq = direct_product(a22, a22)
    assert sq.size == 16
    assert sq.project(((1, 0), (0, 1)), 0) == (1, 0)
    assert sq.parse_element("10|01") == ((1, 0), (0, 1))
    assert sq.format_element(((1, 0), (0, 1))) == "10|01"
    for x, y in product(sq.elements(), repeat=2):
        assert sq.eval_op("p1", [x, y]) == tuple(a22.eval_op("p1", [x[i], y[i]]) for i in range(2))
    with pytest.raises(UsageError):
        direct_product(a22, z2)
    with pytest.raises(FormatError):
        sq.parse_element("1001")


def test_pickling_drops_cached_tables(a22):
    a22.op_table("p1")
    clone = pickle.loads(pickle.dumps(a22))
    assert clone.op_table("p1").tolist() == a22.op_table("p1").tolist()
