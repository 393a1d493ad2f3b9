from itertools import product

import numpy as np
import pytest

from nilcsat.algebra import build_example
from nilcsat.circuit import check, format_circuit, parse_circuit, random_circuit
from nilcsat.errors import DomainError, ResourceError, UsageError
from nilcsat.gf import PrimeField
from nilcsat.poly import MultiPoly, format_poly, parse_poly, random_poly
from nilcsat.rng import Rng
from nilcsat.solve import solve_deterministic
from nilcsat.translate import (
    bottom,
    circuit_to_system,
    combine,
    embed,
    encode_field_equation,
    gate_polys,
    level_degrees,
    verify_translation,
)

from oracles import poly_value, preimage

F2, F3 = PrimeField(2), PrimeField(3)
VARS4 = ["x1", "x2", "y1", "y2"]
P1_VS_00 = "inputs 2\ng3 = p1 g1 g2\ng4 = const 00\noutput g3 g4\n"


def test_system_examples(a22):
    c = parse_circuit(P1_VS_00, a22)
    system = circuit_to_system(c)
    assert [format_poly(p, VARS4) for p in system] == ["x2*y2", "0"]
    f = combine(system)
    assert format_poly(f, VARS4) == "1 + x2*y2" and f.degree() == 2
    ident = circuit_to_system(parse_circuit("inputs 2\noutput g1 g1\n", a22))
    assert all(p.is_zero() for p in ident) and combine(ident) == MultiPoly.one(F2, 4)
    bad = circuit_to_system(parse_circuit("inputs 2\ng3 = const 10\ng4 = const 00\noutput g3 g4\n", a22))
    assert [str(p) for p in bad] == ["1", "0"] and combine(bad).is_zero()


def test_gate_polys_of_the_example(a22):
    g1, g2 = gate_polys(parse_circuit(P1_VS_00, a22))
    assert [format_poly(p, VARS4) for p in g1] == ["x2*y2", "0"]
    assert all(p.is_zero() for p in g2)
    assert level_degrees(a22, g1) == [2, 0]


def test_report_on_the_example(a22):
    report = verify_translation(parse_circuit(P1_VS_00, a22))
    assert report.ok
    assert report.degree_line() == "deg 2 <= 4 <= 16"
    assert report.sys_pol_bound == 4
    assert report.level_degrees["system"] == [2, 0]
    assert report.aggregates == {"g1": 2, "g2": 0, "system": 2}
    assert report.assignments == 16


def test_report_flags_a_wrong_polynomial(a22):
    c = parse_circuit(P1_VS_00, a22)
    report = verify_translation(c, MultiPoly.one(F2, 4))
    assert not report.ok and "disagrees" in report.issues[0]
    report = verify_translation(c, parse_poly("1 + x1", F2, n_vars=3))
    assert not report.ok
    report = verify_translation(c, parse_poly("2 + x2*x4", F3, n_vars=4))
    assert not report.ok


def test_combine_validation():
    with pytest.raises(UsageError):
        combine([])
    with pytest.raises(UsageError):
        combine([MultiPoly.one(F2, 2), MultiPoly.one(F2, 3)])


@pytest.mark.parametrize("alg_name,n", [("a22", 2), ("a23", 2), ("b322", 1), ("b322", 2)])
def test_translation_holds_on_random_circuits(alg_name, n, request):
    alg = request.getfixturevalue(alg_name)
    for seed in range(25):
        c = random_circuit(alg, n, n + 8, seed)
        system = circuit_to_system(c)
        f = combine(system)
        report = verify_translation(c, f)
        assert report.ok, report.issues
        table = f.value_table()
        assert set(np.unique(table)) <= {0, 1}
        # the iff, point by point through the reference evaluator
        for idx, a in enumerate(product(alg.elements(), repeat=n)):
            assert (table[idx] == 1) == check(c, a)


def test_translation_has_an_exhaustion_limit(a22):
    with pytest.raises(ResourceError):
        circuit_to_system(random_circuit(a22, 3, 8, 0), limit=50)


def test_translation_needs_a_coordinatized_algebra(a22sq):
    with pytest.raises(UsageError):
        circuit_to_system(random_circuit(a22sq, 1, 4, 0))


def test_encode_product_example():
    p = parse_poly("x1*x2", F2)
    c = encode_field_equation(p, 1, 2, 2)
    assert format_circuit(c) == "CIRCUIT v1\ninputs 2\ng3 = p1 g1 g2\ng4 = const 10\noutput g3 g4\n"
    sat = [a for a in product(c.algebra.elements(), repeat=2) if check(c, a)]
    assert sat == [(x, y) for x in c.algebra.elements() for y in c.algebra.elements() if x[1] == y[1] == 1]


def test_encode_constant_equation():
    c = encode_field_equation(MultiPoly.zero(F2, 0), 0, 2, 2)
    assert format_circuit(c) == "CIRCUIT v1\ninputs 0\ng1 = const 00\ng2 = const 00\noutput g1 g2\n"
    assert check(c, ())
    assert not check(encode_field_equation(MultiPoly.zero(F2, 0), 1, 2, 2), ())


def test_encode_sum_example():
    c = encode_field_equation(parse_poly("x1 + x2", F2), 1, 2, 2)
    alg = c.algebra
    for a, b in product(range(2), repeat=2):
        assert check(c, embed(alg, (a, b))) == (a != b)


def test_encode_rejects_high_degree():
    with pytest.raises(DomainError) as info:
        encode_field_equation(parse_poly("x1*x2*x3", F2), 1, 2, 2)
    assert "deg too high for this h,m" in str(info.value)
    encode_field_equation(parse_poly("x1*x2*x3", F2), 1, 2, 3)
    encode_field_equation(parse_poly("x1*x2*x3*x4", F2), 1, 3, 2)
    with pytest.raises(UsageError):
        encode_field_equation(parse_poly("x1", F2), 1, 2, 2, algebra=build_example(3, 2, 2))


@pytest.mark.parametrize("q,h,m,deg", [(2, 2, 2, 2), (2, 2, 3, 3), (3, 2, 2, 2), (2, 3, 2, 4), (3, 3, 2, 4)])
def test_encoded_circuits_compute_the_equation(q, h, m, deg):
    F = PrimeField(q)
    rng = Rng(q * 100 + h * 10 + m)
    alg = build_example(q, h, m)
    for _ in range(20):
        n = rng.between(1, 3)
        p = random_poly(F, n, rng, max_degree=deg)
        y = rng.below(q)
        c = encode_field_equation(p, y, h, m, algebra=alg)
        for a in product(range(q), repeat=n):
            assert check(c, embed(alg, a)) == (poly_value(p, a) == y)


def test_solving_the_encoding_solves_the_equation(a22):
    rng = Rng(17)
    for _ in range(60):
        n = rng.between(1, 3)
        p = random_poly(F2, n, rng, max_degree=2)
        y = rng.below(2)
        c = encode_field_equation(p, y, 2, 2, algebra=a22)
        ans = solve_deterministic(c)
        assert ans.sat == bool(preimage(p, y))
        if ans.sat:
            assert poly_value(p, bottom(ans.witness)) == y
