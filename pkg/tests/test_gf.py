import pytest
from hypothesis import given, strategies as st

from nilcsat.errors import DomainError, UsageError
from nilcsat.gf import FieldElement, PrimeField, arith, inv, is_prime, reduce_exponent

PRIMES = [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize(
    "q,a,b,kind,expected",
    [(3, 2, 2, "add", 1), (2, 1, 1, "add", 0), (5, 3, 4, "mul", 2), (7, 2, 5, "sub", 4)],
)
def test_arith_examples(q, a, b, kind, expected):
    F = PrimeField(q)
    assert arith(F(a), F(b), kind) == F(expected)


@pytest.mark.parametrize("q,a,expected", [(5, 2, 3), (2, 1, 1), (7, 3, 5)])
def test_inverse_examples(q, a, expected):
    assert inv(PrimeField(q)(a)) == expected


def test_inverse_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        inv(PrimeField(5)(0))


def test_mixed_fields_rejected():
    with pytest.raises(UsageError):
        arith(PrimeField(2)(1), PrimeField(3)(1), "add")
    with pytest.raises(UsageError):
        PrimeField(2)(1) * PrimeField(3)(1)


@pytest.mark.parametrize("q", [0, 1, 4, 9, 15])
def test_non_prime_rejected(q):
    with pytest.raises(DomainError):
        PrimeField(q)


def test_field_cap():
    with pytest.raises(DomainError):
        PrimeField(17)


def test_fields_are_interned_and_immutable():
    assert PrimeField(5) is PrimeField(5)
    with pytest.raises(AttributeError):
        PrimeField(5).q = 7
    with pytest.raises(AttributeError):
        PrimeField(5)(1).value = 2


def test_is_prime_matches_trial_division():
    for n in range(200):
        assert is_prime(n) == (n > 1 and all(n % d for d in range(2, n)))


@pytest.mark.parametrize("e,q,expected", [(3, 2, 1), (0, 5, 0), (5, 3, 1)])
def test_reduce_exponent_examples(e, q, expected):
    assert reduce_exponent(e, q) == expected


def test_reduce_exponent_negative():
    with pytest.raises(DomainError):
        reduce_exponent(-1, 3)


@pytest.mark.parametrize("q", PRIMES)
def test_reduced_exponent_agrees_pointwise(q):
    for e in range(3 * q):
        r = reduce_exponent(e, q)
        assert r == 0 if e == 0 else 1 <= r <= q - 1
        assert all(pow(x, e, q) == pow(x, r, q) for x in range(q))


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_field_axioms(q, a, b, c):
    F = PrimeField(q)
    x, y, z = F(a), F(b), F(c)
    assert x + y == y + x and x * y == y * x
    assert (x + y) + z == x + (y + z) and (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == F.zero and x + F.zero == x and x * F.one == x
    if x:
        assert x * x.inv() == F.one
        assert y / x * x == y


@given(st.sampled_from(PRIMES), st.integers(min_value=0, max_value=12), st.integers(min_value=1, max_value=50))
def test_power_matches_builtin(q, a, e):
    F = PrimeField(q)
    assert int(F(a) ** e) == pow(a, e, q)
    if a % q:
        assert F(a) ** -e * F(a) ** e == F.one


def test_element_conversions():
    F = PrimeField(7)
    x = F(10)
    assert int(x) == 3 and x == 3 and x == 10 and bool(x)
    assert not F(7)
    assert isinstance(x, FieldElement) and hash(x) == hash(F(3))
    assert [1, 2, 3, 4][F(2)] == 3
    assert [int(v) for v in F.elements()] == list(range(7))
