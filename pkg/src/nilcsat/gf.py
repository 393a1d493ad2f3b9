"""Exact arithmetic in prime fields F_q for small q."""

from __future__ import annotations

from functools import lru_cache

from . import config
from .errors import DomainError, UsageError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def reduce_exponent(e: int, q: int) -> int:
    """Smallest exponent r with x**e == x**r on all of F_q (0 stays 0)."""
    if e < 0:
        raise DomainError(f"negative exponent {e}")
    if e == 0:
        return 0
    return 1 + (e - 1) % (q - 1)


class PrimeField:
    """The field Z/qZ. Instances are interned per modulus."""

    __slots__ = ("q",)

    def __new__(cls, q: int):
        return _field(int(q))

    @classmethod
    def _make(cls, q: int) -> "PrimeField":
        if not is_prime(q):
            raise DomainError(f"q={q} is not prime")
        if q > config.MAX_Q:
            raise DomainError(f"q={q} exceeds the configured cap {config.MAX_Q}")
        obj = object.__new__(cls)
        object.__setattr__(obj, "q", q)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def __reduce__(self):
        return (PrimeField, (self.q,))

    def __repr__(self):
        return f"PrimeField({self.q})"

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self):
        return [FieldElement(v, self) for v in range(self.q)]

    def inv(self, v: int) -> int:
        """Inverse of the residue v, as an int."""
        v %= self.q
        if v == 0:
            raise DomainError("zero has no inverse")
        return pow(v, self.q - 2, self.q)


@lru_cache(maxsize=None)
def _field(q: int) -> PrimeField:
    return PrimeField._make(q)


class FieldElement:
    """A residue mod q tied to its field, so mixing fields fails loudly."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(value) % field.q)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise UsageError(f"mixed fields F_{self.field.q} and F_{other.field.q}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value + v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value - v, self.field)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(v - self.value, self.field)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value * v, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return FieldElement(pow(self.value, e, self.field.q), self.field)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return self * FieldElement(self.field.inv(v), self.field)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"F{self.field.q}({self.value})"


def arith(a: FieldElement, b: FieldElement, kind: str) -> FieldElement:
    if not (isinstance(a, FieldElement) and isinstance(b, FieldElement)):
        raise UsageError("arith expects two FieldElements")
    if a.field is not b.field:
        raise UsageError(f"mixed fields F_{a.field.q} and F_{b.field.q}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise UsageError(f"unknown arithmetic kind {kind!r}")


def inv(a: FieldElement) -> FieldElement:
    return a.inv()
