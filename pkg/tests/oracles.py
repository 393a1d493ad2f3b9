"""Slow, obviously-correct reference implementations used only by tests.

Nothing here shares code paths with the vectorized library routines it
checks: evaluation goes gate by gate through eval_op, counting goes point
by point through plain Python loops.
"""

from itertools import combinations, product

from nilcsat.circuit import check, random_circuit
from nilcsat.rng import Rng


def brute_sat(c):
    """(satisfiable, first witness, number of satisfying assignments)."""
    first, count = None, 0
    for a in product(c.algebra.elements(), repeat=c.n_inputs):
        if check(c, a):
            count += 1
            if first is None:
                first = a
    return first is not None, first, count


def poly_value(p, point):
    """Sum of coefficient * monomial, evaluated with Python ints."""
    q = p.q
    total = 0
    for exps, c in p.coefficients.items():
        t = c
        for x, e in zip(point, exps):
            t = t * pow(x, e, q) % q
        total += t
    return total % q


def preimage(p, y):
    return [x for x in product(range(p.q), repeat=p.n_vars) if poly_value(p, x) == y % p.q]


def hitting_reference(N, d, q):
    out = []
    for k in range(min(d, N) + 1):
        for supp in combinations(range(N), k):
            for vals in product(range(1, q), repeat=k):
                v = [0] * N
                for i, x in zip(supp, vals):
                    v[i] = x
                out.append(tuple(v))
    return out


def count_low_support(N, d, q):
    return sum(1 for v in product(range(q), repeat=N) if sum(1 for x in v if x) <= d)


def corpus(alg, count, seed, n=2, min_gates=4, max_gates=10):
    """Seeded random circuits with n inputs and between min_gates and max_gates gates."""
    rng = Rng(seed)
    return [
        random_circuit(alg, n, rng.between(min_gates, max_gates), rng.below(2**63))
        for _ in range(count)
    ]
