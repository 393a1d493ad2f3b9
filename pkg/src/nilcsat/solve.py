"""Three CSAT solvers and the direct-product reduction.

* `solve_brute` scans all |A|^n assignments; it is the ground-truth oracle.
* `solve_deterministic` scans only coordinate vectors with at most d nonzero
  entries, where d bounds the degree of the field polynomial of the circuit.
* `solve_monte_carlo` samples uniform assignments. Each trial succeeds with
  probability at least c = q**(-d - q*log2 q) on a satisfiable circuit.

Every SAT answer carries a witness that is re-checked gate by gate before it
is returned, so no solver can answer SAT on an unsatisfiable circuit.
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config
from .algebra import CoordAlgebra, ProductAlgebra, degree_bound
from .circuit import Circuit, check, decode_assignment, project_circuit
from .errors import BudgetError, UsageError
from .hitting import hitting_set_blocks, hitting_set_size
from .rng import Rng

D_CHOICES = ("refined", "coarse")


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    PROBABLY_UNSAT = "PROBABLY_UNSAT"


@dataclass
class SolverStats:
    candidates_checked: int = 0
    trials: int = 0
    gate_evals: int = 0
    elapsed: float = 0.0


@dataclass
class SolverAnswer:
    status: Status
    witness: tuple | None = None
    stats: SolverStats = field(default_factory=SolverStats)
    info: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


def _answer(c: Circuit, witness, stats, info, t0) -> SolverAnswer:
    stats.elapsed = time.perf_counter() - t0
    if witness is None:
        status = Status.PROBABLY_UNSAT if info.get("method") == "mc" else Status.UNSAT
        return SolverAnswer(status, None, stats, info)
    if not check(c, witness):
        raise RuntimeError(f"solver produced a non-satisfying witness {witness!r}")
    return SolverAnswer(Status.SAT, tuple(witness), stats, info)


def _index_rows(size: int, n: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    x = np.empty((hi - lo, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        x[:, i] = idx % size
        idx //= size
    return x


def solve_brute(c: Circuit, limit=None, block: int = 1 << 16) -> SolverAnswer:
    """First satisfying assignment in lexicographic order, or UNSAT."""
    t0 = time.perf_counter()
    alg, n = c.algebra, c.n_inputs
    total = alg.size**n
    config.check_exhaustion(total, "brute-force search", limit)
    ev = c.evaluator()
    stats = SolverStats()
    witness = None
    for lo in range(0, total, block):
        hi = min(lo + block, total)
        x = _index_rows(alg.size, n, lo, hi)
        hit = ev.first_hit(x)
        if hit >= 0:
            stats.candidates_checked += hit + 1
            witness = decode_assignment(alg, x[hit])
            break
        stats.candidates_checked += hi - lo
    stats.gate_evals = stats.candidates_checked * c.size
    return _answer(c, witness, stats, {"method": "brute", "space": total}, t0)


# -- deterministic hitting-set search ------------------------------------------


def choose_d(alg, d_choice: str) -> int:
    if d_choice not in D_CHOICES:
        raise UsageError(f"d must be one of {D_CHOICES}, got {d_choice!r}")
    return degree_bound(alg).get(d_choice)


def _coords_to_indices(rows: np.ndarray, n: int, h: int, q: int) -> np.ndarray:
    weights = q ** np.arange(h - 1, -1, -1, dtype=np.int64)
    return rows.reshape(len(rows), n, h).astype(np.int64) @ weights


def _scan_range(ev, n, h, q, N, d, lo, hi):
    """First hitting-set position in [lo, hi) satisfying the circuit, or -1."""
    for off, rows in hitting_set_blocks(N, d, q, lo, hi):
        hit = ev.first_hit(_coords_to_indices(rows, n, h, q))
        if hit >= 0:
            return off + hit
    return -1


_worker_state: dict = {}


def _worker_init(circuit):
    _worker_state["ev"] = circuit.evaluator()


def _worker_scan(args):
    return _scan_range(_worker_state["ev"], *args)


def solve_deterministic(
    c: Circuit, d_choice: str = "refined", budget: float | None = None, jobs: int = 1, chunk: int = 1 << 18
) -> SolverAnswer:
    """Scan the hitting set of n*h-coordinate vectors with at most d nonzeros.

    Returns the first satisfying candidate in stream order. `budget` is a
    wall-clock limit in seconds; exceeding it raises BudgetError rather than
    answering. With jobs > 1 the stream is cut into ranges scanned by worker
    processes; the reported witness and counters equal the sequential ones.
    """
    t0 = time.perf_counter()
    alg = c.algebra
    if not isinstance(alg, CoordAlgebra):
        raise UsageError("the hitting-set solver needs a coordinatized algebra; use solve_product")
    n, h, q = c.n_inputs, alg.h, alg.q
    N = n * h
    d = choose_d(alg, d_choice)
    total = hitting_set_size(N, d, q)
    info = {"method": "hitting", "d_choice": d_choice, "d": d, "hitting_set_size": total}
    stats = SolverStats()
    ranges = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    found = -1
    if jobs <= 1 or len(ranges) <= 1:
        ev = c.evaluator()
        for lo, hi in ranges:
            found = _scan_range(ev, n, h, q, N, d, lo, hi)
            if found >= 0:
                break
            stats.candidates_checked = hi
            _check_budget(budget, t0, stats, total)
    else:
        found = _parallel_scan(c, ranges, jobs, (n, h, q, N, d), budget, t0, stats, total)
    witness = None
    if found >= 0:
        stats.candidates_checked = found + 1
        row = next(hitting_set_blocks(N, d, q, found, found + 1))[1]
        witness = decode_assignment(alg, _coords_to_indices(row, n, h, q)[0])
    stats.gate_evals = stats.candidates_checked * c.size
    return _answer(c, witness, stats, info, t0)


def _check_budget(budget, t0, stats, total):
    if budget is not None and time.perf_counter() - t0 > budget:
        raise BudgetError(
            f"time budget of {budget}s exceeded after {stats.candidates_checked} of {total} candidates"
        )


def _parallel_scan(c, ranges, jobs, params, budget, t0, stats, total):
    with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(c,)) as pool:
        pending = []
        nxt = 0
        try:
            while nxt < len(ranges) or pending:
                while nxt < len(ranges) and len(pending) < 2 * jobs:
                    lo, hi = ranges[nxt]
                    pending.append((hi, pool.submit(_worker_scan, params + (lo, hi))))
                    nxt += 1
                hi, fut = pending.pop(0)
                found = fut.result()
                if found >= 0:
                    return found
                stats.candidates_checked = hi
                _check_budget(budget, t0, stats, total)
        finally:
            for _, fut in pending:
                fut.cancel()
    return -1


# -- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class McDensity:
    """c = q**exponent with exponent = -d - q*log2(q)."""

    q: int
    d: int

    @property
    def exponent(self) -> float:
        return -self.d - self.q * math.log2(self.q)

    @property
    def log2(self) -> float:
        return self.exponent * math.log2(self.q)

    @property
    def value(self) -> float:
        return 2.0**self.log2

    def exact(self) -> Fraction | None:
        """Exact rational value when q*log2(q) is an integer (q = 2)."""
        if self.q != 2:
            return None
        return Fraction(1, 2 ** (self.d + 2))

    def __str__(self):
        ex = self.exact()
        if ex is not None:
            return f"2^{-(self.d + 2)}"
        return f"{self.q}^({-self.d} - {self.q}*log2 {self.q}) ~ {self.value:.6g}"


def mc_density(alg, d_choice: str = "refined") -> McDensity:
    if isinstance(alg, ProductAlgebra):
        raise UsageError("density is defined per factor; use solve_product")
    return McDensity(alg.q, choose_d(alg, d_choice))


@dataclass(frozen=True)
class TrialPlan:
    trials: int
    uncapped: int
    capped: bool
    exceeds_space: bool


def mc_trials(c, epsilon: float, max_trials: int | None = None, space: int | None = None) -> TrialPlan:
    """Smallest N with (1 - c)^N <= epsilon, taken as ceil(ln(1/epsilon) / c).

    c may be an McDensity, a Fraction or a float in (0, 1]; c >= 1 needs a
    single trial. `exceeds_space` tells the caller that N is larger than the
    assignment space, where exhaustive search would be cheaper.
    """
    if not 0 < epsilon < 1:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    if max_trials is not None and max_trials < 1:
        raise UsageError("max_trials must be >= 1")
    if isinstance(c, McDensity):
        c = c.exact() if c.exact() is not None else c.value
    if not 0 < c <= 1:
        raise UsageError(f"density must lie in (0, 1], got {c}")
    n = 1 if c >= 1 else max(1, math.ceil(math.log(1 / epsilon) / float(c)))
    capped = max_trials is not None and n > max_trials
    trials = min(n, max_trials) if capped else n
    return TrialPlan(trials, n, capped, space is not None and n > space)


@dataclass(frozen=True)
class MonteCarloConfig:
    epsilon: float = 0.01
    seed: int = 0
    max_trials: int | None = None
    d_choice: str = "refined"

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise UsageError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.max_trials is not None and self.max_trials < 1:
            raise UsageError("max_trials must be >= 1")
        if self.d_choice not in D_CHOICES:
            raise UsageError(f"d must be one of {D_CHOICES}, got {self.d_choice!r}")


def draw_trials(rng: Rng, space: int, count: int) -> list:
    """`count` uniform assignment indices in [0, space).

    One draw covers all n*h digits of a trial: the index read in base q is
    the concatenation of the coordinate vectors of the inputs.
    """
    return [rng.below(space) for _ in range(count)]


def solve_monte_carlo(c: Circuit, cfg: MonteCarloConfig | None = None) -> SolverAnswer:
    t0 = time.perf_counter()
    cfg = cfg or MonteCarloConfig()
    alg, n = c.algebra, c.n_inputs
    dens = mc_density(alg, cfg.d_choice)
    space = alg.size**n
    plan = mc_trials(dens, cfg.epsilon, cfg.max_trials, space)
    info = {
        "method": "mc",
        "d_choice": cfg.d_choice,
        "d": dens.d,
        "c": str(dens),
        "c_value": dens.value,
        "N": plan.trials,
        "N_uncapped": plan.uncapped,
        "capped": plan.capped,
        "exceeds_space": plan.exceeds_space,
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
    }
    rng = Rng(cfg.seed)
    ev = c.evaluator()
    stats = SolverStats()
    witness = None
    batch = 64
    done = 0
    while done < plan.trials and witness is None:
        count = min(batch, plan.trials - done)
        draws = draw_trials(rng, space, count)
        x = np.array([_split(v, alg.size, n) for v in draws], dtype=np.int64).reshape(count, n)
        hit = ev.first_hit(x)
        if hit >= 0:
            done += hit + 1
            witness = decode_assignment(alg, x[hit])
        else:
            done += count
        batch = min(batch * 2, 1 << 14)
    stats.trials = stats.candidates_checked = done
    stats.gate_evals = done * c.size
    return _answer(c, witness, stats, info, t0)


def _split(v: int, size: int, n: int) -> list:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        v, out[i] = divmod(v, size)
    return out


# -- direct products --------------------------------------------------------------


def solve(
    c: Circuit,
    method: str = "hitting",
    d_choice: str = "refined",
    budget: float | None = None,
    jobs: int = 1,
    cfg: MonteCarloConfig | None = None,
    limit=None,
) -> SolverAnswer:
    """Dispatch on method; product algebras go through solve_product unless brute."""
    kw = dict(d_choice=d_choice, budget=budget, jobs=jobs, cfg=cfg, limit=limit)
    if isinstance(c.algebra, ProductAlgebra) and method != "brute":
        return solve_product(c, method, **kw)
    if method == "brute":
        return solve_brute(c, limit=limit)
    if method == "hitting":
        return solve_deterministic(c, d_choice, budget=budget, jobs=jobs)
    if method == "mc":
        return solve_monte_carlo(c, cfg)
    raise UsageError(f"unknown method {method!r}")


def solve_product(c: Circuit, method: str = "hitting", **kw) -> SolverAnswer:
    """Solve each factor projection; SAT iff all factors are SAT."""
    t0 = time.perf_counter()
    alg = c.algebra
    if not isinstance(alg, ProductAlgebra):
        raise UsageError("solve_product needs a circuit over a product algebra")
    stats = SolverStats()
    parts = []
    factor_info = []
    for i in range(len(alg.factors)):
        ans = solve(project_circuit(c, i), method, **kw)
        stats.candidates_checked += ans.stats.candidates_checked
        stats.trials += ans.stats.trials
        stats.gate_evals += ans.stats.gate_evals
        factor_info.append({"factor": i, "status": ans.status.value, **ans.info})
        if not ans.sat:
            stats.elapsed = time.perf_counter() - t0
            info = {"method": method, "factors": factor_info, "failing_factor": i}
            return SolverAnswer(ans.status, None, stats, info)
        parts.append(ans.witness)
    witness = tuple(tuple(p[j] for p in parts) for j in range(c.n_inputs))
    return _answer(c, witness, stats, {"method": method, "factors": factor_info}, t0)
