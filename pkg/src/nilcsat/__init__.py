"""Circuit satisfiability over finite supernilpotent algebras of prime power order.

Deterministic hitting-set and Monte Carlo solvers, the translation from
circuits to polynomial equations over F_q, and the tools used to check the
degree and density bounds those solvers rely on.
"""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    CoordAlgebra,
    Coordinatization,
    ProductAlgebra,
    build_example,
    degree_bound,
    direct_product,
    sys_pol_bound,
    validate_triangular,
)
from .algfile import format_algebra, load_algebra, parse_algebra  # noqa: E402
from .circuit import Circuit, check, eval_circuit, format_circuit, parse_circuit, random_circuit  # noqa: E402
from .density import check_density, density_bound, preimage_reduction  # noqa: E402
from .errors import BudgetError, CsatError, DomainError, FormatError, ResourceError, UsageError  # noqa: E402
from .gf import PrimeField  # noqa: E402
from .hitting import enumerate_hitting_set, hitting_set_size  # noqa: E402
from .poly import MultiPoly, format_poly, interpolate, parse_poly  # noqa: E402
from .solve import (  # noqa: E402
    MonteCarloConfig,
    SolverAnswer,
    Status,
    mc_density,
    mc_trials,
    solve_brute,
    solve_deterministic,
    solve_monte_carlo,
    solve_product,
)
from .translate import circuit_to_system, combine, encode_field_equation, verify_translation  # noqa: E402
