"""Matrix point counts on elliptic curves and K3 surfaces over finite fields,
with prime sweeps of the normalized errors against their limiting densities."""

from .brute_oracle import OracleCount, oracle_elliptic, oracle_k3
from .count_engines import (
    CountResult,
    ErrorTerms,
    K3Count,
    ReferencePolynomials,
    Verdict,
    elliptic_error,
    elliptic_matrix_count,
    k3_matrix_count,
    k3_star_error,
    k3_supersingular_count,
    supersingular_elliptic_count,
)
from .curve_traces import (
    CM_TABLE,
    FrobeniusData,
    K3Parameter,
    RationalCurveModel,
    ReducedCurve,
    clausen_curve,
    frobenius,
    frobenius_from_trace,
    is_supersingular,
    k3_gamma,
    prime_power_traces,
    reduce_curve,
    splits,
    trace,
)
from .densities import DensityKind, cdf, density, interval_probability
from .errors import (
    BadPrime,
    BadReduction,
    BudgetExceeded,
    DomainError,
    EmptySample,
    FormulaError,
    MatrixPointsError,
    NonIntegral,
    NotPrime,
)
from .field_arith import FieldElement, inverse, is_prime, legendre, mod_reduce, primes_up_to
from .q_combinatorics import P_poly, Partition, partition_tuples, partitions_of, q_multinomial, q_pochhammer
from .quad_order import QuadOrderElement
from .stat_sweep import (
    Histogram,
    SweepRecord,
    discrepancy,
    effective_bound,
    histogram,
    read_records,
    sweep_elliptic,
    sweep_k3,
    write_records,
)

__version__ = "0.1.0"
