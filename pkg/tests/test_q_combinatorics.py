import csv
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matrixpoints.errors import DomainError, PartsMismatch
from matrixpoints.q_combinatorics import (
    ELLIPTIC_DUMP_HEADER,
    P_poly,
    Partition,
    compositions,
    eta5_coeffs,
    partition_count,
    partition_tuples,
    partitions_of,
    q_multinomial,
    q_pochhammer,
    q_pochhammer_exact,
    write_term_dump,
)

PARTITION_NUMBERS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


@pytest.mark.parametrize("q, n, expected", [(3, 0, 1), (3, 2, 16), (5, 3, -11904), (2, 1, -1)])
def test_q_pochhammer_examples(q, n, expected):
    assert q_pochhammer(q, n) == expected


@pytest.mark.parametrize("n, parts, q, expected", [(2, (1, 1, 0), 3, 4), (4, (4,), 5, 1), (2, (2, 0, 0), 7, 1)])
def test_q_multinomial_examples(n, parts, q, expected):
    assert q_multinomial(n, parts, q) == expected


@given(st.integers(2, 13), st.lists(st.integers(0, 4), min_size=1, max_size=4))
def test_q_multinomial_symmetric_and_integral(q, parts):
    n = sum(parts)
    v = q_multinomial(n, parts, q)
    for perm in set(permutations(parts)):
        assert q_multinomial(n, perm, q) == v
    # binomial recursion [n; k] = [n-1; k-1] + q^k [n-1; k]
    if len(parts) == 2 and parts[0] > 0 and parts[1] > 0:
        k = parts[0]
        assert v == q_multinomial(n - 1, (k - 1, n - k), q) + q**k * q_multinomial(n - 1, (k, n - k - 1), q)


def test_q_multinomial_rejects_bad_parts():
    with pytest.raises(PartsMismatch):
        q_multinomial(3, (1, 1), 3)
    with pytest.raises(PartsMismatch):
        q_multinomial(1, (2, -1), 3)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_P_poly_small_cases(p):
    assert P_poly(1, 0, p) == p
    assert P_poly(1, 1, p) == -p
    assert P_poly(2, 0, p) == p**4 + p**3 + p**2
    assert P_poly(2, 2, p) == p**3


def test_P_poly_domain():
    with pytest.raises(DomainError):
        P_poly(2, 3, 3)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("n", range(0, 9))
def test_pochhammer_inversion_identity(p, n):
    lhs = Fraction(q_pochhammer(p, n))
    rhs = (-1) ** n * Fraction(p) ** (n * (n + 1) // 2) * q_pochhammer_exact(Fraction(1, p), n)
    assert lhs == rhs


def test_pochhammer_lower_bound():
    for p in [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]:
        for n in range(1, 65):
            v = q_pochhammer_exact(Fraction(1, p), n)
            assert Fraction(5601, 10000) < v < 1


def test_partitions():
    assert [str(x) for x in partitions_of(0)] == ["[]"]
    assert [x.parts for x in partitions_of(2)] == [(2,), (1, 1)]
    assert [partition_count(r) for r in range(11)] == PARTITION_NUMBERS
    for r in range(8):
        for lam in partitions_of(r):
            assert lam.size == r == sum(j * m for j, m in lam.multiplicities.items())
            assert lam.length == sum(lam.multiplicities.values())


def test_partition_validation_and_stats():
    lam = Partition((3, 1, 1))
    assert (lam.size, lam.length, lam.multiplicity(1), lam.multiplicity(2)) == (5, 3, 2, 0)
    with pytest.raises(DomainError):
        Partition((1, 2))
    with pytest.raises(DomainError):
        Partition((2, 0))


def test_compositions_order():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(compositions(3, 6))) == 56


@pytest.mark.parametrize("r, count", [(0, 1), (1, 6), (2, 27)])
def test_partition_tuple_counts(r, count):
    tuples = list(partition_tuples(r))
    assert len(tuples) == count
    assert all(len(t) == 6 and sum(x.size for x in t) == r for t in tuples)


def test_partition_tuple_counts_match_generating_function():
    gen = np.array(PARTITION_NUMBERS[:7], dtype=np.int64)
    power = np.array([1], dtype=np.int64)
    for _ in range(6):
        power = np.convolve(power, gen)[:7]
    for r in range(7):
        assert sum(1 for _ in partition_tuples(r)) == power[r]


def test_eta5_coefficients():
    assert eta5_coeffs(5) == [1, -5, 5, 10, -15, -6]
    # independent check by polynomial multiplication
    nmax = 20
    prod = np.array([1], dtype=np.int64)
    for i in range(1, nmax + 1):
        factor = np.zeros(i + 1, dtype=np.int64)
        factor[0], factor[i] = 1, -1
        for _ in range(5):
            prod = np.convolve(prod, factor)[: nmax + 1]
    assert eta5_coeffs(nmax) == prod.tolist()


def test_term_dump_roundtrip(tmp_path):
    rows = [{"r": 0, "s": 1, "u": 1, "sign": -1, "p_exponent": 3, "denominator": 144, "alpha_exponent": -1, "term": Fraction(1, 2)}]
    path = tmp_path / "d.csv"
    write_term_dump(path, ELLIPTIC_DUMP_HEADER, rows)
    with open(path) as fh:
        got = list(csv.DictReader(fh))
    assert got == [{k: str(v) for k, v in rows[0].items()}]
