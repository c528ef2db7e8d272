import pytest
from hypothesis import given, settings, strategies as st

from voalab.exactmath import (
    Scalar,
    as_scalar,
    colored_partitions,
    kernel_basis,
    mat_vec,
    partition_count_series,
    rank,
    rat_binom,
    span_membership,
)

small_q = st.builds(Scalar, st.integers(-6, 6), st.integers(1, 5))


def dense_rows(mat):
    return [{j: Scalar(x) for j, x in enumerate(row) if x} for row in mat]


def product_series(nmax, colors):
    """Coefficients of prod_{k>=1} (1 - q^k)^(-colors) by repeated multiplication."""
    coeffs = [1] + [0] * nmax
    for k in range(1, nmax + 1):
        for _ in range(colors):
            # multiply by 1/(1 - q^k) = 1 + q^k + q^{2k} + ...
            for n in range(k, nmax + 1):
                coeffs[n] += coeffs[n - k]
    return coeffs


def test_scalar_is_exact_and_reduced():
    x = Scalar(6, 8)
    assert (x.numerator, x.denominator) == (3, 4)
    assert Scalar(1, -2).denominator == 2
    assert Scalar(1, 3) * 3 == 1


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)
    assert as_scalar("3/8") == Scalar(3, 8)


@pytest.mark.parametrize("r, j, expected", [
    (Scalar(7, 3), 0, Scalar(1)),
    (Scalar(-1), 1, Scalar(-1)),
    (Scalar(-2, 3), 2, Scalar(5, 9)),
])
def test_rat_binom_examples(r, j, expected):
    assert rat_binom(r, j) == expected


@given(small_q, st.integers(1, 8))
def test_rat_binom_pascal(r, j):
    assert rat_binom(r, j) == rat_binom(r - 1, j) + rat_binom(r - 1, j - 1)


def test_kernel_examples():
    assert kernel_basis(dense_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3) == []
    assert len(kernel_basis([], 2)) == 2
    (v,) = kernel_basis(dense_rows([[1, 1], [1, 1]]), 2)
    assert v[0] == -v[1] != 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_rank_nullity_and_kernel_vectors(nrows, ncols, data):
    mat = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=ncols, max_size=ncols),
                             min_size=nrows, max_size=nrows))
    rows = dense_rows(mat)
    ker = kernel_basis(rows, ncols)
    assert rank(rows) + len(ker) == ncols
    for v in ker:
        assert mat_vec(rows, v) == {}


def test_span_membership_examples():
    gens = [{0: Scalar(1)}, {1: Scalar(1)}]
    assert span_membership({0: Scalar(1)}, gens) == [1, 0]
    assert span_membership({}, gens) == [0, 0]
    assert span_membership({2: Scalar(1)}, gens) is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.dictionaries(st.integers(0, 4), small_q.filter(bool), max_size=4), min_size=1, max_size=4),
       st.lists(small_q, min_size=4, max_size=4))
def test_span_membership_reconstructs(gens, coeffs):
    v = {}
    for c, g in zip(coeffs, gens):
        for i, x in g.items():
            v[i] = v.get(i, 0) + c * x
    v = {i: x for i, x in v.items() if x}
    sol = span_membership(v, gens)
    assert sol is not None
    back = {}
    for c, g in zip(sol, gens):
        for i, x in g.items():
            back[i] = back.get(i, 0) + c * x
    assert {i: x for i, x in back.items() if x} == v


def test_partition_examples():
    assert len(colored_partitions(4, 1)) == 5
    assert colored_partitions(0, 3) == [()]
    assert len(colored_partitions(2, 2)) == 5


@pytest.mark.parametrize("colors", [1, 2, 3])
def test_partition_counts_match_product_formula(colors):
    oracle = product_series(8, colors)
    assert [len(colored_partitions(n, colors)) for n in range(9)] == oracle
    assert partition_count_series(8, colors) == oracle


@given(st.integers(0, 7), st.integers(1, 2))
def test_partitions_canonical_and_distinct(n, colors):
    parts = colored_partitions(n, colors)
    assert len(set(parts)) == len(parts)
    for p in parts:
        assert sum(k for k, _ in p) == n
        assert list(p) == sorted(p, key=lambda pc: (-pc[0], pc[1]))
