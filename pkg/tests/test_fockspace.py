import pytest
from hypothesis import given, settings, strategies as st

from voalab.exactmath import Scalar
from voalab.fockspace import (
    LatticeContext,
    State,
    central_charge,
    enumerate_basis,
    graded_dimension,
    lattice_points,
    weight_of,
)
from voalab.vertexops import virasoro_mode

Q = Scalar


@pytest.fixture(scope="module")
def a2():
    return LatticeContext.a1(2)


def test_weights(a2):
    assert weight_of(a2, (Q(-1),)) == 3
    assert weight_of(a2, (Q(0),)) == 0
    assert weight_of(a2, (Q(3, 4),)) == Q(3, 8)


@pytest.mark.parametrize("p, c", [(2, -2), (3, -7), (1, 1)])
def test_central_charge(p, c):
    assert central_charge(LatticeContext.a1(p)) == c


def test_central_charge_two_parameter():
    # 1 - 6 (p - p')^2 / (p p')
    assert central_charge(LatticeContext.a1(3, 2)) == 0
    assert central_charge(LatticeContext.a1(5, 2)) == Q(-22, 5)


def test_alpha_norm():
    assert LatticeContext.a1(3).alpha_norm == 6
    assert LatticeContext.a1(3, 2).alpha_norm == 12


def test_bad_contexts():
    with pytest.raises(ValueError):
        LatticeContext.a1(4, 2)
    with pytest.raises(ValueError):
        LatticeContext(((2, 1), (0, 2)), 2)


def test_fock_dims_are_partition_numbers(a2):
    dims = graded_dimension(a2, a2.zero, 5, single_charge=True)
    assert [d for _, d in dims] == [1, 1, 2, 3, 5, 7]


def test_weight_one_stratum(a2):
    b = enumerate_basis(a2, a2.zero, 1)
    assert len(b.stratum(1)) == 2
    assert ((), (Q(1),)) in b.stratum(1)


def test_three_quarter_coset_minimum(a2):
    b = enumerate_basis(a2, (Q(3, 4),), 3)
    assert b.min_weight() == Q(3, 8)
    assert sorted(pt for _, pt in b.stratum(Q(3, 8))) == [(Q(-1, 4),), (Q(3, 4),)]


def test_cutoff_below_minimum_is_empty(a2):
    b = enumerate_basis(a2, (Q(1, 2),), -1)
    assert b.weights() == []


@pytest.mark.parametrize("p, coset", [(2, Q(0)), (2, Q(3, 4)), (3, Q(1, 3)), (3, Q(-1, 6))])
def test_l0_matches_closed_form(p, coset):
    ctx = LatticeContext.a1(p)
    l0 = virasoro_mode(ctx, 0)
    for pt in lattice_points(ctx, (coset,), 6):
        s = State.monomial((), pt)
        assert l0(s) == s * weight_of(ctx, pt)


def test_enumeration_independent_of_bound(a2):
    small = enumerate_basis(a2, (Q(1, 4),), 5)
    big = enumerate_basis(a2, (Q(1, 4),), 10)
    for w in small.weights():
        assert small.stratum(w) == big.stratum(w)


def test_two_parameter_basis():
    ctx = LatticeContext.a1(3, 2)
    b = enumerate_basis(ctx, ctx.zero, 3)
    assert [d for _, d in b.dims()] == [1, 1, 2, 3]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(-8, 8), st.integers(0, 3))
def test_weight_denominators(p, num, level):
    ctx = LatticeContext.a1(p)
    coset = (Q(num, 2 * p),)
    b = enumerate_basis(ctx, coset, weight_of(ctx, coset) + level)
    h0 = b.min_weight()
    for w in b.weights():
        # all weights of a coset differ from the minimum by multiples of 1/(4p)
        assert ((w - h0) * 4 * p).denominator == 1


@given(st.integers(1, 3), st.integers(-4, 4), st.integers(1, 3), st.integers(-4, 4))
def test_weight_and_charge_additive(n1, x1, n2, x2):
    ctx = LatticeContext.a1(2)
    m1 = (((n1, 0),), (Q(x1),))
    m2 = (((n2, 0),), (Q(x2),))
    from voalab.fockspace import multiply_monomials
    m = multiply_monomials(m1, m2)
    assert m[1] == (Q(x1 + x2),)
    assert ctx.mono_weight(m) - weight_of(ctx, m[1]) == n1 + n2
