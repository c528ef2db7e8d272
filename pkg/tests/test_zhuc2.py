import random

import pytest
from hypothesis import given, strategies as st

from voalab.exactmath import Scalar
from voalab.fockspace import LatticeContext, State, exp_state, heis_state, vacuum
from voalab.screenings import screening_zero_mode, triplet_generators
from voalab.vertexops import composite_mode, conformal_vector, virasoro_mode
from voalab.zhuc2 import (
    GradedAlgebra,
    TruncationPolicy,
    c2_class,
    c2_membership,
    c2_quotient_dims,
    c2_rank,
    h_rs,
    o_zero_mode,
    ov_membership,
    poisson_bracket_consistent,
    zhu_circ,
    zhu_star,
)

Q = Scalar


@pytest.fixture(scope="module")
def a2():
    return LatticeContext.a1(2)


@pytest.fixture(scope="module")
def triplet(a2):
    return GradedAlgebra.from_generators(a2, triplet_generators(a2), 8, "triplet")


def test_h_rs():
    assert h_rs(5, 1, 1) == 0
    assert h_rs(2, 4, 1) == Q(3, 8)
    assert h_rs(2, 2, 1) == Q(-1, 8)


def test_star_examples(a2):
    one = vacuum(a2)
    b = heis_state(a2, [2, 1], (Q(1),))
    assert zhu_star(a2, one, b) == b
    om = conformal_vector(a2)
    assert zhu_star(a2, om, one) == om
    a = heis_state(a2, [1])
    # a_{-1} a + a_0 a with a_0 = alpha(0) acting by zero on charge 0
    assert zhu_star(a2, a, a) == heis_state(a2, [1, 1])


def test_circ_examples(a2):
    b = heis_state(a2, [1], (Q(1),))
    assert not zhu_circ(a2, vacuum(a2), b)
    for a in (conformal_vector(a2), heis_state(a2, [2]), exp_state(a2, (Q(1),))):
        expected = virasoro_mode(a2, -1)(a) + a * a.weight(a2)
        assert zhu_circ(a2, a, vacuum(a2)) == expected
    a = heis_state(a2, [2, 1])
    c = zhu_circ(a2, a, b)
    assert max(c.weights(a2)) <= a.weight(a2) + b.weight(a2) + 1


def test_zero_mode_examples(a2):
    o = o_zero_mode(a2, conformal_vector(a2))
    f = exp_state(a2, (Q(-1),))
    assert o(f) == f * 3


@given(st.integers(-12, 12).filter(lambda n: n != 0), st.integers(1, 12))
def test_singlet_top_level_relation(num, den):
    ctx = LatticeContext.a1(2)
    h = triplet_generators(ctx)["H"]
    lam = Q(num, den)
    v = exp_state(ctx, (lam,))
    mon = next(iter(v.terms))
    x = o_zero_mode(ctx, conformal_vector(ctx))(v).coeff(mon)
    y = o_zero_mode(ctx, h)(v).coeff(mon)
    poly = (x - h_rs(2, 1, 1)) ** 2 * (x - h_rs(2, 2, 1))
    assert y * y == Q(128, 9) * poly


def test_c2_examples(a2, triplet):
    om = conformal_vector(a2)
    assert c2_membership(triplet, virasoro_mode(a2, -1)(om))[0]
    g = triplet_generators(a2)
    assert c2_membership(triplet, c2_class(triplet, g["H"], g["E"]))[0]
    assert not c2_membership(triplet, om)[0]


def test_c2_methods_agree(triplet):
    for w in range(6):
        assert c2_rank(triplet, w, "pairs") == c2_rank(triplet, w, "generators")


def test_c2_exact_under_bigger_cutoff(a2, triplet):
    bigger = GradedAlgebra.from_generators(a2, triplet_generators(a2), 10, "triplet")
    for w in range(7):
        assert c2_rank(triplet, w) == c2_rank(bigger, w)


def test_fock_quotient_never_vanishes(a2):
    m1 = GradedAlgebra.from_generators(a2, {"a": heis_state(a2, [1])}, 8, "M(1)")
    rep = c2_quotient_dims(m1, TruncationPolicy(6, 6, 2))
    assert all(d == 1 for _, d in rep.dims)
    assert not rep.stable and rep.total is None


def test_ov_membership_examples(a2, triplet):
    pol = TruncationPolicy(6, 4, 1)
    g = triplet_generators(a2)
    v = zhu_circ(a2, g["omega"], g["omega"])
    res = ov_membership(triplet, v, pol)
    assert res.member and res.stable
    assert ov_membership(triplet, State(), pol).member
    assert not ov_membership(triplet, vacuum(a2), pol).member


def test_poisson_bracket_on_samples(a2, triplet):
    rng = random.Random(3)
    g = list(triplet_generators(a2).values())
    for _ in range(6):
        # weights stay below the cutoff: wt(u_{-2} a) + wt(b) - 1 <= 8
        a = rng.choice(triplet.basis(2))
        b = rng.choice(triplet.basis(rng.choice([2, 3])))
        shift = composite_mode(a2, rng.choice(g), -2)
        assert poisson_bracket_consistent(triplet, a, b, shift(a), State())


def test_kernel_ambient_algebra(a2):
    qt = screening_zero_mode(a2, "short")
    ker = GradedAlgebra.from_kernel(a2, [qt], a2.zero, 6)
    assert [d for _, d in ker.dims()] == [1, 1, 4, 5, 8, 10]
