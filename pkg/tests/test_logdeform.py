import logging

import pytest

from voalab.exactmath import Scalar
from voalab.fockspace import LatticeContext, State, enumerate_basis, exp_state, heis_state, vacuum
from voalab.logdeform import (
    ModeFamily,
    build_M2,
    deformed_field_module,
    deformed_module,
    delta_apply,
    field_nth_product,
    nilpotent_rank,
    phi_coefficients,
    second_screening_mode,
)
from voalab.vertexops import bracket_check, composite_mode, conformal_vector, identity, shift_check, virasoro_mode

Q = Scalar


@pytest.fixture(scope="module")
def a2():
    return LatticeContext.a1(2)


@pytest.fixture(scope="module")
def plus(a2):
    return build_M2(a2, "+", Q(3, 8) + 3)


def test_phi_coefficients():
    assert phi_coefficients(2, 3) == [2, Q(2, 3), Q(2, 5), Q(2, 7)]
    assert phi_coefficients(3, 1) == [3, Q(1, 2)]
    assert phi_coefficients(5, 0) == [5]
    with pytest.raises(ValueError):
        phi_coefficients(1, 2)


def test_m2_lowest_data(plus):
    assert plus.min_weight == Q(3, 8)
    assert len(plus.stratum(Q(3, 8))) == 2
    # at p = 2 both summands are the same coset
    assert plus.cosets == [(Q(3, 4),)]


def test_m2_minus_lowest(a2):
    m = build_M2(a2, "-", 3)
    assert m.min_weight == Q(-1, 8)


def test_pair_screening_shifts_and_closure(a2, plus):
    tests = plus.test_states(3)
    cosets = {c[0] % 1 for c in plus.cosets}
    for n in range(-2, 3):
        g = second_screening_mode(a2, n)
        assert shift_check(g, tests, a2).passed
        for t in tests:
            for mon, _ in g(t).items():
                assert mon[1][0] % 1 in cosets
    assert any(second_screening_mode(a2, 0)(t) for t in tests)


def test_pair_screening_primary_of_weight_one(a2, plus):
    tests = plus.test_states(2)
    G = ModeFamily(lambda n: second_screening_mode(a2, n))
    for n in range(-2, 3):
        for m in range(-2, 3):
            assert bracket_check(virasoro_mode(a2, n), G(m), G(n + m) * (-m), tests).passed


def test_incompatible_charge_acts_as_zero(a2, caplog):
    g = second_screening_mode(a2, 0)
    with caplog.at_level(logging.WARNING, logger="voalab.logdeform"):
        assert not g(exp_state(a2, (Q(1, 3),)))
    assert "incompatible" in caplog.text


def test_delta_examples(a2):
    v = exp_state(a2, (Q(1),))
    om = conformal_vector(a2)
    assert delta_apply(a2, v, vacuum(a2)) == {0: vacuum(a2)}
    assert delta_apply(a2, v, om) == {0: om, 1: v}
    with pytest.raises(ValueError):
        delta_apply(a2, v, exp_state(a2, (Q(-1),)))
    with pytest.raises(ValueError):
        delta_apply(a2, om, vacuum(a2))


def test_delta_expansion_length(a2):
    v = exp_state(a2, (Q(1),))
    for mon in enumerate_basis(a2, a2.zero, 4).all_monomials():
        a = State({mon: 1})
        if composite_mode(a2, v, 0)(a):
            continue
        assert max(delta_apply(a2, v, a)) <= a.weight(a2)


def test_semisimple_deformation_stays_semisimple(a2):
    v = heis_state(a2, [1])
    basis = enumerate_basis(a2, a2.zero, 3)
    dm = deformed_module(a2, [basis], v)
    assert dm.dims() == basis.dims()
    for w in basis.weights():
        mons = basis.stratum(w)
        eigen = {a2.mono_weight(m) + a2.pair((Q(1),), m[1]) for m in mons}
        for h in eigen:
            assert nilpotent_rank(dm.virasoro(0), mons, h, w).rank == 1


def test_deformed_virasoro_closure(a2, plus):
    lt = deformed_field_module(plus).virasoro
    tests = plus.test_states(2)
    for m in range(-2, 3):
        for n in range(-2, 3):
            e = lt(m + n) * (m - n)
            if m + n == 0:
                e = e + identity(a2) * (Q(m ** 3 - m, 12) * a2.c)
            assert bracket_check(lt(m), lt(n), e, tests).passed


def test_nilpotent_rank_examples(a2, plus):
    l0 = virasoro_mode(a2, 0)
    for w in plus.weights():
        assert nilpotent_rank(l0, plus.stratum(w), w, w).rank == 1
    lt = deformed_field_module(plus).virasoro
    low = plus.stratum(Q(3, 8))
    assert nilpotent_rank(lt(0), low, Q(3, 8)).rank == 2
    assert nilpotent_rank(lt(0), low, Q(1, 2)).rank == 0


def test_nilpotent_rank_minus_lowest_stratum(a2):
    """The deformed L(0) on the lowest stratum of the minus module has rank 2."""
    minus = build_M2(a2, "-", 3)
    lt = deformed_field_module(minus).virasoro
    low = minus.min_weight
    assert nilpotent_rank(lt(0), minus.stratum(low), low).rank == 2


def test_field_products(a2):
    a = heis_state(a2, [1])
    hf = ModeFamily(lambda n: composite_mode(a2, a, n))
    one = vacuum(a2)
    assert field_nth_product(hf, hf, 1, -1, 2)(one) == one * a2.alpha_norm
    assert not field_nth_product(hf, hf, 2, -1, 2)(one)
    with pytest.raises(ValueError):
        field_nth_product(hf, hf, 1, 0, None)


def test_virasoro_with_pair_field_product(a2, plus):
    # L(z)_1 G(z) = G(z) in modes, through the n-product formula
    lf = ModeFamily(lambda n: virasoro_mode(a2, n - 1))
    G = ModeFamily(lambda n: second_screening_mode(a2, n))
    tests = plus.test_states(2)
    for m in range(-2, 3):
        prod = field_nth_product(lf, G, 1, m, 3)
        for t in tests:
            assert prod(t) == G(m)(t)
