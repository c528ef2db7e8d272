import pytest

from voalab.exactmath import Scalar
from voalab.fockspace import LatticeContext, State, enumerate_basis, exp_state, state_to_vector, vacuum
from voalab.screenings import (
    charge_screening_G,
    doublet_generators,
    kernel_stratum,
    screening_charge,
    screening_zero_mode,
    strong_generation_span,
    triplet_generators,
)
from voalab.vertexops import bracket_check, conformal_vector, shift_check, virasoro_mode

Q = Scalar


@pytest.fixture(scope="module")
def a2():
    return LatticeContext.a1(2)


def dims_upto(span, top):
    d = dict(span.dims)
    return [d.get(Q(w), 0) for w in range(top + 1)]


def test_screening_charges():
    assert screening_charge(LatticeContext.a1(3), "short") == (Q(-1, 3),)
    assert screening_charge(LatticeContext.a1(3), "long") == (Q(1),)
    assert screening_charge(LatticeContext.a1(3, 2), "q") == (Q(1, 2),)
    assert screening_charge(LatticeContext.a1(3, 2), "qtilde") == (Q(-1, 3),)
    with pytest.raises(ValueError):
        screening_charge(LatticeContext.a1(3, 2), "long")


def test_screening_examples(a2):
    qt = screening_zero_mode(a2, "short")
    assert not qt(vacuum(a2))
    assert not qt(conformal_vector(a2))
    g = triplet_generators(a2)
    assert screening_zero_mode(a2, "long")(g["F"]) == g["H"] != 0


@pytest.mark.parametrize("p", [2, 3])
def test_screenings_commute_with_virasoro(p):
    ctx = LatticeContext.a1(p)
    tests = [State({m: 1}) for m in enumerate_basis(ctx, ctx.zero, 4).all_monomials()]
    q, qt = screening_zero_mode(ctx, "long"), screening_zero_mode(ctx, "short")
    for n in range(-3, 4):
        for s in (q, qt):
            assert bracket_check(virasoro_mode(ctx, n), s, None, tests).passed
    assert bracket_check(q, qt, None, tests).passed
    assert shift_check(qt, tests, ctx).passed


def test_kernel_examples(a2):
    qt = screening_zero_mode(a2, "short")
    assert kernel_stratum(a2, [qt], a2.zero, 0).dim == 1
    assert kernel_stratum(a2, [qt], a2.zero, 1, single_charge=True).dim == 0
    k3 = kernel_stratum(a2, [qt], a2.zero, 3)
    f = exp_state(a2, (Q(-1),))
    from voalab.exactmath import span_membership
    index = {m: i for i, m in enumerate(k3.monomials)}
    assert span_membership(state_to_vector(f, index), k3.basis) is not None
    for s in k3.states():
        assert not qt(s)


def test_kernel_independent_of_order():
    ctx = LatticeContext.a1(3, 2)
    q, qt = screening_zero_mode(ctx, "q"), screening_zero_mode(ctx, "qtilde")
    for w in range(0, 6):
        assert kernel_stratum(ctx, [q, qt], ctx.zero, w).dim == kernel_stratum(ctx, [qt, q], ctx.zero, w).dim


@pytest.mark.parametrize("p", [2, 3])
def test_triplet_generators(p):
    ctx = LatticeContext.a1(p)
    g = triplet_generators(ctx)
    for k in ("F", "H", "E"):
        assert g[k] and g[k].weight(ctx) == 2 * p - 1
    assert not screening_zero_mode(ctx, "long")(g["E"])


def test_doublet_states(a2):
    d = doublet_generators(a2)
    # (3p - 2) / 4 at p = 2
    assert d["x-"].weight(a2) == d["x+"].weight(a2) == 1
    assert d["x+"].charges() == {(Q(1, 2),)}


def test_charge_operator_shifts():
    ctx = LatticeContext.a1(3, 2)
    g = charge_screening_G(ctx)
    assert g.charge_shift == (Q(1),)
    tests = [State({m: 1}) for m in enumerate_basis(ctx, (Q(1, 2),), 4).all_monomials()]
    assert any(g(t) for t in tests)
    assert shift_check(g, tests, ctx).passed
    with pytest.raises(ValueError):
        charge_screening_G(LatticeContext.a1(2))


def test_span_examples(a2):
    assert dims_upto(strong_generation_span(a2, [conformal_vector(a2)], 4), 4) == [1, 0, 1, 1, 2]
    assert strong_generation_span(a2, [], 4).dims == [(0, 1)]


def test_span_contained_in_kernel(a2):
    qt = screening_zero_mode(a2, "short")
    g = triplet_generators(a2)
    span = dict(strong_generation_span(a2, [g["omega"], g["F"]], 5).dims)
    for w in range(6):
        assert span.get(Q(w), 0) <= kernel_stratum(a2, [qt], a2.zero, w).dim
