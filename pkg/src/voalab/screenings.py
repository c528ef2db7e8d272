"""Screening zero modes, their kernels, and the W-algebra generators built from them."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

from typing import Dict, List, Sequence, Tuple

from .exactmath import Scalar, RowEchelon, SparseVector, as_scalar, kernel_basis
from .fockspace import (
    LatticeContext,
    Monomial,
    Point,
    State,
    add_points,
    enumerate_basis,
    exp_state,
    vector_to_state,
    weight_of,
)
from .vertexops import (
    ModeOperator,
    composite_mode,
    conformal_vector,
    exp_apply,
    exp_mode,
)


def screening_charge(ctx: LatticeContext, which: str, index: int = 0) -> Point:
    """Charge of the screening current.

    Single-parameter lattices: ``long`` (also ``q``) is e^{alpha_i},
    ``short`` (also ``qtilde``) is e^{-alpha_i/p}.  Two-parameter lattices:
    ``q`` is e^{alpha/p'} and ``qtilde`` is e^{-alpha/p}.
    """
    unit = [Scalar(0)] * ctx.rank
    if ctx.minimal_mode:
        if which == "q":
            unit[0] = Scalar(1, ctx.pprime)
        elif which == "qtilde":
            unit[0] = Scalar(-1, ctx.p)
        else:
            raise ValueError(f"screening {which!r} is not defined for a (p, p') lattice")
        return tuple(unit)
    if which in ("long", "q"):
        unit[index] = Scalar(1)
    elif which in ("short", "qtilde"):
        unit[index] = Scalar(-1, ctx.p)
    else:
        raise ValueError(f"unknown screening {which!r}")
    return tuple(unit)


def screening_zero_mode(ctx: LatticeContext, which: str, index: int = 0) -> ModeOperator:
    beta = screening_charge(ctx, which, index)
    if weight_of(ctx, beta) != 1:
        raise ValueError("screening current must have conformal weight one")
    op = exp_mode(ctx, beta, 0)
    op.kind = "screening"
    op.label = f"{which}[{index}]" if ctx.rank > 1 else which
    return op


@dataclass
class KernelStratum:
    coset: Point
    weight: Scalar
    monomials: List[Monomial]
    basis: List[SparseVector]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def states(self) -> List[State]:
        return [vector_to_state(v, self.monomials) for v in self.basis]


def screening_matrix(ops: Sequence[ModeOperator], monomials: Sequence[Monomial]) -> List[SparseVector]:
    """Stacked matrix rows (one per image monomial) of the given operators on a stratum."""
    rows: List[SparseVector] = []
    for op in ops:
        row_index: Dict[Monomial, int] = {}
        block: List[SparseVector] = []
        for j, mon in enumerate(monomials):
            for img, c in op.apply_monomial(mon):
                i = row_index.get(img)
                if i is None:
                    i = row_index[img] = len(block)
                    block.append({})
                block[i][j] = c
        rows.extend(block)
    return rows


def kernel_stratum(ctx: LatticeContext, screenings: Sequence[ModeOperator], coset: Point, w,
                   single_charge: bool = False, basis=None) -> KernelStratum:
    w = as_scalar(w)
    if basis is None:
        basis = enumerate_basis(ctx, coset, w, single_charge)
    mons = basis.stratum(w)
    rows = screening_matrix(screenings, mons)
    return KernelStratum(tuple(coset), w, list(mons), kernel_basis(rows, len(mons)))


def kernel_strata(ctx: LatticeContext, screenings: Sequence[ModeOperator], coset: Point, cutoff,
                  single_charge: bool = False) -> Dict[Scalar, KernelStratum]:
    basis = enumerate_basis(ctx, coset, cutoff, single_charge)
    return {w: kernel_stratum(ctx, screenings, coset, w, single_charge, basis) for w in basis.weights()}


def triplet_generators(ctx: LatticeContext) -> Dict[str, State]:
    """omega, F = e^{-alpha}, H = Q F, E = Q^2 F with Q the long screening."""
    if ctx.minimal_mode or ctx.rank != 1:
        raise ValueError("triplet generators need a rank-one single-parameter lattice")
    q = screening_zero_mode(ctx, "long")
    f = exp_state(ctx, (Scalar(-1),))
    h = q(f)
    e = q(h)
    return {"omega": conformal_vector(ctx), "F": f, "H": h, "E": e}


def doublet_generators(ctx: LatticeContext) -> Dict[str, State]:
    """x^- = e^{-alpha/2} and x^+ = Q x^-, states of the doublet extension."""
    q = screening_zero_mode(ctx, "long")
    xm = exp_state(ctx, (Scalar(-1, 2),))
    return {"x-": xm, "x+": q(xm)}


def _g_apply(ctx: LatticeContext, beta: Point, mon: Monomial):
    out: Dict[Monomial, Scalar] = {}
    w = ctx.mono_weight(mon)
    hb = weight_of(ctx, beta)
    # e^beta_i mon vanishes once its output weight w + hb - i - 1 drops below h(gamma + beta)
    imax = w + hb - 1 - weight_of(ctx, add_points(mon[1], beta))
    i = 1
    while i <= imax:
        for m1, c1 in exp_apply(ctx, beta, i, mon):
            for m2, c2 in exp_apply(ctx, beta, -i, m1):
                s = out.get(m2, 0) + c1 * c2 / i
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        i += 1
    # witness: the first omitted term vanishes
    assert not exp_apply(ctx, beta, i, mon), "G-operator truncation witness failed"
    return tuple(out.items())


def charge_screening_G(ctx: LatticeContext) -> ModeOperator:
    """G = sum_{i>=1} e^{alpha/2}_{-i} e^{alpha/2}_i / i on a (p, 2) lattice."""
    if not ctx.minimal_mode or ctx.pprime != 2:
        raise ValueError("the charge operator G is defined for (p, p') = (p, 2)")
    beta = (Scalar(1, 2),)
    return ModeOperator(ctx, "gCharge", "G", lambda mon: _g_apply(ctx, beta, mon), 0, (Scalar(1),))


def wpp_generators(ctx: LatticeContext) -> Dict[str, State]:
    """omega, F = Q e^{-3alpha/2}, H = G F, E = G^2 F for the (p, 2) lattice."""
    if not ctx.minimal_mode or ctx.pprime != 2:
        raise ValueError("generators are implemented for p' = 2")
    q = screening_zero_mode(ctx, "q")
    g = charge_screening_G(ctx)
    f = q(exp_state(ctx, (Scalar(-3, 2),)))
    h = g(f)
    e = g(h)
    return {"omega": conformal_vector(ctx), "F": f, "H": h, "E": e}


@dataclass
class SpanResult:
    dims: List[Tuple[Scalar, int]]
    bases: Dict[Scalar, List[State]]


def strong_generation_span(ctx: LatticeContext, gens: Sequence[State], cutoff) -> SpanResult:
    """Per-weight span of u^{i1}_{-j1} ... u^{im}_{-jm} 1 (all j >= 1) up to the cutoff."""
    cutoff = as_scalar(cutoff)
    gens = [g for g in gens if g]
    gen_w = [g.weight(ctx) for g in gens]
    if any(w <= 0 for w in gen_w):
        raise ValueError("generators must have positive weight")
    vac = exp_state(ctx, ctx.zero)
    bases: Dict[Scalar, List[State]] = {Scalar(0): [vac]}
    pending = []
    seen = set()

    def push(w):
        if w <= cutoff and w not in seen:
            seen.add(w)
            heapq.heappush(pending, w)

    def push_from(w0):
        for wg in gen_w:
            j = 1
            while w0 + wg + j - 1 <= cutoff:
                push(w0 + wg + j - 1)
                j += 1

    # a weight with an empty stratum feeds nothing above it
    push_from(Scalar(0))
    while pending:
        w = heapq.heappop(pending)
        index: Dict[Monomial, int] = {}
        ech = RowEchelon()
        found: List[State] = []
        for u, wu in zip(gens, gen_w):
            j = 1
            while wu + j - 1 <= w:
                src_w = w - (wu + j - 1)
                for v in bases.get(src_w, []):
                    s = composite_mode(ctx, u, -j)(v)
                    if not s:
                        continue
                    vec = {}
                    for mon, c in s.items():
                        k = index.get(mon)
                        if k is None:
                            k = index[mon] = len(index)
                        vec[k] = c
                    if ech.add(vec):
                        found.append(s)
                j += 1
        if found:
            bases[w] = found
            push_from(w)
    dims = [(w, len(b)) for w, b in sorted(bases.items())]
    return SpanResult(dims, dict(sorted(bases.items())))
