"""Zhu products, the O(V) and C2(V) subspaces, and quotient dimensions.

Everything is computed inside a :class:`GradedAlgebra`: a vertex subalgebra
of a lattice (or Heisenberg) vertex algebra given by explicit per-weight
basis states.  Vectors are compared in the ambient Fock monomial coordinates.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import RowEchelon, Scalar, SparseVector, as_scalar, solve_affine, span_membership
from .fockspace import LatticeContext, Monomial, State, vacuum
from .screenings import kernel_strata, strong_generation_span
from .vertexops import ModeOperator, composite_mode, virasoro_mode

log = logging.getLogger(__name__)


def h_rs(p: int, r: int, s: int) -> Scalar:
    """Lowest conformal weights ((sp - r)^2 - (p - 1)^2) / (4p)."""
    return Scalar((s * p - r) ** 2 - (p - 1) ** 2, 4 * p)


def _degree(ctx: LatticeContext, a: State) -> int:
    w = a.weight(ctx)
    if w.denominator != 1:
        raise ValueError("Zhu products need integral conformal weight")
    return int(w)


def zhu_star(ctx: LatticeContext, a: State, b: State) -> State:
    """a * b = sum_j binom(deg a, j) a_{j-1} b."""
    if not a or not b:
        return State()
    d = _degree(ctx, a)
    out = State()
    for j in range(d + 1):
        out = out + composite_mode(ctx, a, j - 1)(b) * comb(d, j)
    return out


def zhu_circ(ctx: LatticeContext, a: State, b: State, n: int = 0) -> State:
    """Res_x Y(a, x) (1 + x)^{deg a} / x^{2+n} b = sum_j binom(deg a, j) a_{j-2-n} b.

    n = 0 is the bilinear a o b; every n >= 0 lands in O(V).
    """
    if not a or not b:
        return State()
    d = _degree(ctx, a)
    out = State()
    for j in range(d + 1):
        out = out + composite_mode(ctx, a, j - 2 - n)(b) * comb(d, j)
    return out


def o_zero_mode(ctx: LatticeContext, a: State) -> ModeOperator:
    """Weight-preserving mode a_{deg a - 1}."""
    return composite_mode(ctx, a, a.weight(ctx) - 1)


class MonomialIndex:
    """Grow-only coordinate system on Fock monomials."""

    def __init__(self):
        self._index: Dict[Monomial, int] = {}

    def __len__(self):
        return len(self._index)

    def vector(self, state: State) -> SparseVector:
        out = {}
        for mon, c in state.items():
            k = self._index.get(mon)
            if k is None:
                k = self._index[mon] = len(self._index)
            out[k] = c
        return out


@dataclass
class GradedAlgebra:
    """Per-weight basis states of a vertex subalgebra up to a weight cutoff."""

    ctx: LatticeContext
    cutoff: Scalar
    strata: Dict[Scalar, List[State]]
    generators: Dict[str, State] = field(default_factory=dict)
    name: str = ""

    @classmethod
    def from_generators(cls, ctx: LatticeContext, generators: Dict[str, State], cutoff, name: str = ""):
        span = strong_generation_span(ctx, list(generators.values()), cutoff)
        return cls(ctx, as_scalar(cutoff), span.bases, dict(generators), name)

    @classmethod
    def from_kernel(cls, ctx: LatticeContext, screenings, coset, cutoff, single_charge=False,
                    generators: Optional[Dict[str, State]] = None, name: str = ""):
        strata = {w: k.states() for w, k in kernel_strata(ctx, screenings, coset, cutoff, single_charge).items()}
        return cls(ctx, as_scalar(cutoff), {w: s for w, s in strata.items() if s}, dict(generators or {}), name)

    def weights(self) -> List[Scalar]:
        return sorted(self.strata)

    def basis(self, w) -> List[State]:
        return self.strata.get(as_scalar(w), [])

    def dim(self, w) -> int:
        return len(self.basis(w))

    def dims(self) -> List[Tuple[Scalar, int]]:
        return [(w, len(self.strata[w])) for w in self.weights()]

    def require(self, w):
        if as_scalar(w) > self.cutoff:
            raise ValueError(f"weight {w} is above the algebra cutoff {self.cutoff}")


# ---------------------------------------------------------------------------
# C2


def c2_spanning_states(alg: GradedAlgebra, w, method: str = "generators") -> List[State]:
    """States spanning C2(V) in weight w.

    ``pairs``: a_{-2} b over basis states with wt a + wt b + 1 = w.
    ``generators``: u_{-n} v for strong generators u, n >= 2, v a basis state;
    this spans the same space for a strongly generated algebra and is much
    cheaper.
    """
    w = as_scalar(w)
    alg.require(w)
    ctx = alg.ctx
    out = []
    if method == "pairs":
        for wa in alg.weights():
            wb = w - wa - 1
            for a in alg.basis(wa):
                for b in alg.basis(wb):
                    s = composite_mode(ctx, a, -2)(b)
                    if s:
                        out.append(s)
    elif method == "generators":
        if not alg.generators:
            raise ValueError("generator method needs the strong generators")
        for u in alg.generators.values():
            wu = u.weight(ctx)
            n = 2
            while wu + n - 1 <= w:
                for v in alg.basis(w - wu - n + 1):
                    s = composite_mode(ctx, u, -n)(v)
                    if s:
                        out.append(s)
                n += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    return out


def c2_membership(alg: GradedAlgebra, v: State, method: str = "generators"):
    """(member, coefficients) for a homogeneous v against the C2 spanning states."""
    if not v:
        return True, []
    gens = c2_spanning_states(alg, v.weight(alg.ctx), method)
    idx = MonomialIndex()
    coeffs = span_membership(idx.vector(v), [idx.vector(g) for g in gens])
    return coeffs is not None, coeffs


def c2_rank(alg: GradedAlgebra, w, method: str = "generators") -> int:
    idx = MonomialIndex()
    ech = RowEchelon()
    for s in c2_spanning_states(alg, w, method):
        ech.add(idx.vector(s))
    return ech.rank


@dataclass
class TruncationPolicy:
    weight_cutoff: Scalar = Scalar(10)
    generator_budget: Scalar = Scalar(8)
    window: int = 2

    def __post_init__(self):
        self.weight_cutoff = as_scalar(self.weight_cutoff)
        self.generator_budget = as_scalar(self.generator_budget)


@dataclass
class QuotientReport:
    policy: TruncationPolicy
    dims: List[Tuple[Scalar, int]]
    stable: bool
    total: Optional[int] = None
    constants: Dict[str, Scalar] = field(default_factory=dict)
    history: List[int] = field(default_factory=list)


def c2_quotient_dims(alg: GradedAlgebra, policy: TruncationPolicy, method: str = "generators") -> QuotientReport:
    """Per-weight dims of V/C2(V) up to cutoff + window.

    The total is reported only when it is unchanged at the cutoff and at each
    of the ``window`` following weight increments.
    """
    top = policy.weight_cutoff + policy.window
    alg.require(top)
    dims = []
    for w in alg.weights():
        if w > top:
            break
        dims.append((w, alg.dim(w) - c2_rank(alg, w, method)))
    history = []
    for k in range(policy.window + 1):
        history.append(sum(d for w, d in dims if w <= policy.weight_cutoff + k))
    stable = len(set(history)) == 1
    if not stable:
        log.warning("C2 quotient dimension did not stabilize: %s", history)
    return QuotientReport(policy, dims, stable, history[0] if stable else None, history=history)


def solve_relation_constant(target: State, unknown: State, span: Sequence[State]) -> Optional[Scalar]:
    """The unique x with target - x * unknown in span(span), or None.

    Returns None when no solution exists or it is not unique.
    """
    idx = MonomialIndex()
    t = idx.vector(target)
    u = idx.vector(unknown)
    sp = [idx.vector(s) for s in span]
    sol, free_dim = solve_affine(t, [u], sp)
    if sol is None or free_dim:
        return None
    return sol[0]


def c2_relation_constant(alg: GradedAlgebra, target: State, unknown: State, method: str = "generators"):
    w = target.weight(alg.ctx)
    return solve_relation_constant(target, unknown, c2_spanning_states(alg, w, method))


def c2_class(alg: GradedAlgebra, *states: State) -> State:
    """Representative of the product of the classes in V/C2(V): the right-nested (-1)-product."""
    out = states[-1]
    for s in reversed(states[:-1]):
        out = composite_mode(alg.ctx, s, -1)(out)
    return out


def poisson_bracket_consistent(alg: GradedAlgebra, a: State, b: State, a_shift: State, b_shift: State,
                               method: str = "generators") -> bool:
    """{a, b} = a_0 b mod C2 does not change when a, b move by C2 elements a_shift, b_shift."""
    ctx = alg.ctx
    for s in (a_shift, b_shift):
        if s and not c2_membership(alg, s, method)[0]:
            raise ValueError("shift is not in C2")
    base = composite_mode(ctx, a, 0)(b)
    moved = composite_mode(ctx, a + a_shift, 0)(b + b_shift)
    diff = moved - base
    if not diff:
        return True
    return all(c2_membership(alg, comp, method)[0] for comp in diff.components(ctx).values())


# ---------------------------------------------------------------------------
# O(V)


def ov_spanning_states(alg: GradedAlgebra, budget, method: str = "generators") -> List[State]:
    """Truncated spanning states of O(V).

    ``pairs``: a o b over basis states with deg a + deg b <= budget.
    ``generators``: Res Y(u,x)(1+x)^{deg u}/x^{2+n} b for strong generators u,
    n >= 0, deg u + deg b + n <= budget, together with (L(-1) + L(0)) b.
    Both families lie in O(V).
    """
    budget = as_scalar(budget)
    ctx = alg.ctx
    out: List[State] = []
    weights = [w for w in alg.weights() if w <= budget]
    if method == "pairs":
        for wa in weights:
            for a in alg.basis(wa):
                for wb in weights:
                    if wa + wb > budget:
                        break
                    for b in alg.basis(wb):
                        s = zhu_circ(ctx, a, b)
                        if s:
                            out.append(s)
        return out
    if method != "generators":
        raise ValueError(f"unknown method {method!r}")
    lm1, l0 = virasoro_mode(ctx, -1), virasoro_mode(ctx, 0)
    for wb in weights:
        for b in alg.basis(wb):
            s = lm1(b) + l0(b)
            if s:
                out.append(s)
    for u in alg.generators.values():
        wu = u.weight(ctx)
        for wb in weights:
            n = 0
            while wu + wb + n <= budget:
                for b in alg.basis(wb):
                    s = zhu_circ(ctx, u, b, n)
                    if s:
                        out.append(s)
                n += 1
    return out


@dataclass
class OVResult:
    member: bool
    stable: bool
    history: List[bool]
    budgets: List[Scalar]
    constant: Optional[Scalar] = None
    constants: List[Optional[Scalar]] = field(default_factory=list)


def _budgets(policy: TruncationPolicy) -> List[Scalar]:
    return [policy.generator_budget + k for k in range(policy.window + 1)]


def ov_membership(alg: GradedAlgebra, v: State, policy: TruncationPolicy, method: str = "generators") -> OVResult:
    """Membership of v in the truncated O(V) at the budget and its increments."""
    budgets = _budgets(policy)
    alg.require(budgets[-1])
    history = []
    for m in budgets:
        if not v:
            history.append(True)
            continue
        idx = MonomialIndex()
        target = idx.vector(v)
        gens = [idx.vector(s) for s in ov_spanning_states(alg, m, method)]
        history.append(span_membership(target, gens) is not None)
    return OVResult(history[-1], len(set(history)) == 1, history, budgets)


def ov_relation_constant(alg: GradedAlgebra, target: State, unknown: State, policy: TruncationPolicy,
                         method: str = "generators") -> OVResult:
    """Solve target - C * unknown in truncated O(V) for a unique C at each budget."""
    budgets = _budgets(policy)
    alg.require(budgets[-1])
    constants = []
    for m in budgets:
        constants.append(solve_relation_constant(target, unknown, ov_spanning_states(alg, m, method)))
    found = [c is not None for c in constants]
    stable = all(found) and len(set(constants)) == 1
    return OVResult(found[-1], stable, found, budgets, constants[-1] if stable else None, constants)


def singlet_relation_vectors(ctx: LatticeContext, y: State, p: int) -> Tuple[State, State]:
    """(y * y, (x - h_{p,1}) * prod_{i<p} (x - h_{i,1})^2) with x = omega, all products Zhu products."""
    from .vertexops import conformal_vector

    om = conformal_vector(ctx)
    one = vacuum(ctx)
    factors = [om - one * h_rs(p, p, 1)]
    for i in range(1, p):
        factors += [om - one * h_rs(p, i, 1)] * 2
    poly = factors[0]
    for f in factors[1:]:
        poly = _star_inhomogeneous(ctx, poly, f)
    return zhu_star(ctx, y, y), poly


def _star_inhomogeneous(ctx: LatticeContext, a: State, b: State) -> State:
    out = State()
    for comp in a.components(ctx).values():
        out = out + zhu_star(ctx, comp, b)
    return out
