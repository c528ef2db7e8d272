"""Second-power screening fields, their modules, and logarithmic deformations.

Notation used below, rank one with <alpha, alpha> = 2p:

* ``a = e^{-alpha/p}`` (weight one) and ``ahat = e^{alpha - alpha/p}`` (weight zero);
* the pair-screening field G(z) = sum_n G(n) z^{-n-1} is built from two
  ``a`` currents with the hypergeometric weights returned by
  :func:`phi_coefficients`; its partner Gbar(z) replaces one factor by ``ahat``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exactmath import Scalar, as_scalar, kernel_basis, rat_binom
from .fockspace import (
    GradedBasis,
    LatticeContext,
    Monomial,
    Point,
    State,
    add_points,
    enumerate_basis,
    format_monomial,
    weight_of,
)
from .vertexops import (
    ModeOperator,
    _linear,
    composite_mode,
    exp_apply,
    exp_mode_annihilation_bound,
    virasoro_mode,
)

log = logging.getLogger(__name__)

TAIL_WITNESS = 3


def phi_coefficients(p: int, jmax: int) -> List[Scalar]:
    """c_j = (-1)^j / (j + 1/p) * binom(-2/p, j) for j = 0..jmax."""
    if p < 2:
        raise ValueError("p must be at least 2")
    return [(-1) ** j / (j + Scalar(1, p)) * rat_binom(Scalar(-2, p), j) for j in range(jmax + 1)]


def _check_context(ctx: LatticeContext):
    if ctx.minimal_mode or ctx.rank != 1:
        raise ValueError("pair-screening fields need a rank-one single-parameter lattice")


def _compatible(ctx: LatticeContext, beta: Point, n: Scalar, gamma: Point) -> bool:
    return (n + ctx.pair(beta, gamma)).denominator == 1


class _PairField:
    """Modes sum_j c_j (x_{-1/p-j+n} a_{1/p+j} + a_{-1/p-j} x_{1/p+j+n}) with x = a or ahat."""

    def __init__(self, ctx: LatticeContext, left: Point):
        _check_context(ctx)
        self.ctx = ctx
        self.a = (Scalar(-1, ctx.p),)
        self.left = left
        self.inv_p = Scalar(1, ctx.p)
        self._coeffs: List[Scalar] = []
        self._warned = set()

    def coeff(self, j: int) -> Scalar:
        while len(self._coeffs) <= j:
            self._coeffs = phi_coefficients(self.ctx.p, 2 * len(self._coeffs) + 8)
        return self._coeffs[j]

    def _pair_term(self, outer: Point, n_out: Scalar, inner: Point, n_in: Scalar, mon: Monomial):
        out: Dict[Monomial, Scalar] = {}
        for m1, c1 in exp_apply(self.ctx, inner, n_in, mon):
            for m2, c2 in exp_apply(self.ctx, outer, n_out, m1):
                out[m2] = out.get(m2, 0) + c1 * c2
        return out

    def apply(self, n: int, mon: Monomial):
        ctx, a, x, ip = self.ctx, self.a, self.left, self.inv_p
        gamma = mon[1]
        if not _compatible(ctx, a, ip, gamma):
            if gamma not in self._warned:
                self._warned.add(gamma)
                log.warning("pair-screening mode is incompatible with charge %s; acting as zero", gamma)
            return ()
        bound_a = exp_mode_annihilation_bound(ctx, a, mon)
        bound_x = exp_mode_annihilation_bound(ctx, x, mon)
        # the right factor of each term must stay at or below its annihilation bound
        jmax = max(bound_a - ip, bound_x - ip - n)
        out: Dict[Monomial, Scalar] = {}
        j = 0
        while j <= jmax:
            c = self.coeff(j)
            for m2, v in self._pair_term(x, -ip - j + n, a, ip + j, mon).items():
                out[m2] = out.get(m2, 0) + c * v
            for m2, v in self._pair_term(a, -ip - j, x, ip + j + n, mon).items():
                out[m2] = out.get(m2, 0) + c * v
            j += 1
        for k in range(j, j + TAIL_WITNESS):
            if exp_apply(ctx, a, ip + k, mon) or exp_apply(ctx, x, ip + k + n, mon):
                raise AssertionError(f"pair-screening truncation witness failed at j={k} on {format_monomial(mon)}")
        return tuple((m, c) for m, c in out.items() if c)


def second_screening_mode(ctx: LatticeContext, n: int) -> ModeOperator:
    """G(n): weight shift -n, charge shift -2 alpha / p."""
    fld = _PairField(ctx, (Scalar(-1, ctx.p),))
    return ModeOperator(ctx, "gMode", f"G({n})", lambda mon: fld.apply(n, mon), -n, (Scalar(-2, ctx.p),))


def partner_screening_mode(ctx: LatticeContext, n: int) -> ModeOperator:
    """Gbar(n): as G(n) with one a replaced by ahat; weight shift -n-1, charge shift alpha - 2 alpha / p."""
    fld = _PairField(ctx, (1 - Scalar(1, ctx.p),))
    return ModeOperator(ctx, "gbarMode", f"Gbar({n})", lambda mon: fld.apply(n, mon), -n - 1,
                        (1 - Scalar(2, ctx.p),))


def mu(p: int) -> Scalar:
    return Scalar(p, p - 1)


class ModeFamily:
    """Memoizing n -> ModeOperator factory."""

    def __init__(self, make: Callable[[int], ModeOperator]):
        self._make = make
        self._cache: Dict[int, ModeOperator] = {}

    def __call__(self, n: int) -> ModeOperator:
        op = self._cache.get(n)
        if op is None:
            op = self._cache[n] = self._make(n)
        return op


# ---------------------------------------------------------------------------
# M_2 modules


@dataclass
class M2Module:
    """Direct sum of lattice-coset modules on which the pair-screening modes act.

    Summands whose cosets agree modulo the lattice are merged (this happens
    for p = 2, where both summands of each sign are the same coset).
    """

    ctx: LatticeContext
    sign: str
    cosets: List[Point]
    summands: List[GradedBasis]
    cutoff: Scalar

    def weights(self) -> List[Scalar]:
        return sorted({w for b in self.summands for w in b.weights()})

    def stratum(self, w) -> List[Monomial]:
        out = []
        for b in self.summands:
            out.extend(b.stratum(w))
        return out

    @property
    def min_weight(self) -> Scalar:
        return min(b.min_weight() for b in self.summands if b.min_weight() is not None)

    def test_states(self, levels: int) -> List[State]:
        top = self.min_weight + levels
        return [State({m: 1}) for w in self.weights() if w <= top for m in self.stratum(w)]


def _reduce_coset(gamma: Point) -> Point:
    return tuple(x - (x.numerator // x.denominator) for x in gamma)


def build_M2(ctx: LatticeContext, sign: str, cutoff) -> M2Module:
    _check_context(ctx)
    p = ctx.p
    if sign == "+":
        raw = [Scalar(p + 1, 2 * p), Scalar(p - 3, 2 * p)]
    elif sign == "-":
        raw = [Scalar(1, 2 * p), Scalar(-3, 2 * p)]
    else:
        raise ValueError("sign must be '+' or '-'")
    cosets: List[Point] = []
    for x in raw:
        if _reduce_coset((x,)) not in {_reduce_coset(c) for c in cosets}:
            cosets.append((x,))
    cutoff = as_scalar(cutoff)
    return M2Module(ctx, sign, cosets, [enumerate_basis(ctx, c, cutoff) for c in cosets], cutoff)


# ---------------------------------------------------------------------------
# Jordan structure


@dataclass
class JordanReport:
    operator: str
    weight: Scalar
    eigenvalue: Scalar
    rank: int
    kernel_dims: List[int] = field(default_factory=list)


def stratum_matrix(op: ModeOperator, monomials: Sequence[Monomial]) -> List[Dict[int, Scalar]]:
    """Rows of the matrix of op restricted to a stratum it preserves (column j = image of monomial j)."""
    index = {m: i for i, m in enumerate(monomials)}
    rows: List[Dict[int, Scalar]] = [dict() for _ in monomials]
    for j, mon in enumerate(monomials):
        for img, c in op.apply_monomial(mon):
            i = index.get(img)
            if i is None:
                raise ValueError(f"{op.label} leaves the stratum: {format_monomial(img)}")
            rows[i][j] = c
    return rows


def _mat_mul(a: List[Dict[int, Scalar]], b: List[Dict[int, Scalar]]) -> List[Dict[int, Scalar]]:
    out = []
    for row in a:
        acc: Dict[int, Scalar] = {}
        for k, x in row.items():
            for j, y in b[k].items():
                s = acc.get(j, 0) + x * y
                if s:
                    acc[j] = s
                else:
                    acc.pop(j, None)
        out.append(acc)
    return out


def nilpotent_rank(op: ModeOperator, monomials: Sequence[Monomial], h, weight=None) -> JordanReport:
    """Size of the largest Jordan block of op at eigenvalue h on the stratum (0 if h is not an eigenvalue)."""
    h = as_scalar(h)
    dim = len(monomials)
    m = stratum_matrix(op, monomials)
    shifted = [dict(r) for r in m]
    for i in range(dim):
        s = shifted[i].get(i, 0) - h
        if s:
            shifted[i][i] = s
        else:
            shifted[i].pop(i, None)
    kdims = [0]
    power = shifted
    while True:
        kdims.append(len(kernel_basis(power, dim)))
        if kdims[-1] == kdims[-2] or kdims[-1] == dim:
            break
        power = _mat_mul(power, shifted)
    rank = len(kdims) - 2 if kdims[-1] == kdims[-2] else len(kdims) - 1
    return JordanReport(op.label, as_scalar(weight) if weight is not None else None, h, rank, kdims[1:])


# ---------------------------------------------------------------------------
# deformations


def delta_apply(ctx: LatticeContext, v: State, a: State) -> Dict[int, State]:
    """exp(sum_{n>=1} v_n / (-n) (-x)^{-n}) a as {k: coefficient of x^{-k}}.

    Requires v of weight one and v_0 a = 0, so x^{v_0} acts trivially.
    """
    if v.weight(ctx) != 1:
        raise ValueError("deforming vector must have weight one")
    if composite_mode(ctx, v, 0)(a):
        raise ValueError("v_0 a != 0; the deformation is only defined on Ker v_0")
    charges = v.charges()
    modes: Dict[int, ModeOperator] = {}

    def mode(n):
        if n not in modes:
            modes[n] = composite_mode(ctx, v, n)
        return modes[n]

    def top_mode(s: State) -> int:
        # v_n kills a monomial once wt - n drops below the lowest weight of the target charge
        return max(int(ctx.mono_weight(mon) - weight_of(ctx, add_points(mon[1], beta)))
                   for mon, _ in s.items() for beta in charges)

    result: Dict[int, State] = {0: a}
    layer: Dict[int, State] = {0: a}
    k = 1
    while layer:
        nxt: Dict[int, State] = {}
        for power, s in layer.items():
            for n in range(1, top_mode(s) + 1):
                t = mode(n)(s)
                if t:
                    # coefficient of x^{-n} in the exponent is (-1)^{n+1} v_n / n
                    nxt[power + n] = nxt.get(power + n, State()) + t * Scalar((-1) ** (n + 1), n * k)
        layer = {pw: s for pw, s in nxt.items() if s}
        for pw, s in layer.items():
            result[pw] = result.get(pw, State()) + s
        k += 1
    return {pw: s for pw, s in sorted(result.items()) if s}


def deformed_mode(ctx: LatticeContext, v: State, a: State, m) -> ModeOperator:
    """Mode m of Y(Delta(v, x) a, x): sum_k (d_k)_{m-k} with Delta(v, x) a = sum_k d_k x^{-k}."""
    m = as_scalar(m)
    terms = [(1, composite_mode(ctx, d, m - k)) for k, d in delta_apply(ctx, v, a).items()]
    return _linear(terms)


@dataclass
class DeformedModule:
    """A module with the deformed action; the underlying graded space is unchanged."""

    ctx: LatticeContext
    deforming: str
    basis: Sequence[GradedBasis]
    virasoro: ModeFamily

    def dims(self) -> List[Tuple[Scalar, int]]:
        acc: Dict[Scalar, int] = {}
        for b in self.basis:
            for w, d in b.dims():
                acc[w] = acc.get(w, 0) + d
        return sorted(acc.items())


def deformed_module(ctx: LatticeContext, basis: Sequence[GradedBasis], v: State) -> DeformedModule:
    """Deformation by a weight-one vector v with v_0 omega = 0: L~(n) = L(n) + v_n."""
    from .vertexops import conformal_vector

    om = conformal_vector(ctx)
    if composite_mode(ctx, v, 0)(om):
        raise ValueError("v_0 omega != 0")
    fam = ModeFamily(lambda n: virasoro_mode(ctx, n) + composite_mode(ctx, v, n))
    return DeformedModule(ctx, v.format(), list(basis), fam)


def deformed_field_module(module: M2Module) -> DeformedModule:
    """L~(n) = L(n) + G(n) on an M_2 module."""
    ctx = module.ctx
    g = ModeFamily(lambda n: second_screening_mode(ctx, n))
    fam = ModeFamily(lambda n: virasoro_mode(ctx, n) + g(n))
    return DeformedModule(ctx, "G", module.summands, fam)


def field_nth_product(a_modes: Callable[[int], ModeOperator], b_modes: Callable[[int], ModeOperator],
                      n: int, m: int, order: Optional[int]) -> ModeOperator:
    """Mode m of the field a(z)_n b(z) for mutually local fields.

    (a_n b)_m = sum_{i=0}^{n} (-1)^i binom(n, i) (a_{n-i} b_{m+i} - (-1)^n b_{n+m-i} a_i),
    where a_k, b_k are the coefficients of z^{-k-1}.  Products with n >= order
    vanish by locality.
    """
    if order is None:
        raise ValueError("locality order of the pair must be known")
    if n < 0:
        raise ValueError("only non-negative n-products are supported")
    if n >= order:
        ref = a_modes(0)
        return ModeOperator(ref.ctx, "zero", "0", lambda mon: (), None, None)
    terms = []
    sign = (-1) ** n
    for i in range(n + 1):
        c = (-1) ** i * comb(n, i)
        terms.append((c, a_modes(n - i) @ b_modes(m + i)))
        terms.append((-sign * c, b_modes(n + m - i) @ a_modes(i)))
    return _linear(terms)


def deformed_generator_mode(ctx: LatticeContext, v: State, m: int, g_modes: Callable[[int], ModeOperator],
                            order: int) -> ModeOperator:
    """Mode m of Y~(v, z) = Y(v, z) + sum_{n>=1} (G(z)_n Y(v, z)) / (-n) (-z)^{-n}."""
    vm = ModeFamily(lambda k: composite_mode(ctx, v, k))
    terms = [(1, vm(m))]
    for n in range(1, order):
        terms.append((Scalar((-1) ** (n + 1), n), field_nth_product(g_modes, vm, n, m - n, order)))
    return _linear(terms)
