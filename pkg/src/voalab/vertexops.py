"""Mode actions of Heisenberg, lattice-exponential and composite fields.

Conventions: Y(a, x) = sum_n a_n x^{-n-1}.  On a charge-gamma sector the
x-exponents of Y(e^beta, x) live in <beta, gamma> + Z; a mode whose residue
exponent does not occur acts as zero.

The Heisenberg part of a monomial is treated as a polynomial in commuting
variables t_{n,c} = alpha_c(-n).  Then alpha_c(k), k > 0, acts as
k * sum_c' <alpha_c, alpha_c'> d/dt_{k,c'}, and the annihilation half of
Y(e^beta, x) is the substitution t_{k,c} -> t_{k,c} - <beta, alpha_c> x^{-k}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exactmath import Scalar, ColoredPartition, as_scalar, rat_binom, sort_parts
from .fockspace import (
    LatticeContext,
    Monomial,
    Point,
    State,
    add_points,
    weight_of,
)

log = logging.getLogger(__name__)

Poly = Dict[ColoredPartition, Scalar]


# ---------------------------------------------------------------------------
# polynomial helpers (Heisenberg part only)


def _poly_add_into(acc: Poly, mono: ColoredPartition, c: Scalar) -> None:
    s = acc.get(mono, 0) + c
    if s:
        acc[mono] = s
    else:
        acc.pop(mono, None)


def _merge(a: ColoredPartition, b: ColoredPartition) -> ColoredPartition:
    if not a:
        return b
    if not b:
        return a
    return sort_parts(a + b)


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _poly_add_into(out, _merge(ma, mb), ca * cb)
    return out


def _multiplicities(parts: ColoredPartition) -> Dict[Tuple[int, int], int]:
    out: Dict[Tuple[int, int], int] = {}
    for pc in parts:
        out[pc] = out.get(pc, 0) + 1
    return out


def _remove_one(parts: ColoredPartition, pc) -> ColoredPartition:
    i = parts.index(pc)
    return parts[:i] + parts[i + 1:]


def _heis_annihilate(ctx: LatticeContext, c: int, k: int, poly: Poly) -> Poly:
    """alpha_c(k), k > 0, acting as a derivation on the polynomial."""
    out: Poly = {}
    for mono, coef in poly.items():
        for (n, c2), mult in _multiplicities(mono).items():
            if n != k:
                continue
            g = ctx.form[c][c2]
            if g:
                _poly_add_into(out, _remove_one(mono, (n, c2)), coef * k * g * mult)
    return out


def _substitute(ctx: LatticeContext, beta: Point, parts: ColoredPartition):
    """Expand prod (t_{k,c} - <beta,alpha_c> x^{-k}) over the parts.

    Yields (x-power, remaining parts, coefficient) with the x-power <= 0.
    """
    groups = list(_multiplicities(parts).items())
    shifts = [-ctx.pair_color(beta, c) for (k, c), _ in groups]
    choices = []
    for ((k, c), r), s in zip(groups, shifts):
        opts = []
        for q in range(r + 1):
            if q and s == 0:
                break
            opts.append((q, rat_binom(Scalar(r), q) * s ** q))
        choices.append(opts)
    for combo in product(*choices):
        coef = Scalar(1)
        power = 0
        rest = []
        for ((k, c), r), (q, f) in zip(groups, combo):
            coef *= f
            power -= k * q
            rest.extend([(k, c)] * (r - q))
        yield power, sort_parts(rest), coef


@lru_cache(maxsize=None)
def _exp_creation(ctx: LatticeContext, beta: Point, d: int) -> Tuple[Tuple[ColoredPartition, Scalar], ...]:
    """Coefficient of x^d in exp(sum_k beta(-k) x^k / k) as a polynomial."""
    if d < 0:
        return ()
    if d == 0:
        return (((), Scalar(1)),)
    acc: Poly = {}
    for k in range(1, d + 1):
        prev = _exp_creation(ctx, beta, d - k)
        if not prev:
            continue
        for c in range(ctx.rank):
            y = beta[c]
            if not y:
                continue
            for mono, coef in prev:
                _poly_add_into(acc, _merge(((k, c),), mono), coef * y / d)
    return tuple(sorted(acc.items()))


@lru_cache(maxsize=None)
def _creation_series(ctx: LatticeContext, beta: Point, cparts: ColoredPartition, d: int):
    """Coefficient of x^d in prod_{(n,c) in cparts} C_{n,c}(x) * E^-(beta, x).

    C_{n,c}(x) = sum_{k>=n} binom(k-1, n-1) t_{k,c} x^{k-n} is the creation
    half of the (n-1)-th divided derivative of alpha_c(x).
    """
    if d < 0:
        return ()
    if not cparts:
        return _exp_creation(ctx, beta, d)
    (n, c), rest = cparts[0], cparts[1:]
    acc: Poly = {}
    for j in range(0, d + 1):
        k = j + n
        coef = rat_binom(Scalar(k - 1), n - 1)
        if not coef:
            continue
        for mono, cc in _creation_series(ctx, beta, rest, d - j):
            _poly_add_into(acc, _merge(((k, c),), mono), coef * cc)
    return tuple(sorted(acc.items()))


def _annihilation_series(ctx: LatticeContext, aparts: ColoredPartition, gamma: Point, poly: Poly):
    """Apply prod D_{n,c}(x) to the polynomial on a charge-gamma sector.

    D_{n,c}(x) = sum_{k>=0} binom(-k-1, n-1) alpha_c(k) x^{-k-n}.
    Returns {x-power: poly}.
    """
    series = {0: poly}
    for (n, c) in aparts:
        new: Dict[int, Poly] = {}
        h0 = ctx.pair_color(gamma, c)
        for power, pl in series.items():
            ks = {0} | {k for mono in pl for (k, c2) in mono}
            for k in sorted(ks):
                coef = rat_binom(Scalar(-k - 1), n - 1)
                if not coef:
                    continue
                if k == 0:
                    if not h0:
                        continue
                    res = {m: x * h0 for m, x in pl.items()}
                else:
                    res = _heis_annihilate(ctx, c, k, pl)
                if not res:
                    continue
                tgt = new.setdefault(power - k - n, {})
                for m, x in res.items():
                    _poly_add_into(tgt, m, x * coef)
        series = {k: v for k, v in new.items() if v}
        if not series:
            break
    return series


@lru_cache(maxsize=1 << 20)
def apply_vertex_monomial(ctx: LatticeContext, vmon: Monomial, m: Scalar, smon: Monomial):
    """(vmon)_m smon via the normal-ordered generating function.

    Y(h_1(-n_1)...h_k(-n_k)e^beta, x)
        = :prod_i d^{(n_i-1)} h_i(x) * E^-(-beta,x) E^+(-beta,x) e_beta x^{beta(0)}:
    with all annihilation modes (including alpha(0)) to the right of e_beta.
    Returns a tuple of (monomial, coefficient).
    """
    vparts, beta = vmon
    sparts, gamma = smon
    target = -m - 1
    e0 = ctx.pair(beta, gamma)
    base = target - e0
    if base.denominator != 1:
        return ()
    base = int(base)
    groups = list(_multiplicities(vparts).items())
    out: Poly = {}
    start: Poly = {sparts: Scalar(1)}
    for split in product(*[range(r + 1) for _, r in groups]):
        weight = Scalar(1)
        cparts: List = []
        aparts: List = []
        for ((n, c), r), s in zip(groups, split):
            weight *= rat_binom(Scalar(r), s)
            cparts.extend([(n, c)] * s)
            aparts.extend([(n, c)] * (r - s))
        cparts_t = sort_parts(cparts)
        ann = _annihilation_series(ctx, tuple(aparts), gamma, start) if aparts else {0: start}
        for power, pl in ann.items():
            for mono, coef in pl.items():
                for p2, rest, c2 in _substitute(ctx, beta, mono):
                    d = base - power - p2
                    if d < 0:
                        continue
                    for cm, cc in _creation_series(ctx, beta, cparts_t, d):
                        _poly_add_into(out, _merge(cm, rest), weight * coef * c2 * cc)
    if not out:
        return ()
    eps = ctx.cocycle(beta, gamma)
    newpt = add_points(beta, gamma)
    return tuple(((mono, newpt), c * eps) for mono, c in sorted(out.items()))


# ---------------------------------------------------------------------------
# primitive mode actions


def heis_apply(ctx: LatticeContext, c: int, n: int, smon: Monomial):
    """alpha_c(n) on a monomial."""
    sparts, gamma = smon
    if n < 0:
        return ((sort_parts(sparts + ((-n, c),)), gamma), Scalar(1)),
    if n == 0:
        h0 = ctx.pair_color(gamma, c)
        return ((smon, h0),) if h0 else ()
    res = _heis_annihilate(ctx, c, n, {sparts: Scalar(1)})
    return tuple(((mono, gamma), x) for mono, x in sorted(res.items()))


def exp_apply(ctx: LatticeContext, beta: Point, n: Scalar, smon: Monomial):
    """e^beta_n on a monomial (zero when the residue exponent is absent)."""
    return apply_vertex_monomial(ctx, ((), tuple(beta)), as_scalar(n), smon)


def exp_mode_annihilation_bound(ctx: LatticeContext, beta: Point, smon: Monomial) -> Scalar:
    """Largest n with e^beta_n smon possibly nonzero: wt(s) - h(beta+gamma) + h(beta) - 1.

    The output weight is wt(s) + h(beta) - n - 1, which must reach the lowest
    weight h(beta + gamma) of the target charge sector.
    """
    gamma = smon[1]
    return ctx.mono_weight(smon) - weight_of(ctx, add_points(beta, gamma)) + weight_of(ctx, beta) - 1


def virasoro_apply(ctx: LatticeContext, n: int, smon: Monomial):
    """L(n) on a monomial via the quadratic Heisenberg formula plus the b-term.

    L(n) = 1/2 sum_{i,j} G^{ij} sum_k :alpha_i(k) alpha_j(n-k): - (n+1) b(n).
    """
    sparts, gamma = smon
    ginv = ctx.form_inv
    rk = ctx.rank
    out: Dict[Monomial, Scalar] = {}

    def acc(res, f):
        for mono, x in res:
            s = out.get(mono, 0) + x * f
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)

    def chain(i, k, j, l):
        # :alpha_i(k) alpha_j(l): on smon; annihilators act first
        if k < 0 and l < 0:
            first = heis_apply(ctx, j, l, smon)
            res: Dict[Monomial, Scalar] = {}
            for m1, c1 in first:
                for m2, c2 in heis_apply(ctx, i, k, m1):
                    res[m2] = res.get(m2, 0) + c1 * c2
            return res.items()
        if k >= 0 and l < 0:
            i, k, j, l = j, l, i, k
        # now l >= 0 is applied first
        res = {}
        for m1, c1 in heis_apply(ctx, j, l, smon):
            for m2, c2 in heis_apply(ctx, i, k, m1):
                res[m2] = res.get(m2, 0) + c1 * c2
        return res.items()

    part_sizes = {k for k, _ in sparts}
    ks = set()
    if n < 0:
        ks.update(range(n + 1, 0))
    ks.update(a for a in part_sizes | {0})
    ks.update(n - a for a in part_sizes | {0})
    for k in sorted(ks):
        l = n - k
        if k >= 0 and l >= 0 and not ((k == 0 or k in part_sizes) and (l == 0 or l in part_sizes)):
            continue
        if k < 0 and l >= 0 and not (l == 0 or l in part_sizes):
            continue
        if l < 0 and k >= 0 and not (k == 0 or k in part_sizes):
            continue
        for i in range(rk):
            for j in range(rk):
                g = ginv[i][j]
                if g:
                    acc(chain(i, k, j, l), g / 2)
    for c in range(rk):
        bc = ctx.b[c]
        if bc:
            acc(heis_apply(ctx, c, n, smon), -(n + 1) * bc)
    return tuple(sorted(out.items(), key=lambda kv: repr(kv[0])))


# ---------------------------------------------------------------------------
# operators


class ModeOperator:
    """Linear map on states with declared weight and charge shifts.

    ``fn`` maps a monomial to an iterable of (monomial, coefficient).  Results
    are memoized per operator instance.
    """

    def __init__(self, ctx: LatticeContext, kind: str, label: str, fn: Callable,
                 weight_shift: Optional[Scalar], charge_shift: Optional[Point]):
        self.ctx = ctx
        self.kind = kind
        self.label = label
        self._fn = fn
        self.weight_shift = None if weight_shift is None else as_scalar(weight_shift)
        self.charge_shift = charge_shift
        self._memo: Dict[Monomial, Tuple] = {}

    def __repr__(self):
        return f"<{self.kind} {self.label}>"

    def apply_monomial(self, mon: Monomial):
        try:
            return self._memo[mon]
        except KeyError:
            res = tuple(self._fn(mon))
            self._memo[mon] = res
            return res

    def __call__(self, state: State) -> State:
        out: Dict[Monomial, Scalar] = {}
        for mon, c in state.items():
            for m2, c2 in self.apply_monomial(mon):
                s = out.get(m2, 0) + c * c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        return State._trusted(out)

    # algebra of operators
    def __add__(self, other: "ModeOperator") -> "ModeOperator":
        return _linear([(1, self), (1, other)])

    def __sub__(self, other: "ModeOperator") -> "ModeOperator":
        return _linear([(1, self), (-1, other)])

    def __neg__(self) -> "ModeOperator":
        return _linear([(-1, self)])

    def __mul__(self, scalar) -> "ModeOperator":
        return _linear([(as_scalar(scalar), self)])

    __rmul__ = __mul__

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        ws = None if self.weight_shift is None or other.weight_shift is None else self.weight_shift + other.weight_shift
        cs = None if self.charge_shift is None or other.charge_shift is None else add_points(self.charge_shift, other.charge_shift)

        def fn(mon):
            return other_then(self, other, mon)

        return ModeOperator(self.ctx, "product", f"{self.label}*{other.label}", fn, ws, cs)


def other_then(a: ModeOperator, b: ModeOperator, mon: Monomial):
    out: Dict[Monomial, Scalar] = {}
    for m1, c1 in b.apply_monomial(mon):
        for m2, c2 in a.apply_monomial(m1):
            s = out.get(m2, 0) + c1 * c2
            if s:
                out[m2] = s
            else:
                out.pop(m2, None)
    return tuple(out.items())


def _linear(terms: Sequence[Tuple[Scalar, ModeOperator]]) -> ModeOperator:
    terms = [(as_scalar(c), op) for c, op in terms]
    ctx = terms[0][1].ctx
    wss = {op.weight_shift for _, op in terms}
    css = {op.charge_shift for _, op in terms}
    ws = wss.pop() if len(wss) == 1 else None
    cs = css.pop() if len(css) == 1 else None
    label = " + ".join(f"({c}){op.label}" for c, op in terms)

    def fn(mon):
        out: Dict[Monomial, Scalar] = {}
        for c, op in terms:
            if not c:
                continue
            for m2, c2 in op.apply_monomial(mon):
                s = out.get(m2, 0) + c * c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        return tuple(out.items())

    return ModeOperator(ctx, "linear", label, fn, ws, cs)


def identity(ctx: LatticeContext) -> ModeOperator:
    return ModeOperator(ctx, "identity", "1", lambda mon: ((mon, Scalar(1)),), 0, ctx.zero)


def zero_operator(ctx: LatticeContext) -> ModeOperator:
    return ModeOperator(ctx, "zero", "0", lambda mon: (), None, None)


def commutator(a: ModeOperator, b: ModeOperator) -> ModeOperator:
    return (a @ b) - (b @ a)


def heis_mode(ctx: LatticeContext, color: int, n: int) -> ModeOperator:
    return ModeOperator(ctx, "heisenberg", f"a{color + 1}({n})",
                        lambda mon: heis_apply(ctx, color, n, mon), -n, ctx.zero)


def exp_mode(ctx: LatticeContext, beta: Point, n) -> ModeOperator:
    beta = tuple(as_scalar(x) for x in beta)
    n = as_scalar(n)

    def fn(mon):
        res = exp_apply(ctx, beta, n, mon)
        if res and n > exp_mode_annihilation_bound(ctx, beta, mon):
            raise AssertionError("exp mode produced output beyond its annihilation bound")
        return res

    return ModeOperator(ctx, "latticeExp", f"e^{list(map(str, beta))}_{n}", fn,
                        weight_of(ctx, beta) - n - 1, beta)


def composite_mode(ctx: LatticeContext, v: State, m) -> ModeOperator:
    """The mode v_m of an arbitrary (finite) state v, by linearity over its monomials."""
    m = as_scalar(m)
    items = list(v.items())
    ws = v.weights(ctx)
    cs = v.charges()
    wshift = (next(iter(ws)) - m - 1) if len(ws) == 1 else None
    cshift = next(iter(cs)) if len(cs) == 1 else None

    def fn(mon):
        out: Dict[Monomial, Scalar] = {}
        for vm, vc in items:
            for m2, c2 in apply_vertex_monomial(ctx, vm, m, mon):
                s = out.get(m2, 0) + vc * c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        return tuple(out.items())

    return ModeOperator(ctx, "composite", f"({v.format()})_{m}" if len(items) < 4 else f"v_{m}", fn, wshift, cshift)


def conformal_vector(ctx: LatticeContext) -> State:
    """omega = omega_st + b(-2)1 with omega_st = 1/2 sum G^{ij} alpha_i(-1)alpha_j(-1)1."""
    terms: Dict[Monomial, Scalar] = {}
    zero = ctx.zero
    for i in range(ctx.rank):
        for j in range(ctx.rank):
            g = ctx.form_inv[i][j]
            if g:
                mono = (sort_parts(((1, i), (1, j))), zero)
                terms[mono] = terms.get(mono, 0) + g / 2
    for c in range(ctx.rank):
        if ctx.b[c]:
            mono = (((2, c),), zero)
            terms[mono] = terms.get(mono, 0) + ctx.b[c]
    return State(terms)


def virasoro_mode(ctx: LatticeContext, n: int) -> ModeOperator:
    """L(n); equal to composite_mode(omega, n+1) (checked in the test-suite)."""
    return ModeOperator(ctx, "virasoro", f"L({n})", lambda mon: virasoro_apply(ctx, n, mon), -n, ctx.zero)


# ---------------------------------------------------------------------------
# independent oracle: Borcherds iterate recursion


def iterate_apply(ctx: LatticeContext, vmon: Monomial, m: Scalar, smon: Monomial) -> Dict[Monomial, Scalar]:
    """(vmon)_m smon by peeling one Heisenberg factor at a time.

    (h(-n) b)_m = sum_{i>=0} (-1)^i binom(-n, i) [h(-n-i) b_{m+i} - (-1)^n b_{m-n-i} h(i)]
    with pure exponentials handled by :func:`exp_apply`.
    """
    m = as_scalar(m)
    vparts, beta = vmon
    if not vparts:
        return dict(exp_apply(ctx, beta, m, smon))
    (n, c), rest = vparts[0], vparts[1:]
    bmon = (rest, beta)
    wb = ctx.mono_weight(bmon)
    out: Dict[Monomial, Scalar] = {}

    def add(mon, x):
        s = out.get(mon, 0) + x
        if s:
            out[mon] = s
        else:
            out.pop(mon, None)

    ws = ctx.mono_weight(smon)
    hmin = weight_of(ctx, add_points(beta, smon[1]))
    imax = ws + wb - 1 - m - hmin
    i = 0
    while i <= imax:
        coef = (-1) ** i * rat_binom(Scalar(-n), i)
        for m1, c1 in iterate_apply(ctx, bmon, m + i, smon).items():
            for m2, c2 in heis_apply(ctx, c, -n - i, m1):
                add(m2, coef * c1 * c2)
        i += 1
    sign = (-1) ** n
    max_part = max([k for k, _ in smon[0]], default=0)
    for i in range(0, max_part + 1):
        coef = (-1) ** i * rat_binom(Scalar(-n), i)
        for m1, c1 in heis_apply(ctx, c, i, smon):
            for m2, c2 in iterate_apply(ctx, bmon, m - n - i, m1).items():
                add(m2, -sign * coef * c1 * c2)
    return out


def iterate_mode(ctx: LatticeContext, v: State, m) -> ModeOperator:
    m = as_scalar(m)
    items = list(v.items())

    def fn(mon):
        out: Dict[Monomial, Scalar] = {}
        for vm, vc in items:
            for m2, c2 in iterate_apply(ctx, vm, m, mon).items():
                s = out.get(m2, 0) + vc * c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
        return tuple(out.items())

    ws = v.weights(ctx)
    return ModeOperator(ctx, "iterate", f"iter_{m}", fn,
                        (next(iter(ws)) - m - 1) if len(ws) == 1 else None,
                        next(iter(v.charges())) if len(v.charges()) == 1 else None)


# ---------------------------------------------------------------------------
# identity drivers


@dataclass
class CheckResult:
    """Outcome of an exact operator identity check over a list of test states."""

    name: str
    passed: bool
    checked: int = 0
    counterexample: Optional[dict] = None


def _first_failure(lhs: ModeOperator, tests: Sequence[State]):
    for t in tests:
        r = lhs(t)
        if r:
            return t, r
    return None


def bracket_check(a: ModeOperator, b: ModeOperator, expected: Optional[ModeOperator],
                  tests: Sequence[State], name: str = "") -> CheckResult:
    """Assert (ab - ba - expected) t = 0 for every test state."""
    lhs = commutator(a, b)
    if expected is not None:
        lhs = lhs - expected
    bad = _first_failure(lhs, tests)
    name = name or f"[{a.label}, {b.label}]"
    if bad is None:
        return CheckResult(name, True, len(tests))
    t, r = bad
    return CheckResult(name, False, len(tests), {"state": t.format(), "residual": r.format()})


def locality_order_check(a_modes: Callable[[int], ModeOperator], b_modes: Callable[[int], ModeOperator],
                         order: int, m_range: Iterable[int], n_range: Iterable[int],
                         tests: Sequence[State], name: str = "locality") -> CheckResult:
    """sum_k (-1)^k binom(N, k) [a_{m+N-k}, b_{n+k}] t = 0 over the index ranges.

    This is the mode form of (z1 - z2)^N [a(z1), b(z2)] = 0.
    """
    n_range = list(n_range)
    checked = 0
    for m in m_range:
        for n in n_range:
            terms = [((-1) ** k * comb(order, k), commutator(a_modes(m + order - k), b_modes(n + k)))
                     for k in range(order + 1)]
            bad = _first_failure(_linear(terms), tests)
            checked += len(tests)
            if bad is not None:
                t, r = bad
                return CheckResult(name, False, checked,
                                   {"m": m, "n": n, "state": t.format(), "residual": r.format()})
    return CheckResult(name, True, checked)


def shift_check(op: ModeOperator, tests: Sequence[State], ctx: LatticeContext) -> CheckResult:
    """The declared weight and charge shifts agree with the measured ones."""
    for t in tests:
        r = op(t)
        if not r:
            continue
        ws = {w - t.weight(ctx) for w in r.weights(ctx)}
        cs = {tuple(x - y for x, y in zip(g, next(iter(t.charges())))) for g in r.charges()}
        if ws != {op.weight_shift} or cs != {tuple(op.charge_shift)}:
            return CheckResult(f"shifts of {op.label}", False, len(tests),
                               {"state": t.format(), "weight_shifts": sorted(map(str, ws))})
    return CheckResult(f"shifts of {op.label}", True, len(tests))
