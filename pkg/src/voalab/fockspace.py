"""Lattice data, Fock monomials, states and graded basis enumeration.

A lattice point is a tuple of exact rationals giving coordinates in the basis
alpha_1..alpha_l of L (rank one: ``(x,)`` means x*alpha).  Heisenberg modes
are colored by the same basis, so the part ``(n, c)`` stands for
alpha_c(-n).  A Fock monomial is the pair ``(parts, point)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from math import floor, ceil, gcd, isqrt
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .exactmath import Scalar, ColoredPartition, as_scalar, colored_partitions, partition_total, sort_parts

log = logging.getLogger(__name__)

Point = Tuple[Scalar, ...]
Monomial = Tuple[ColoredPartition, Point]

A1_GRAM = ((2,),)


def _inverse(mat: List[List[Scalar]]) -> List[List[Scalar]]:
    n = len(mat)
    aug = [list(row) + [Scalar(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class LatticeContext:
    """Lattice L = sqrt(s) Q with its shifted conformal vector.

    ``gram`` is the Gram matrix of the root lattice Q.  With ``pprime`` unset
    the scale is s = p and the conformal vector is omega_st + b(-2)1 with
    b = (p-1)/p * rho_L.  With ``pprime`` set (rank one only) the scale is
    s = p*p' and b = (p-p')/(2pp') alpha.
    """

    gram: Tuple[Tuple[int, ...], ...]
    p: int
    pprime: Optional[int] = None
    rank: int = field(init=False, compare=False)
    form: Tuple[Tuple[Scalar, ...], ...] = field(init=False, repr=False, compare=False)
    form_inv: Tuple[Tuple[Scalar, ...], ...] = field(init=False, repr=False, compare=False)
    b: Point = field(init=False, repr=False, compare=False)
    rho_sq: Scalar = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if any(len(row) != n for row in gram) or any(gram[i][j] != gram[j][i] for i in range(n) for j in range(n)):
            raise ValueError("gram must be a symmetric square matrix")
        if self.p < 1:
            raise ValueError("p must be positive")
        object.__setattr__(self, "rank", n)
        if self.pprime is None:
            scale = self.p
        else:
            if n != 1:
                raise ValueError("the two-parameter (p, p') mode is rank one only")
            if self.pprime < 2 or gcd(self.p, self.pprime) != 1:
                raise ValueError("p' must be >= 2 and coprime to p")
            scale = self.p * self.pprime
        form = tuple(tuple(Scalar(scale * x) for x in row) for row in gram)
        object.__setattr__(self, "form", form)
        object.__setattr__(self, "form_inv", tuple(tuple(r) for r in _inverse([list(r) for r in form])))
        # rho of Q in simple-root coordinates solves gram * rho = (1, ..., 1)
        ginv = _inverse([[Scalar(x) for x in row] for row in gram])
        rho_q = tuple(sum(ginv[i]) for i in range(n))
        rho_sq = sum(rho_q[i] * gram[i][j] * rho_q[j] for i in range(n) for j in range(n))
        object.__setattr__(self, "rho_sq", rho_sq)
        if self.pprime is None:
            # rho_L = sqrt(p) rho_Q has the same coordinates in the alpha_i = sqrt(p) alpha_i^Q basis
            b = tuple(Scalar(self.p - 1, self.p) * x for x in rho_q)
        else:
            b = (Scalar(self.p - self.pprime, 2 * self.p * self.pprime),)
        object.__setattr__(self, "b", b)

    # -- constructors
    @classmethod
    def a1(cls, p: int, pprime: Optional[int] = None) -> "LatticeContext":
        return cls(A1_GRAM, p, pprime)

    @property
    def minimal_mode(self) -> bool:
        return self.pprime is not None

    @property
    def alpha_norm(self) -> Scalar:
        return self.form[0][0]

    @property
    def c(self) -> Scalar:
        return central_charge(self)

    # -- lattice arithmetic
    def point(self, *coords) -> Point:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates")
        return tuple(as_scalar(x) for x in coords)

    @property
    def zero(self) -> Point:
        return (Scalar(0),) * self.rank

    def pair(self, u: Point, v: Point) -> Scalar:
        f = self.form
        return sum((u[i] * f[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j]), Scalar(0))

    def pair_color(self, u: Point, c: int) -> Scalar:
        """<u, alpha_c>."""
        return sum((u[i] * self.form[i][c] for i in range(self.rank) if u[i]), Scalar(0))

    def weight_of(self, gamma: Point) -> Scalar:
        return weight_of(self, gamma)

    def mono_weight(self, mon: Monomial) -> Scalar:
        return partition_total(mon[0]) + weight_of(self, mon[1])

    def in_lattice(self, gamma: Point) -> bool:
        return all(x.denominator == 1 for x in gamma)

    def cocycle(self, beta: Point, gamma: Point) -> int:
        """Bimultiplicative 2-cocycle; trivial in rank one.

        Higher rank uses an ordered sign cocycle on integral points
        (experimental, not exercised by the verification suites).
        """
        if self.rank == 1:
            return 1
        if not (self.in_lattice(beta) and self.in_lattice(gamma)):
            return 1
        e = 0
        for i in range(self.rank):
            for j in range(self.rank):
                if i < j:
                    e += int(beta[i]) * int(gamma[j]) * self.gram[i][j]
                elif i == j:
                    e += int(beta[i]) * int(gamma[i]) * (self.gram[i][i] // 2)
        return -1 if e % 2 else 1


def add_points(u: Point, v: Point) -> Point:
    return tuple(a + b for a, b in zip(u, v))


def sub_points(u: Point, v: Point) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def scale_point(s, u: Point) -> Point:
    s = as_scalar(s)
    return tuple(s * a for a in u)


def weight_of(ctx: LatticeContext, gamma: Point) -> Scalar:
    """L(0)-eigenvalue of e^gamma: <gamma,gamma>/2 - <b,gamma>."""
    return ctx.pair(gamma, gamma) / 2 - ctx.pair(ctx.b, gamma)


def central_charge(ctx: LatticeContext) -> Scalar:
    if ctx.minimal_mode:
        p, q = ctx.p, ctx.pprime
        return 1 - Scalar(6 * (p - q) ** 2, p * q)
    p = ctx.p
    return ctx.rank + 12 * ctx.rho_sq * (2 - p - Scalar(1, p))


# ---------------------------------------------------------------------------
# states


class State:
    """Finite linear combination of Fock monomials with Scalar coefficients.

    Treated as immutable: arithmetic returns new states.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        if terms is None:
            self._terms: Dict[Monomial, Scalar] = {}
        else:
            self._terms = {m: as_scalar(c) for m, c in terms.items() if c != 0}

    @classmethod
    def _trusted(cls, terms: Dict[Monomial, Scalar]) -> "State":
        s = cls.__new__(cls)
        s._terms = terms
        return s

    @classmethod
    def monomial(cls, parts: Iterable, point: Point, coeff=1) -> "State":
        return cls({(sort_parts(parts), tuple(point)): as_scalar(coeff)})

    @property
    def terms(self) -> Dict[Monomial, Scalar]:
        return self._terms

    def items(self):
        return self._terms.items()

    def sorted_items(self, ctx: LatticeContext):
        return sorted(self._terms.items(), key=lambda kv: monomial_key(ctx, kv[0]))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, State):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "State") -> "State":
        if not isinstance(other, State):
            if other == 0:
                return self
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return State._trusted(out)

    __radd__ = __add__

    def __neg__(self) -> "State":
        return State._trusted({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "State") -> "State":
        return self + (-other)

    def __mul__(self, scalar) -> "State":
        scalar = as_scalar(scalar)
        if scalar == 0:
            return State()
        return State._trusted({m: c * scalar for m, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "State":
        return self * (1 / as_scalar(scalar))

    def coeff(self, mon: Monomial) -> Scalar:
        return self._terms.get(mon, Scalar(0))

    def charges(self) -> set:
        return {m[1] for m in self._terms}

    def weights(self, ctx: LatticeContext) -> set:
        return {ctx.mono_weight(m) for m in self._terms}

    def is_homogeneous(self, ctx: LatticeContext) -> bool:
        return len(self.weights(ctx)) <= 1

    def weight(self, ctx: LatticeContext) -> Scalar:
        ws = self.weights(ctx)
        if len(ws) != 1:
            raise ValueError("state is not homogeneous (or is zero)")
        return next(iter(ws))

    def components(self, ctx: LatticeContext) -> Dict[Scalar, "State"]:
        out: Dict[Scalar, Dict[Monomial, Scalar]] = {}
        for m, c in self._terms.items():
            out.setdefault(ctx.mono_weight(m), {})[m] = c
        return {w: State._trusted(t) for w, t in sorted(out.items())}

    def format(self, ctx: Optional[LatticeContext] = None) -> str:
        if not self._terms:
            return "0"
        items = self.sorted_items(ctx) if ctx is not None else sorted(self._terms.items(), key=lambda kv: repr(kv[0]))
        return " + ".join(f"({c})*{format_monomial(m)}" for m, c in items)

    def __repr__(self):
        return f"State({self.format()})"


def format_monomial(mon: Monomial) -> str:
    parts, point = mon
    heis = "".join(f"a{c + 1}(-{n})" if len(point) > 1 else f"a(-{n})" for n, c in parts)
    pt = ",".join(str(x) for x in point)
    return f"{heis}e^[{pt}]"


def monomial_key(ctx: LatticeContext, mon: Monomial):
    """Canonical order: weight, lattice coefficients, partition order."""
    parts, point = mon
    return (ctx.mono_weight(mon), point, tuple((-n, c) for n, c in parts))


def vacuum(ctx: LatticeContext) -> State:
    return State.monomial((), ctx.zero)


def exp_state(ctx: LatticeContext, point: Point) -> State:
    return State.monomial((), tuple(point))


def heis_state(ctx: LatticeContext, parts: Iterable, point: Optional[Point] = None) -> State:
    """alpha_{c}(-n)... e^point; parts may be given as ints (color 0) or (n, c) pairs."""
    norm = [(x, 0) if isinstance(x, int) else tuple(x) for x in parts]
    return State.monomial(norm, ctx.zero if point is None else point)


def multiply_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    """Monomial product: partition union and lattice-point sum."""
    return sort_parts(m1[0] + m2[0]), add_points(m1[1], m2[1])


# ---------------------------------------------------------------------------
# graded basis enumeration


@dataclass
class GradedBasis:
    coset: Point
    cutoff: Scalar
    strata: Dict[Scalar, List[Monomial]]
    single_charge: bool = False
    warning: Optional[str] = None
    _index: Dict[Scalar, Dict[Monomial, int]] = field(default_factory=dict, repr=False)

    def weights(self) -> List[Scalar]:
        return sorted(self.strata)

    def stratum(self, w) -> List[Monomial]:
        return self.strata.get(as_scalar(w), [])

    def index(self, w) -> Dict[Monomial, int]:
        w = as_scalar(w)
        if w not in self._index:
            self._index[w] = {m: i for i, m in enumerate(self.stratum(w))}
        return self._index[w]

    def dims(self) -> List[Tuple[Scalar, int]]:
        return [(w, len(self.strata[w])) for w in self.weights()]

    def all_monomials(self) -> List[Monomial]:
        return [m for w in self.weights() for m in self.strata[w]]

    def min_weight(self) -> Optional[Scalar]:
        return min(self.strata) if self.strata else None

    def states(self, w) -> List[State]:
        return [State.monomial(m[0], m[1]) for m in self.stratum(w)]


def _fp_decomposition(form) -> List[List[Scalar]]:
    n = len(form)
    q = [list(row) for row in form]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _int_window(center: Scalar, radius_sq: Scalar) -> List[int]:
    """All integers k with (k - center)^2 <= radius_sq, exactly."""
    if radius_sq < 0:
        return []
    r = isqrt(floor(radius_sq)) + 1
    lo, hi = floor(center) - r, ceil(center) + r
    # the window edges are provably outside the ball
    assert (lo - center) ** 2 > radius_sq and (hi - center) ** 2 > radius_sq
    return [k for k in range(lo, hi + 1) if (k - center) ** 2 <= radius_sq]


def lattice_points(ctx: LatticeContext, coset: Point, cutoff) -> List[Point]:
    """All gamma in coset + L with weight_of(gamma) <= cutoff, sorted.

    Uses h(gamma) = |gamma - b|^2/2 - |b|^2/2 and a Fincke-Pohst search over
    the integer offsets, so completeness holds exactly.
    """
    cutoff = as_scalar(cutoff)
    n = ctx.rank
    budget = 2 * cutoff + ctx.pair(ctx.b, ctx.b)
    if budget < 0:
        return []
    shift = sub_points(tuple(as_scalar(x) for x in coset), ctx.b)
    q = _fp_decomposition(ctx.form)
    found: List[Point] = []
    x = [Scalar(0)] * n

    def rec(i: int, remaining: Scalar):
        center_shift = sum((q[i][j] * x[j] for j in range(i + 1, n)), Scalar(0))
        # x_i = shift_i + k_i, need q_ii (x_i + center_shift)^2 <= remaining
        center = -center_shift - shift[i]
        for k in _int_window(center, remaining / q[i][i]):
            x[i] = shift[i] + k
            used = q[i][i] * (x[i] + center_shift) ** 2
            if i == 0:
                found.append(tuple(x[j] + ctx.b[j] for j in range(n)))
            else:
                rec(i - 1, remaining - used)

    rec(n - 1, budget)
    pts = [g for g in found if weight_of(ctx, g) <= cutoff]
    return sorted(pts)


def enumerate_basis(ctx: LatticeContext, coset: Point, cutoff, single_charge: bool = False) -> GradedBasis:
    """Graded monomial basis of V_{L+coset} (or M(1, coset) if single_charge) up to weight cutoff."""
    cutoff = as_scalar(cutoff)
    coset = tuple(as_scalar(x) for x in coset)
    if single_charge:
        points = [coset] if weight_of(ctx, coset) <= cutoff else []
    else:
        points = lattice_points(ctx, coset, cutoff)
    strata: Dict[Scalar, List[Monomial]] = {}
    for gamma in points:
        h = weight_of(ctx, gamma)
        for n in range(0, floor(cutoff - h) + 1):
            for part in colored_partitions(n, ctx.rank):
                strata.setdefault(h + n, []).append((part, gamma))
    for w in strata:
        strata[w].sort(key=lambda m: monomial_key(ctx, m))
    warning = None
    if not strata:
        warning = "cutoff below the minimal weight of the coset; basis is empty"
        log.warning(warning)
    return GradedBasis(coset, cutoff, dict(sorted(strata.items())), single_charge, warning)


def graded_dimension(ctx: LatticeContext, coset: Point, cutoff, single_charge: bool = False) -> List[Tuple[Scalar, int]]:
    return enumerate_basis(ctx, coset, cutoff, single_charge).dims()


def state_to_vector(state: State, index: Mapping[Monomial, int]) -> Dict[int, Scalar]:
    out = {}
    for m, c in state.items():
        try:
            out[index[m]] = c
        except KeyError:
            raise KeyError(f"monomial {format_monomial(m)} is outside the basis") from None
    return out


def vector_to_state(vec: Mapping[int, Scalar], monomials: List[Monomial]) -> State:
    return State({monomials[i]: c for i, c in vec.items()})
