"""Exact rational arithmetic helpers and sparse linear algebra over Q.

Every scalar on the computation path is a ``gmpy2.mpq`` (exported here as
``Scalar``): an exact rational in lowest terms with positive denominator.
Sparse vectors are plain ``dict[int, Scalar]`` with no stored zeros;
they are sorted by index whenever an ordered view is needed.
"""
from __future__ import annotations


from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq as Scalar

_SCALAR_TYPE = type(Scalar())
SparseVector = Dict[int, Scalar]

# a colored part is (part, color); colors are 0-based internally
Part = Tuple[int, int]
ColoredPartition = Tuple[Part, ...]


def as_scalar(x) -> Scalar:
    if isinstance(x, _SCALAR_TYPE):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not allowed on the exact path")
    return Scalar(x)


@lru_cache(maxsize=None)
def rat_binom(r: Scalar, j: int) -> Scalar:
    """Generalized binomial r(r-1)...(r-j+1)/j!."""
    if j < 0:
        return Scalar(0)
    r = as_scalar(r)
    out = Scalar(1)
    for i in range(j):
        out = out * (r - i) / (i + 1)
    return out


def sort_parts(parts: Iterable[Part]) -> ColoredPartition:
    """Canonical order: parts descending, ties by color ascending."""
    return tuple(sorted(parts, key=lambda pc: (-pc[0], pc[1])))


def partition_total(parts: ColoredPartition) -> int:
    return sum(n for n, _ in parts)


def colored_partitions(n: int, colors: int) -> List[ColoredPartition]:
    """All colored partitions of ``n`` with ``colors`` colors, canonically ordered.

    The list itself is sorted lexicographically on the (-part, color) keys so
    the output order is deterministic.
    """
    if n < 0:
        return []
    kinds = [(k, c) for k in range(n, 0, -1) for c in range(colors)]
    out: List[ColoredPartition] = []

    def rec(remaining: int, start: int, acc: List[Part]) -> None:
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(kinds)):
            k, c = kinds[idx]
            if k > remaining:
                continue
            acc.append((k, c))
            rec(remaining - k, idx, acc)
            acc.pop()

    rec(n, 0, [])
    return out


def partition_count_series(nmax: int, colors: int) -> List[int]:
    """Coefficients of prod_{k>=1} (1 - q^k)^(-colors) up to q^nmax.

    Independent of :func:`colored_partitions`; used as its oracle.
    """
    coeffs = [1] + [0] * nmax
    for k in range(1, nmax + 1):
        for _ in range(colors):
            for i in range(k, nmax + 1):
                coeffs[i] += coeffs[i - k]
    return coeffs


# ---------------------------------------------------------------------------
# sparse linear algebra


def vec_from_dense(values: Sequence) -> SparseVector:
    return {i: as_scalar(v) for i, v in enumerate(values) if v != 0}


def vec_to_dense(v: SparseVector, dim: int) -> List[Scalar]:
    out = [Scalar(0)] * dim
    for i, x in v.items():
        out[i] = x
    return out


def vec_axpy(y: SparseVector, a: Scalar, x: SparseVector) -> SparseVector:
    """Return y + a*x as a new vector."""
    out = dict(y)
    if a == 0:
        return out
    for i, xi in x.items():
        s = out.get(i, 0) + a * xi
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def _reduce(row: SparseVector, pivots: Dict[int, SparseVector], track=None, ptrack=None):
    """Reduce ``row`` against normalized pivot rows in increasing column order."""
    row = dict(row)
    while True:
        cols = [c for c in row if c in pivots]
        if not cols:
            return row, track
        c = min(cols)
        f = row[c]
        piv = pivots[c]
        for k, pv in piv.items():
            s = row.get(k, 0) - f * pv
            if s:
                row[k] = s
            else:
                row.pop(k, None)
        if track is not None:
            track = vec_axpy(track, -f, ptrack[c])


class RowEchelon:
    """Incremental echelon form over Q with lowest-column-index pivots.

    Rows are added one at a time; each row is reduced against existing pivots
    and, when nonzero, normalized so its pivot entry is 1.  Optionally tracks
    the combination of inserted rows that produced each pivot row.
    """

    def __init__(self, track: bool = False):
        self.pivots: Dict[int, SparseVector] = {}
        self.track = track
        self.combos: Dict[int, SparseVector] = {}
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: SparseVector) -> SparseVector:
        red, _ = _reduce(v, self.pivots)
        return red

    def contains(self, v: SparseVector) -> bool:
        return not self.reduce(v)

    def add(self, v: SparseVector) -> bool:
        idx = self.n_inserted
        self.n_inserted += 1
        tr = {idx: Scalar(1)} if self.track else None
        red, tr = _reduce(v, self.pivots, tr, self.combos)
        if not red:
            return False
        c = min(red)
        inv = 1 / red[c]
        red = {k: x * inv for k, x in red.items()}
        # keep pivots fully reduced so that _reduce terminates in one pass order
        for oc, orow in list(self.pivots.items()):
            f = orow.get(c)
            if f:
                self.pivots[oc] = vec_axpy(orow, -f, red)
                if self.track:
                    self.combos[oc] = vec_axpy(self.combos[oc], -f, {k: x * inv for k, x in tr.items()})
        self.pivots[c] = red
        if self.track:
            self.combos[c] = {k: x * inv for k, x in tr.items()}
        return True


def rank(rows: Sequence[SparseVector]) -> int:
    ech = RowEchelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def rref(rows: Sequence[SparseVector]) -> Dict[int, SparseVector]:
    """Reduced row echelon form keyed by pivot column."""
    ech = RowEchelon()
    for r in rows:
        ech.add(r)
    return dict(sorted(ech.pivots.items()))


def kernel_basis(rows: Sequence[SparseVector], ncols: int) -> List[SparseVector]:
    """Exact basis of {v : m v = 0} for the matrix with the given sparse rows.

    One basis vector per free column, in increasing column order; the free
    coordinate is set to 1.
    """
    piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v: SparseVector = {f: Scalar(1)}
        for c, row in piv.items():
            x = row.get(f)
            if x:
                v[c] = -x
        basis.append(dict(sorted(v.items())))
    return basis


def transpose(rows: Sequence[SparseVector], ncols: int) -> List[SparseVector]:
    cols: List[SparseVector] = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, x in r.items():
            cols[j][i] = x
    return cols


def mat_vec(rows: Sequence[SparseVector], v: SparseVector) -> SparseVector:
    out: SparseVector = {}
    for i, r in enumerate(rows):
        s = sum((x * v[j] for j, x in r.items() if j in v), Scalar(0))
        if s:
            out[i] = s
    return out


def span_membership(v: SparseVector, gens: Sequence[SparseVector]) -> Optional[List[Scalar]]:
    """Coefficients c with sum c_i gens[i] = v, or None if v is not in the span.

    Deterministic: the returned solution sets every coefficient attached to a
    generator that is dependent on earlier generators to zero.
    """
    ech = RowEchelon(track=True)
    for g in gens:
        ech.add(g)
    red, tr = _reduce(v, ech.pivots, {}, ech.combos)
    if red:
        return None
    coeffs = [Scalar(0)] * len(gens)
    for i, x in tr.items():
        coeffs[i] = -x
    return coeffs


def solve_affine(target: SparseVector, unknown_cols: Sequence[SparseVector],
                 span_gens: Sequence[SparseVector]):
    """Solve target = sum_k x_k unknown_cols[k] + (element of span(span_gens)).

    Returns ``(solution, dim)`` where ``solution`` is one particular choice of
    the x_k (free ones set to zero) or None if inconsistent, and ``dim`` is the
    dimension of the affine solution space projected to the x_k.
    """
    ech = RowEchelon()
    for g in span_gens:
        ech.add(g)
    reduced_cols = [ech.reduce(u) for u in unknown_cols]
    reduced_target = ech.reduce(target)
    sol = span_membership(reduced_target, reduced_cols)
    free_dim = len(reduced_cols) - rank(reduced_cols)
    return sol, free_dim
