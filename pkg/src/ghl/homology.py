"""Cell bases, boundary matrices and exact Betti numbers at small rank.

Graphs are generated degree sequence by degree sequence: vertices are filled
one at a time with loops and then with edges to later vertices, and the
labeled results are identified by canonical form.  All linear algebra is
over the integers (boundary coefficients are integral and right-hand sides
are cleared of denominators), with rows kept primitive to limit growth.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .canon import cell_from_key, graph_canon, cell_canon
from .complex import Chain, boundary, delta_C, delta_R
from .halfedge import HalfEdgeGraph, blow_up, blow_up_partitions, components, is_forest, rose

__all__ = [
    "CellBasis", "SparseRationalMatrix", "betti", "betti_table", "boundary_matrix",
    "enumerate_cells", "enumerate_graphs", "format_betti_table", "is_boundary", "matrix_rank",
]


class HomologyError(ValueError):
    pass


# -- graphs ----------------------------------------------------------------------

def _partitions(total: int, parts: int, low: int) -> Iterator[tuple]:
    """Non-increasing sequences of ``parts`` integers ``>= low`` summing to ``total``."""
    def rec(left, k, cap):
        if k == 0:
            if left == 0:
                yield ()
            return
        for x in range(min(cap, left - low * (k - 1)), low - 1, -1):
            for rest in rec(left - x, k - 1, x):
                yield (x,) + rest
    yield from rec(total, parts, total)


def _fill(degrees: List[int]) -> Iterator[list]:
    """Every loop-and-multiedge graph on ``len(degrees)`` labeled vertices with these degrees."""
    q = len(degrees)
    rem = list(degrees)
    edges: list = []

    def spread(v, w, left):
        # distribute the remaining ``left`` half-edges of v over vertices w..q-1
        if left == 0:
            yield from vertex(v + 1)
            return
        if w >= q:
            return
        if sum(rem[w:]) < left:
            return
        for mult in range(min(left, rem[w]), -1, -1):
            rem[w] -= mult
            edges.extend([(v, w)] * mult)
            yield from spread(v, w + 1, left - mult)
            del edges[len(edges) - mult:]
            rem[w] += mult

    def vertex(v):
        if v == q:
            yield list(edges)
            return
        r = rem[v]
        for loops in range(r // 2, -1, -1):
            rem[v] = 0
            edges.extend([(v, v)] * loops)
            yield from spread(v, v + 1, r - 2 * loops)
            del edges[len(edges) - loops:]
            rem[v] = r

    yield from vertex(0)


def _graphs_by_blowup(n: int, aut: bool) -> Dict[str, HalfEdgeGraph]:
    """Close the rose under vertex blow-ups, one vertex count at a time.

    Collapsing a non-loop edge of a minimal graph leaves a minimal graph, so
    every class with ``q`` vertices is a blow-up of one with ``q - 1``.
    """
    start = rose(n, 0 if aut else None)
    level = {graph_canon(start, cache=False).prefix: start}
    seen = dict(level)
    while level:
        nxt: Dict[str, HalfEdgeGraph] = {}
        for G in level.values():
            for v in range(G.nv):
                for A, B in blow_up_partitions(G, v):
                    H, _ = blow_up(G, v, A, B)
                    pre = graph_canon(H, cache=False).prefix
                    if pre not in seen and pre not in nxt:
                        nxt[pre] = cell_from_key(pre)[0]
        seen.update(nxt)
        level = nxt
    return seen


def enumerate_graphs(n: int, variant: str = "out", reverse: bool = False,
                     method: str = "degrees") -> List[HalfEdgeGraph]:
    """Canonical representatives of the connected minimal graphs of rank ``n``.

    In the ``aut`` variant vertex 0 is the basepoint and may be bivalent.
    ``method='degrees'`` fills labeled graphs degree sequence by degree
    sequence; ``reverse`` runs that in a different order (vertices filled last
    to first, degree sequences ascending).  ``method='blowup'`` grows the
    classes from the rose instead, which scales to rank 5.  All must agree.
    """
    if n < 1:
        raise HomologyError("rank must be positive")
    if method == "blowup":
        found = _graphs_by_blowup(n, variant == "aut")
        return [found[k] for k in sorted(found)]
    if method != "degrees":
        raise ValueError(f"unknown method {method!r}")
    aut = variant == "aut"
    qmax = 2 * n - 1 if aut else max(1, 2 * n - 2)
    seen: Dict[str, HalfEdgeGraph] = {}
    for q in range(1, qmax + 1):
        E = q + n - 1
        seqs = []
        if aut:
            for d0 in range(2, 2 * E + 1):
                if q == 1:
                    if d0 == 2 * E:
                        seqs.append((d0,))
                    continue
                for rest in _partitions(2 * E - d0, q - 1, 3):
                    seqs.append((d0,) + rest)
        else:
            seqs = list(_partitions(2 * E, q, 3))
        if reverse:
            seqs = [s[:1] + tuple(reversed(s[1:])) if aut else tuple(reversed(s)) for s in seqs]
            seqs.reverse()
        for seq in seqs:
            order = list(range(q))
            if reverse:
                order.reverse()          # fill the last vertex first
            degs = [seq[v] for v in order]
            for edges in _fill(degs):
                ends = tuple((order[a], order[b]) for a, b in edges)
                if len(set(components(q, ends))) != 1:
                    continue
                G = HalfEdgeGraph(q, ends, 0 if aut else None)
                pre = graph_canon(G, cache=False).prefix
                if pre not in seen:
                    seen[pre] = cell_from_key(pre)[0]
    return [seen[k] for k in sorted(seen)]


# -- cells -------------------------------------------------------------------------

@dataclass
class CellBasis:
    rank: int
    variant: str
    dim: int
    keys: List[str]
    index: Dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index = {k: i for i, k in enumerate(self.keys)}

    def __len__(self) -> int:
        return len(self.keys)

    def chain(self, key: str, coeff=1) -> Chain:
        return Chain(self.rank, self.variant, self.dim, {key: coeff})


def _forests(G: HalfEdgeGraph, k: int) -> Iterator[tuple]:
    candidates = [e for e, (a, b) in enumerate(G.ends) if a != b]
    # one representative per parallel class suffices for a forest, but all
    # members appear anyway; the canonical key removes the duplicates
    for S in combinations(candidates, k):
        if is_forest(G, S):
            yield S


_BASES: dict = {}
_GRAPHS: dict = {}


def _graphs(n: int, variant: str) -> List[HalfEdgeGraph]:
    if (n, variant) not in _GRAPHS:
        method = "degrees" if n <= 4 else "blowup"
        _GRAPHS[(n, variant)] = enumerate_graphs(n, variant, method=method)
    return _GRAPHS[(n, variant)]


def enumerate_cells(n: int, k: int, variant: str = "out",
                    graphs: Optional[Sequence[HalfEdgeGraph]] = None) -> CellBasis:
    """Non-degenerate cells of rank ``n`` and dimension ``k``, sorted by key bytes."""
    cache_key = (n, k, variant)
    use_cache = graphs is None
    if use_cache and cache_key in _BASES:
        return _BASES[cache_key]
    if graphs is None:
        graphs = _graphs(n, variant)
    keys = set()
    for G in graphs:
        if k > G.nv - 1:
            continue
        gc = graph_canon(G)
        for S in _forests(G, k):
            key, _ = cell_canon(G, S, gc)
            if key is not None:
                keys.add(key)
    basis = CellBasis(n, variant, k, sorted(keys, key=str.encode))
    if use_cache:
        _BASES[cache_key] = basis
    return basis


def max_dimension(n: int, variant: str) -> int:
    return 2 * n - 2 if variant == "aut" else 2 * n - 3


# -- sparse matrices -------------------------------------------------------------

@dataclass
class SparseRationalMatrix:
    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), v in list(self.entries.items()):
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise HomologyError(f"entry ({r}, {c}) out of range")
            if not v:
                del self.entries[(r, c)]

    def columns(self) -> List[Dict[int, Fraction]]:
        cols = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.cols != other.rows:
            raise HomologyError("shape mismatch")
        mine = self.columns()
        out: dict = {}
        for (r, c), v in other.entries.items():
            for i, w in mine[r].items():
                out[(i, c)] = out.get((i, c), 0) + w * v
        return SparseRationalMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return not self.entries

    def triplets(self) -> str:
        lines = [f"{r} {c} {v.numerator}/{v.denominator}"
                 for (r, c), v in sorted(self.entries.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def boundary_matrix(n: int, k: int, variant: str = "out",
                    source: Optional[CellBasis] = None,
                    target: Optional[CellBasis] = None) -> SparseRationalMatrix:
    """Matrix of ``boundary: C_k -> C_{k-1}``; column ``j`` is the image of cell ``j``."""
    source = source or enumerate_cells(n, k, variant)
    if k == 0:
        return SparseRationalMatrix(0, len(source))
    target = target or enumerate_cells(n, k - 1, variant)
    entries = {}
    for j, key in enumerate(source.keys):
        img = boundary(source.chain(key))
        for t, c in img.terms.items():
            i = target.index.get(t)
            if i is None:
                raise HomologyError(f"boundary term {t} missing from the dimension {k - 1} basis")
            entries[(i, j)] = c
    return SparseRationalMatrix(len(target), len(source), entries)


# -- exact elimination -----------------------------------------------------------

def _primitive(row: dict) -> dict:
    g = reduce(gcd, row.values(), 0)
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _integer_rows(rows: Sequence[dict]) -> List[dict]:
    out = []
    for r in rows:
        if not r:
            continue
        den = reduce(lcm, (Fraction(v).denominator for v in r.values()), 1)
        out.append(_primitive({c: int(Fraction(v) * den) for c, v in r.items() if v}))
    return out


def _eliminate(rows: List[dict], pivots: Dict[int, dict], lead) -> Optional[dict]:
    """Reduce ``rows`` into ``pivots`` (pivot column -> row); ``lead`` picks the pivot column."""
    for row in rows:
        while row:
            p = lead(row)
            piv = pivots.get(p)
            if piv is None:
                pivots[p] = row
                break
            a, b = piv[p], row[p]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {c: v * fa for c, v in row.items()}
            for c, v in piv.items():
                x = new.get(c, 0) - fb * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            row = _primitive(new)
    return None


def matrix_rank(M: SparseRationalMatrix, pivot: str = "low") -> int:
    """Exact rank.  ``pivot='low'`` pivots on the least column, shortest rows first;
    ``pivot='high'`` on the greatest column, rows in reverse order."""
    rows = _integer_rows(M.row_dicts())
    if pivot == "low":
        rows.sort(key=len)
        lead = min
    elif pivot == "high":
        rows.reverse()
        lead = max
    else:
        raise ValueError(f"unknown pivot order {pivot!r}")
    pivots: dict = {}
    _eliminate(rows, pivots, lead)
    return len(pivots)


def checked_rank(M: SparseRationalMatrix) -> int:
    r1 = matrix_rank(M, "low")
    r2 = matrix_rank(M, "high")
    if r1 != r2:
        raise HomologyError(f"rank disagreement between pivot orders: {r1} vs {r2}")
    return r1


@dataclass
class BettiRow:
    k: int
    cells: int
    rank_boundary: int     # rank of the boundary out of dimension k
    betti: int


def betti_table(n: int, variant: str = "out", dims: Optional[Sequence[int]] = None) -> List[BettiRow]:
    top = max_dimension(n, variant)
    dims = list(range(0, top + 1)) if dims is None else list(dims)
    bases: dict = {}

    def basis(d):
        if d not in bases:
            bases[d] = enumerate_cells(n, d, variant)
        return bases[d]

    def rk(d):
        if d <= 0 or d > top:
            return 0
        return checked_rank(boundary_matrix(n, d, variant, basis(d), basis(d - 1)))

    ranks = {d: rk(d) for d in sorted({d for k in dims for d in (k, k + 1)})}
    out = []
    for k in dims:
        dimk = len(basis(k)) if 0 <= k <= top else 0
        out.append(BettiRow(k, dimk, ranks[k], dimk - ranks[k] - ranks[k + 1]))
    return out


def betti(n: int, variant: str = "out", dims: Optional[Sequence[int]] = None) -> List[int]:
    return [row.betti for row in betti_table(n, variant, dims)]


def format_betti_table(n: int, variant: str, rows: Sequence[BettiRow]) -> str:
    lines = ["rank n | variant | k | #cells | rank d_k | b_k"]
    for r in rows:
        lines.append(f"{n} | {variant} | {r.k} | {r.cells} | {r.rank_boundary} | {r.betti}")
    return "\n".join(lines) + "\n"


# -- boundary witnesses ------------------------------------------------------------

class NotACycle(HomologyError):
    pass


def _solve(cols: Sequence[str], images: Dict[str, Chain], c: Chain) -> Optional[Dict[str, Fraction]]:
    """Exact solution of ``sum_j x_j images[cols[j]] = c`` or ``None``."""
    row_index: Dict[str, int] = {}
    rows: List[dict] = []

    def row(key):
        r = row_index.get(key)
        if r is None:
            r = row_index[key] = len(rows)
            rows.append({})
        return rows[r]

    for j, key in enumerate(cols):
        for t, v in images[key].terms.items():
            row(t)[j] = v
    den = reduce(lcm, (v.denominator for v in c.terms.values()), 1)
    for key, v in c.terms.items():
        row(key)[-1] = int(v * den)    # rhs sits in column -1 and never leads
    rows = _integer_rows(rows)

    def lead(r):
        cs = [x for x in r if x >= 0]
        return min(cs) if cs else -1

    pivots: dict = {}
    _eliminate(rows, pivots, lead)
    if -1 in pivots:
        return None
    x: Dict[int, Fraction] = {}
    for p in sorted(pivots, reverse=True):
        r = pivots[p]
        s = Fraction(r.get(-1, 0))
        for col, v in r.items():
            if col > p:
                s -= v * x.get(col, 0)
        if s:
            x[p] = s / r[p]
    return {cols[j]: v / den for j, v in x.items() if v}


def _cofaces(c: Chain, key: str) -> set:
    one = c.like({key: 1})
    return set(delta_R(one).terms) | set(delta_C(one).terms)


def is_boundary(c: Chain, source: Optional[CellBasis] = None,
                target: Optional[CellBasis] = None, local_rounds: int = 3) -> Optional[Chain]:
    """A chain ``x`` with ``boundary(x) == c``, or ``None`` if there is none.

    First tries unknowns supported near ``c``: cells with a face in ``c``,
    then cells with a face among the rows that brings in, and so on for
    ``local_rounds`` rounds.  A witness found that way is exact and checked.
    Only a proof that no witness exists needs the whole basis.
    """
    if not c.terms:
        return c.like(dim=c.dim + 1)
    if boundary(c):
        raise NotACycle("input is not a cycle")
    n, k, variant = c.rank, c.dim, c.variant
    up = c.like(dim=k + 1)
    if source is None and local_rounds > 0:
        images: Dict[str, Chain] = {}
        seen_rows: set = set()
        frontier = set(c.terms)
        for _ in range(local_rounds):
            new = set()
            for key in frontier:
                new |= _cofaces(c, key)
            seen_rows |= frontier
            new -= images.keys()
            for key in new:
                images[key] = boundary(up.like({key: 1}))
            cols = sorted(images, key=str.encode)
            x = _solve(cols, images, c)
            if x is not None:
                w = up.like(x)
                if boundary(w) == c:
                    return w
            frontier = {t for key in new for t in images[key].terms} - seen_rows
            if not frontier:
                break
    source = source or enumerate_cells(n, k + 1, variant)
    target = target or enumerate_cells(n, k, variant)
    for key in c.terms:
        if key not in target.index:
            raise HomologyError(f"chain term {key} missing from the basis")
    images = {key: boundary(source.chain(key)) for key in source.keys}
    x = _solve(source.keys, images, c)
    return None if x is None else up.like(x)


def random_cells(n: int, k: int, variant: str, count: int, seed: int = 0) -> List[str]:
    """Random sample (with replacement) of basis cells."""
    basis = enumerate_cells(n, k, variant)
    rng = random.Random(seed)
    return [rng.choice(basis.keys) for _ in range(count)] if basis.keys else []
