"""Oriented cells, exact chains, boundaries, coboundaries and the pairing.

A cell is a minimal graph with an ordered forest; the order is the
orientation and odd reorderings negate the cell.  Chains store canonical
keys only, so equality of chains is equality of their term maps.

Forest positions are 1-based in every sign below: removing the ``i``-th
forest edge contributes ``(-1)**i`` and collapsing it ``(-1)**(i+1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, TextIO, Tuple

from .canon import (
    CellKey, canonicalize, cell_canon, cell_from_key, graph_canon, key_aut_order,
    permutation_parity,
)
from .halfedge import (
    GraphError, HalfEdgeGraph, blow_up, blow_up_partitions, collapse_edge,
    is_connected, is_forest, is_minimal, maximal_forests_of_polygon_union, rank,
)

Coeff = Fraction


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class OrientedCell:
    graph: HalfEdgeGraph
    forest: tuple

    def __post_init__(self):
        object.__setattr__(self, "forest", tuple(self.forest))

    @property
    def basepointed(self) -> bool:
        return self.graph.basepoint is not None

    @property
    def dimension(self) -> int:
        return len(self.forest)

    @property
    def bigrade(self) -> tuple:
        q = self.graph.nv
        return len(self.forest) - q, q

    @property
    def rank(self) -> int:
        return rank(self.graph)

    def validate(self) -> None:
        G = self.graph
        if not is_connected(G):
            raise GraphError("cell graph must be connected")
        if not is_minimal(G, self.basepointed):
            raise GraphError("cell graph must be minimal")
        if len(set(self.forest)) != len(self.forest) or not is_forest(G, self.forest):
            raise GraphError("cell forest is not a forest")
        n = rank(G)
        q = G.nv
        qmax = 2 * n - 1 if self.basepointed else 2 * n - 2
        if n >= 2 and not 1 <= q <= qmax:
            raise GraphError("vertex count outside the bigrade bounds")


def key_dimension(key: CellKey) -> int:
    return len(cell_from_key(key)[1])


def key_rank(key: CellKey) -> int:
    return rank(cell_from_key(key)[0])


def key_bigrade(key: CellKey) -> tuple:
    G, F = cell_from_key(key)
    return len(F) - G.nv, G.nv


class Chain:
    """Finite formal sum of canonical cells with exact rational coefficients."""

    __slots__ = ("rank", "variant", "dim", "terms")

    def __init__(self, rank: int, variant: str, dim: int,
                 terms: Optional[Mapping[CellKey, object]] = None):
        if variant not in ("out", "aut"):
            raise ValueError(f"unknown variant {variant!r}")
        self.rank = rank
        self.variant = variant
        self.dim = dim
        self.terms: Dict[CellKey, Fraction] = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = Fraction(c)

    # -- structure ---------------------------------------------------------
    def like(self, terms=None, dim=None) -> "Chain":
        return Chain(self.rank, self.variant, self.dim if dim is None else dim, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[CellKey, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __getitem__(self, key: CellKey) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def __repr__(self) -> str:
        return (f"Chain(rank={self.rank}, variant={self.variant}, dim={self.dim}, "
                f"terms={len(self.terms)})")

    def _check(self, other: "Chain") -> None:
        if (self.rank, self.variant, self.dim) != (other.rank, other.variant, other.dim):
            raise GradingError(
                f"grading mismatch: {(self.rank, self.variant, self.dim)} vs "
                f"{(other.rank, other.variant, other.dim)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return ((self.rank, self.variant, self.dim) == (other.rank, other.variant, other.dim)
                and self.terms == other.terms)

    def __add__(self, other: "Chain") -> "Chain":
        if not other.terms:
            return self
        if not self.terms:
            return other
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self.like(out)

    def __neg__(self) -> "Chain":
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, scalar) -> "Chain":
        scalar = Fraction(scalar)
        if not scalar:
            return self.like()
        return self.like({k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def bigrades(self) -> set:
        return {key_bigrade(k) for k in self.terms}

    @property
    def grading(self):
        bg = self.bigrades()
        if len(bg) == 1:
            return next(iter(bg))
        return "mixed" if bg else None


def _finish(acc: dict, rank: int, variant: str, dim: int) -> Chain:
    ch = Chain(rank, variant, dim)
    ch.terms = {k: Fraction(c) for k, c in acc.items() if c}
    return ch


def _variant(G: HalfEdgeGraph) -> str:
    return "out" if G.basepoint is None else "aut"


def term(cell: OrientedCell, coeff=1, check: bool = True) -> Chain:
    """Normalise ``coeff * cell`` into the quotient by ``(G,F) + (G,-F) = 0``."""
    if check:
        cell.validate()
    G = cell.graph
    ch = Chain(rank(G), _variant(G), cell.dimension)
    res = canonicalize(G, cell.forest, check=False)
    if not res.orientation_reversing and coeff:
        ch.terms[res.key] = Fraction(coeff) * res.sign
    return ch


def key_cell(key: CellKey) -> OrientedCell:
    G, F = cell_from_key(key)
    return OrientedCell(G, F)


# -- boundary operators ---------------------------------------------------------

def d_R(c: Chain) -> Chain:
    """Remove forest edges: the ``i``-th removal carries ``(-1)**i``."""
    acc: dict = {}
    for key, coeff in c.terms.items():
        G, F = cell_from_key(key)
        gc = graph_canon(G)
        for i in range(len(F)):
            k, s = cell_canon(G, F[:i] + F[i + 1:], gc)
            if k is not None:
                acc[k] = acc.get(k, 0) + (coeff if i % 2 else -coeff) * s
    return _finish(acc, c.rank, c.variant, c.dim - 1)


def d_C(c: Chain) -> Chain:
    """Collapse forest edges: the ``i``-th collapse carries ``(-1)**(i+1)``."""
    acc: dict = {}
    for key, coeff in c.terms.items():
        G, F = cell_from_key(key)
        for i, e in enumerate(F):
            col = collapse_edge(G, e)
            em = col.edge_map
            k, s = cell_canon(col.graph, [em[f] for f in F if f != e])
            if k is not None:
                acc[k] = acc.get(k, 0) + (-coeff if i % 2 else coeff) * s
    return _finish(acc, c.rank, c.variant, c.dim - 1)


def boundary(c: Chain) -> Chain:
    return d_R(c) + d_C(c)


def delta_R(c: Chain) -> Chain:
    """Add one edge to the forest in every way, new edge last."""
    acc: dict = {}
    for key, coeff in c.terms.items():
        G, F = cell_from_key(key)
        gc = graph_canon(G)
        sign = -1 if len(F) % 2 == 0 else 1
        fs = set(F)
        for e in range(G.ne):
            if e in fs or G.is_loop(e):
                continue
            new = F + (e,)
            if not is_forest(G, new):
                continue
            k, s = cell_canon(G, new, gc)
            if k is not None:
                acc[k] = acc.get(k, 0) + coeff * sign * s
    return _finish(acc, c.rank, c.variant, c.dim + 1)


def delta_C(c: Chain) -> Chain:
    """Blow every vertex up into a new forest edge in every way, new edge last."""
    acc: dict = {}
    for key, coeff in c.terms.items():
        G, F = cell_from_key(key)
        sign = 1 if len(F) % 2 == 0 else -1
        for v in range(G.nv):
            for A, B in blow_up_partitions(G, v):
                H, eP = blow_up(G, v, A, B)
                k, s = cell_canon(H, F + (eP,))
                if k is not None:
                    acc[k] = acc.get(k, 0) + coeff * sign * s
    return _finish(acc, c.rank, c.variant, c.dim + 1)


def pair(x: Chain, y: Chain) -> Fraction:
    """Bilinear pairing: a canonical cell pairs with itself to ``|Aut|``."""
    if x.terms and y.terms:
        x._check(y)
    if len(x.terms) > len(y.terms):
        x, y = y, x
    total = Fraction(0)
    for k, c in x.terms.items():
        d = y.terms.get(k)
        if d:
            total += c * d * key_aut_order(k)
    return total


# -- ordered edge graphs -------------------------------------------------------

@dataclass(frozen=True)
class OrderedEdgeGraph:
    """An ordered set of edges of a fixed ambient graph."""
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.edges)) != len(self.edges):
            raise GraphError("repeated edge in ordered graph")

    @property
    def size(self) -> int:
        return len(self.edges)

    def normal(self) -> tuple:
        """``(sorted edges, sign)`` representing the same edge-oriented graph."""
        return tuple(sorted(self.edges)), permutation_parity(self.edges)


def ordered_concat(A: OrderedEdgeGraph, B: OrderedEdgeGraph) -> OrderedEdgeGraph:
    if set(A.edges) & set(B.edges):
        raise GraphError("ordered graphs overlap")
    return OrderedEdgeGraph(A.edges + B.edges)


class EdgeOriented:
    """Linear combination of edge-oriented subgraphs, stored normalised."""

    def __init__(self, terms: Optional[Mapping[tuple, int]] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def of(cls, A: OrderedEdgeGraph, coeff=1) -> "EdgeOriented":
        k, s = A.normal()
        return cls({k: coeff * s})

    def __eq__(self, other) -> bool:
        return self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return EdgeOriented(out)

    def __neg__(self):
        return EdgeOriented({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return EdgeOriented({k: s * v for k, v in self.terms.items()})

    def __mul__(self, other: "EdgeOriented") -> "EdgeOriented":
        """The concatenation product extended bilinearly."""
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                if set(a) & set(b):
                    raise GraphError("ordered graphs overlap")
                k, s = OrderedEdgeGraph(a + b).normal()
                out[k] = out.get(k, 0) + s * x * y
        return EdgeOriented(out)


def edge_d_R(x: EdgeOriented) -> EdgeOriented:
    out: dict = {}
    for a, c in x.terms.items():
        for i in range(len(a)):
            k = a[:i] + a[i + 1:]
            out[k] = out.get(k, 0) + (c if i % 2 else -c)
    return EdgeOriented(out)


def dR_cycle_over_forests(G: HalfEdgeGraph, polygons: Sequence[Sequence[int]],
                          coeff=1) -> Chain:
    """``sum_F eps_F (G, F)`` over the maximal forests of an ordered polygon union.

    Built as the product of the ``d_R`` images of the polygons, which is how
    the signs arise; the result is a ``d_R``-cycle.
    """
    for p in polygons:
        _check_polygon(G, p)
    prod = EdgeOriented({(): 1})
    for p in polygons:
        prod = prod * edge_d_R(EdgeOriented.of(OrderedEdgeGraph(p)))
    dim = sum(len(p) - 1 for p in polygons)
    acc: dict = {}
    gc = graph_canon(G)
    for forest, c in prod.terms.items():
        k, s = cell_canon(G, forest, gc)
        if k is not None:
            acc[k] = acc.get(k, 0) + c * s * coeff
    return _finish(acc, rank(G), _variant(G), dim)


def _check_polygon(G: HalfEdgeGraph, p: Sequence[int]) -> None:
    """``p`` must list the edges of a simple cycle in cyclic order."""
    n = len(p)
    if n == 0:
        raise GraphError("empty polygon")
    verts = set()
    for i in range(n):
        a, b = G.ends[p[i]]
        c, d = G.ends[p[(i + 1) % n]]
        if n > 1 and not ({a, b} & {c, d}):
            raise GraphError("polygon edges are not consecutive")
        verts.update((a, b))
    if len(verts) != n or (n > 1 and any(G.is_loop(e) for e in p)):
        raise GraphError("polygon is not a simple cycle")


def polygon_forest_terms(G: HalfEdgeGraph, polygons: Sequence[Sequence[int]]):
    """Raw ``(forest, sign)`` summands, before canonical merging."""
    for p in polygons:
        _check_polygon(G, p)
    for forest, _, sign in maximal_forests_of_polygon_union(polygons):
        yield forest, sign


# -- chain files ---------------------------------------------------------------

def format_fraction(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def write_chain(c: Chain, fh: TextIO) -> None:
    fh.write(f"chain v1 rank={c.rank} variant={c.variant} dim={c.dim}\n")
    for k in sorted(c.terms, key=lambda s: s.encode()):
        fh.write(f"{format_fraction(c.terms[k])} {k}\n")


def chain_to_text(c: Chain) -> str:
    import io
    buf = io.StringIO()
    write_chain(c, buf)
    return buf.getvalue()


class ChainFormatError(ValueError):
    pass


def read_chain(fh: Iterable[str], recanonicalize: bool = True) -> Chain:
    lines = iter(fh)
    try:
        head = next(lines).split()
    except StopIteration:
        raise ChainFormatError("line 1: empty chain file") from None
    if len(head) != 5 or head[:2] != ["chain", "v1"]:
        raise ChainFormatError("line 1: expected 'chain v1 rank=<n> variant=<v> dim=<k>'")
    try:
        fields = dict(h.split("=", 1) for h in head[2:])
        out = Chain(int(fields["rank"]), fields["variant"], int(fields["dim"]))
    except (KeyError, ValueError) as exc:
        raise ChainFormatError(f"line 1: bad header ({exc})") from None
    acc: dict = {}
    for lineno, line in enumerate(lines, start=2):
        line = line.strip()
        if not line:
            continue
        try:
            num, key = line.split(" ", 1)
            coeff = Fraction(num)
            if recanonicalize:
                G, F = cell_from_key(key)
                res = canonicalize(G, F)
                if res.orientation_reversing:
                    continue
                key2, coeff = res.key, coeff * res.sign
                if key_rank(key2) != out.rank or key_dimension(key2) != out.dim:
                    raise ChainFormatError(f"line {lineno}: term outside the header grading")
                key = key2
        except ChainFormatError:
            raise
        except (ValueError, GraphError, ZeroDivisionError) as exc:
            raise ChainFormatError(f"line {lineno}: {exc}") from None
        acc[key] = acc.get(key, 0) + coeff
    return _finish(acc, out.rank, out.variant, out.dim)
