"""Multigraphs with loops and parallel edges, stored as darts.

Edge ``i`` owns the two darts ``2*i`` and ``2*i + 1``; the involution pairing
darts is therefore ``d ^ 1`` and never has fixed points.  ``ends[i]`` records
the vertices of dart ``2*i`` and dart ``2*i + 1``, in that order.  Vertices
are the dense integers ``0 .. nv - 1``.

All surgeries are pure: they return fresh graphs together with whatever
bookkeeping (edge relabelings, new edge indices) the caller needs to keep
track of roles across the operation.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs or invalid surgery requests."""


@dataclass(frozen=True)
class HalfEdgeGraph:
    nv: int
    ends: tuple
    basepoint: Optional[int] = None

    def __post_init__(self):
        ends = tuple((int(a), int(b)) for a, b in self.ends)
        object.__setattr__(self, "ends", ends)
        seen = [False] * self.nv
        for a, b in ends:
            if not (0 <= a < self.nv and 0 <= b < self.nv):
                raise GraphError(f"edge endpoint out of range in {ends}")
            seen[a] = seen[b] = True
        if not all(seen):
            raise GraphError("every vertex must carry at least one dart")
        if self.basepoint is not None and not 0 <= self.basepoint < self.nv:
            raise GraphError("basepoint out of range")

    # -- dart structure -------------------------------------------------
    @property
    def ne(self) -> int:
        return len(self.ends)

    @property
    def darts(self) -> range:
        return range(2 * len(self.ends))

    @staticmethod
    def edge_pairing(d: int) -> int:
        return d ^ 1

    @staticmethod
    def edge_of(d: int) -> int:
        return d >> 1

    def vertex_of(self, d: int) -> int:
        return self.ends[d >> 1][d & 1]

    def darts_at(self, v: int) -> list:
        return [d for d in self.darts if self.vertex_of(d) == v]

    def is_loop(self, e: int) -> bool:
        a, b = self.ends[e]
        return a == b

    def with_basepoint(self, b: Optional[int]) -> "HalfEdgeGraph":
        return HalfEdgeGraph(self.nv, self.ends, b)


def from_edges(nv: int, edges: Iterable[Sequence[int]],
               basepoint: Optional[int] = None) -> HalfEdgeGraph:
    return HalfEdgeGraph(nv, tuple(tuple(e) for e in edges), basepoint)


# -- small named graphs used throughout the tests --------------------------

def rose(n: int, basepoint: Optional[int] = None) -> HalfEdgeGraph:
    return HalfEdgeGraph(1, ((0, 0),) * n, basepoint)


def theta(basepoint: Optional[int] = None) -> HalfEdgeGraph:
    return HalfEdgeGraph(2, ((0, 1),) * 3, basepoint)


def dumbbell(basepoint: Optional[int] = None) -> HalfEdgeGraph:
    return HalfEdgeGraph(2, ((0, 0), (1, 1), (0, 1)), basepoint)


# -- basic invariants ------------------------------------------------------

def valence(G: HalfEdgeGraph, v: int) -> int:
    if not 0 <= v < G.nv:
        raise GraphError(f"unknown vertex {v}")
    return sum((a == v) + (b == v) for a, b in G.ends)


def valences(G: HalfEdgeGraph) -> list:
    val = [0] * G.nv
    for a, b in G.ends:
        val[a] += 1
        val[b] += 1
    return val


def components(nv: int, edges: Iterable[Sequence[int]]) -> list:
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return [find(v) for v in range(nv)]


def is_connected(G: HalfEdgeGraph) -> bool:
    if G.nv == 0:
        return False
    return len(set(components(G.nv, G.ends))) == 1


def rank(G: HalfEdgeGraph) -> int:
    if not is_connected(G):
        raise GraphError("rank requires a connected graph")
    return G.ne - G.nv + 1


def is_minimal(G: HalfEdgeGraph, basepointed: bool = False) -> bool:
    """Connected, every ordinary vertex at least trivalent.

    With ``basepointed`` the basepoint only has to be at least bivalent.
    """
    if not is_connected(G):
        return False
    val = valences(G)
    bp = G.basepoint if basepointed else None
    return all(x >= (2 if v == bp else 3) for v, x in enumerate(val))


def is_forest(G: HalfEdgeGraph, S: Iterable[int]) -> bool:
    parent = list(range(G.nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in S:
        a, b = G.ends[e]
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def has_cycle(G: HalfEdgeGraph, S: Iterable[int]) -> bool:
    """Cycle search by DFS over the subgraph spanned by ``S``.

    Deliberately independent of the union-find in :func:`is_forest`.
    """
    adj = {}
    for e in S:
        a, b = G.ends[e]
        if a == b:
            return True
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    seen = set()
    for root in adj:
        if root in seen:
            continue
        stack = [(root, None)]
        seen.add(root)
        while stack:
            v, via = stack.pop()
            for w, e in adj[v]:
                if e == via:
                    continue
                if w in seen:
                    return True
                seen.add(w)
                stack.append((w, e))
    return False


def boundary_edges(G: HalfEdgeGraph, A: Iterable[int]) -> list:
    """Edges with exactly one endpoint in the vertex set ``A``."""
    A = set(A)
    return [e for e, (a, b) in enumerate(G.ends) if (a in A) != (b in A)]


# -- surgeries --------------------------------------------------------------

@dataclass(frozen=True)
class Collapse:
    graph: HalfEdgeGraph
    edge_map: dict      # old edge -> new edge, for every edge except the collapsed one
    vertex_map: tuple   # old vertex -> new vertex


def collapse_edge(G: HalfEdgeGraph, e: int) -> Collapse:
    a, b = G.ends[e]
    if a == b:
        raise GraphError("cannot collapse a loop")
    keep, gone = min(a, b), max(a, b)
    vmap = []
    for v in range(G.nv):
        if v == gone:
            vmap.append(vmap[keep])
        else:
            vmap.append(v if v < gone else v - 1)
    ends = []
    emap = {}
    for i, (x, y) in enumerate(G.ends):
        if i == e:
            continue
        emap[i] = len(ends)
        ends.append((vmap[x], vmap[y]))
    bp = None if G.basepoint is None else vmap[G.basepoint]
    return Collapse(HalfEdgeGraph(G.nv - 1, tuple(ends), bp), emap, tuple(vmap))


def blow_up(G: HalfEdgeGraph, v: int, first: Sequence[int], second: Sequence[int]):
    """Split ``v`` into two vertices joined by a new edge.

    ``first`` and ``second`` partition the darts at ``v``.  ``v`` keeps the
    darts of ``first`` (and the basepoint, if it is one); the darts of
    ``second`` move to a new vertex ``nv``.  Each part needs two darts, except
    that the part keeping the basepoint may have one.  Returns
    ``(graph, new_edge)``; the new edge is appended last, from ``v`` to the
    new vertex.
    """
    at_v = set(G.darts_at(v))
    if (set(first) | set(second) != at_v or set(first) & set(second)
            or len(first) + len(second) != len(at_v)):
        raise GraphError("blow-up parts must partition the darts at the vertex")
    floor = 1 if v == G.basepoint else 2
    if len(first) < floor or len(second) < 2:
        raise GraphError("blow-up part too small")
    new = G.nv
    ends = [list(p) for p in G.ends]
    for d in second:
        ends[d >> 1][d & 1] = new
    ends.append([v, new])
    return HalfEdgeGraph(G.nv + 1, tuple(map(tuple, ends)), G.basepoint), len(ends) - 1


def blow_up_partitions(G: HalfEdgeGraph, v: int) -> Iterator[tuple]:
    """Every admissible ``(first, second)`` dart partition at ``v``.

    At an ordinary vertex partitions are unordered and listed once.  At the
    basepoint they are ordered, since either new vertex may keep it.
    """
    D = G.darts_at(v)
    n = len(D)
    if v == G.basepoint:
        for mask in range(1, 1 << n):
            A = [D[i] for i in range(n) if mask >> i & 1]
            B = [D[i] for i in range(n) if not mask >> i & 1]
            if len(B) >= 2:
                yield A, B
        return
    for mask in range(1 << (n - 1)):
        A = [D[0]] + [D[i + 1] for i in range(n - 1) if mask >> i & 1]
        B = [D[i + 1] for i in range(n - 1) if not mask >> i & 1]
        if len(A) >= 2 and len(B) >= 2:
            yield A, B


def add_basepoint_loop(G: HalfEdgeGraph) -> HalfEdgeGraph:
    if G.basepoint is None:
        raise GraphError("graph has no basepoint")
    b = G.basepoint
    return HalfEdgeGraph(G.nv, G.ends + ((b, b),), b)


@dataclass(frozen=True)
class Stem:
    graph: HalfEdgeGraph
    stem: int
    halves: tuple = ()   # (tail half, head half) when an edge was subdivided
    midpoint: Optional[int] = None


def attach_stem_to_edge(G: HalfEdgeGraph, e: int) -> Stem:
    """``G[e]``: subdivide ``e`` at a new midpoint and join it to the basepoint.

    The tail half (the side of dart ``2e``) keeps index ``e``; the head half
    and the stem are appended in that order.
    """
    if G.basepoint is None:
        raise GraphError("graph has no basepoint")
    a, b = G.ends[e]
    m = G.nv
    ends = list(G.ends)
    ends[e] = (a, m)
    ends.append((m, b))
    ends.append((G.basepoint, m))
    return Stem(HalfEdgeGraph(G.nv + 1, tuple(ends), G.basepoint),
                stem=len(ends) - 1, halves=(e, len(ends) - 2), midpoint=m)


def attach_stem_to_vertex(G: HalfEdgeGraph, v: int) -> Stem:
    """``G[v]``: a new edge from the basepoint to ``v`` (a loop when ``v`` is it)."""
    if G.basepoint is None:
        raise GraphError("graph has no basepoint")
    if not 0 <= v < G.nv:
        raise GraphError(f"unknown vertex {v}")
    return Stem(HalfEdgeGraph(G.nv, G.ends + ((G.basepoint, v),), G.basepoint),
                stem=G.ne)


def relabel(G: HalfEdgeGraph, vperm: Sequence[int], eperm: Sequence[int],
            flips: Sequence[bool] = ()) -> HalfEdgeGraph:
    """Isomorphic copy: vertex ``v`` becomes ``vperm[v]``, edge ``i`` becomes ``eperm[i]``."""
    ends = [None] * G.ne
    for i, (a, b) in enumerate(G.ends):
        if flips and flips[i]:
            a, b = b, a
        ends[eperm[i]] = (vperm[a], vperm[b])
    bp = None if G.basepoint is None else vperm[G.basepoint]
    return HalfEdgeGraph(G.nv, tuple(ends), bp)


# -- forests of polygon unions -----------------------------------------------

def maximal_forests_of_polygon_union(polygons: Sequence[Sequence[int]]) -> Iterator[tuple]:
    """Maximal forests of a disjoint union of ordered polygons.

    Each polygon is the ordered list ``e_1 .. e_d`` of its edges.  A maximal
    forest drops exactly one edge per polygon; the forest comes back ordered
    as the concatenation of the polygons.  Yields ``(forest, deleted, sign)``
    where ``deleted`` holds the 1-based index dropped in each polygon and
    ``sign`` is the product of ``(-1)**j`` over those indices.
    """
    flat = [e for p in polygons for e in p]
    if len(set(flat)) != len(flat):
        raise GraphError("polygons overlap")
    for choice in product(*(range(len(p)) for p in polygons)):
        forest = []
        sign = 1
        for p, j in zip(polygons, choice):
            forest.extend(p[:j])
            forest.extend(p[j + 1:])
            if j % 2 == 0:   # 1-based index j+1 is odd
                sign = -sign
        yield tuple(forest), tuple(j + 1 for j in choice), sign
