"""Canonical forms and automorphism counts for graphs and forested cells.

A graph is labeled canonically by colour refinement followed by an
exhaustive individualisation search.  The search is not pruned by
automorphisms, so the leaves realising the least certificate are exactly the
canonical labelings; there are ``|Aut|`` of them at the vertex level.  That
set is what makes forests cheap: the canonical form of a cell ``(G, F)`` is
the least image of ``F`` under the canonical labelings of ``G``, and the
labelings attaining it are the automorphisms of the cell.

Automorphisms here are dart bijections.  Vertex-level automorphisms of a
multigraph extend to dart automorphisms in ``prod(m!) * prod(l! * 2**l)``
ways (``m`` the multiplicity of a parallel class outside the forest, ``l``
the number of loops at a vertex); forest edges never sit in a parallel class
with another forest edge, so those extra symmetries never move the forest.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Optional, Sequence

from .halfedge import GraphError, HalfEdgeGraph, is_connected, is_forest, is_minimal

__all__ = [
    "CanonResult", "CellKey", "GraphCanon", "aut_order_graph", "canonicalize",
    "cell_from_key", "graph_canon", "key_aut_order", "permutation_parity",
    "signed_iso_count",
]

CellKey = str


def permutation_parity(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    seen = [False] * len(seq)
    order = sorted(range(len(seq)), key=seq.__getitem__)
    # cycle decomposition of the sorting permutation
    for i in range(len(seq)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class GraphCanon:
    """Canonical labeling data of a (vertex/edge coloured) multigraph."""
    cert: tuple          # (nv, basepoint label or -1, sorted canonical edges)
    labelings: tuple     # every canonical labeling, as vertex -> label tuples
    edge_codes: tuple = ()   # per labeling, per input edge: min*nv + max of its labels
    prefix: str = ""         # key text up to the forest part
    first_index: dict = None # edge code -> first canonical edge index with that code

    @property
    def nv(self) -> int:
        return self.cert[0]


def _refine(col, nbrs, nv):
    uniq = sorted(set(col))
    if len(uniq) != max(col) + 1 or uniq[0] != 0:
        index = {c: i for i, c in enumerate(uniq)}
        col = [index[c] for c in col]
    ncls = len(uniq)
    while ncls < nv:
        sigs = [(col[v], tuple(sorted([(col[w], m) for w, m in nbrs[v]])))
                for v in range(nv)]
        uniq = sorted(set(sigs))
        if len(uniq) == ncls:
            break
        index = {s: i for i, s in enumerate(uniq)}
        col = [index[s] for s in sigs]
        ncls = len(uniq)
    return col, ncls


def _graph_canon(nv, ends, basepoint, vcolors=None, ecolors=None):
    # adjacency keyed by neighbour, values count edges per edge colour
    adj = [dict() for _ in range(nv)]
    loops = [dict() for _ in range(nv)]
    for i, (a, b) in enumerate(ends):
        c = ecolors[i] if ecolors is not None else 0
        if a == b:
            loops[a][c] = loops[a].get(c, 0) + 1
        else:
            for x, y in ((a, b), (b, a)):
                d = adj[x].setdefault(y, {})
                d[c] = d.get(c, 0) + 1
    nbrs = [tuple((w, tuple(sorted(cnt.items()))) for w, cnt in adj[v].items())
            for v in range(nv)]
    init = []
    for v in range(nv):
        deg = sum(sum(cnt.values()) for cnt in adj[v].values()) + 2 * sum(loops[v].values())
        init.append((v != basepoint,
                     vcolors[v] if vcolors is not None else 0,
                     deg, tuple(sorted(loops[v].items()))))
    uniq = sorted(set(init))
    index = {s: i for i, s in enumerate(uniq)}
    col0 = [index[s] for s in init]

    edge_list = [(a, b, ecolors[i] if ecolors is not None else 0)
                 for i, (a, b) in enumerate(ends)]
    best = None
    best_labs = []

    def leaf(lab):
        nonlocal best, best_labs
        es = []
        for a, b, c in edge_list:
            x, y = lab[a], lab[b]
            es.append((x, y, c) if x <= y else (y, x, c))
        es.sort()
        cert = tuple(es)
        if best is None or cert < best:
            best = cert
            best_labs = [tuple(lab)]
        elif cert == best:
            best_labs.append(tuple(lab))

    def search(col):
        col, ncls = _refine(col, nbrs, nv)
        if ncls == nv:
            leaf(col)
            return
        sizes = {}
        for c in col:
            sizes[c] = sizes.get(c, 0) + 1
        target = min((s, c) for c, s in sizes.items() if s > 1)[1]
        base = [2 * c + 1 for c in col]
        for v in range(nv):
            if col[v] == target:
                nxt = list(base)
                nxt[v] -= 1
                search(nxt)

    search(col0)
    bl = best_labs[0][basepoint] if basepoint is not None else -1
    codes = []
    for lab in best_labs:
        row = []
        for a, b in ends:
            x, y = lab[a], lab[b]
            row.append(x * nv + y if x <= y else y * nv + x)
        codes.append(tuple(row))
    pairs = [(a, b) for a, b, _ in best]
    first = {}
    for i, (a, b) in enumerate(pairs):
        first.setdefault(a * nv + b, i)
    prefix = "q=%d;b=%s;E=%s;F=" % (nv, "-" if bl < 0 else str(bl),
                                    ",".join("%d-%d" % p for p in pairs))
    return GraphCanon((nv, bl, best), tuple(best_labs), tuple(codes), prefix, first)


_GRAPH_CACHE: dict = {}
_GRAPH_CACHE_MAX = 400_000


def graph_canon(G: HalfEdgeGraph, cache: bool = True) -> GraphCanon:
    """Canonical labeling of an uncoloured graph (basepoint fixed if present)."""
    k = (G.nv, G.ends, G.basepoint)
    got = _GRAPH_CACHE.get(k) if cache else None
    if got is None:
        got = _graph_canon(G.nv, G.ends, G.basepoint)
        if cache:
            if len(_GRAPH_CACHE) >= _GRAPH_CACHE_MAX:
                _GRAPH_CACHE.clear()
            _GRAPH_CACHE[k] = got
    return got


def clear_caches() -> None:
    _GRAPH_CACHE.clear()
    _KEY_CELLS.clear()
    _KEY_AUT.clear()


def _extra_symmetry(nv, canon_edges, forest_codes) -> int:
    """Dart automorphisms fixing every vertex (parallel swaps, loop flips)."""
    forest_pairs = {divmod(c, nv) for c in forest_codes}
    counts = {}
    for a, b, _ in canon_edges:
        counts[(a, b)] = counts.get((a, b), 0) + 1
    out = 1
    for (a, b), m in counts.items():
        if a == b:
            out *= factorial(m) * 2 ** m
        else:
            out *= factorial(m - ((a, b) in forest_pairs))
    return out


@dataclass(frozen=True)
class CanonResult:
    key: CellKey
    sign: int
    aut_order: int
    orientation_reversing: bool


def _key_string(gc: GraphCanon, fcodes) -> str:
    first = gc.first_index
    return gc.prefix + ",".join(map(str, sorted(first[c] for c in fcodes)))


def canon_forest(gc: GraphCanon, ends, forest: Sequence[int]):
    """Canonical forest data of ``(G, forest)`` given the canonical data of ``G``.

    Returns ``(forest_codes, sign, n_vertex_aut, reversing)``; the codes are
    the sorted canonical edge codes ``min*nv + max`` of the forest edges.
    """
    best = None
    hits = []
    for codes in gc.edge_codes:
        row = [codes[e] for e in forest]
        sp = sorted(row)
        if best is None or sp < best:
            best = sp
            hits = [row]
        elif sp == best:
            hits.append(row)
    sign = permutation_parity(hits[0])
    reversing = False
    for row in hits[1:]:
        if permutation_parity(row) != sign:
            reversing = True
            break
    return tuple(best), sign, len(hits), reversing


def cell_canon(G: HalfEdgeGraph, forest: Sequence[int], gc: Optional[GraphCanon] = None):
    """Fast path used by chain builders: ``(key, sign)`` or ``(None, 0)`` if degenerate."""
    if gc is None:
        gc = graph_canon(G)
    fp, sign, _, rev = canon_forest(gc, G.ends, forest)
    if rev:
        return None, 0
    return _key_string(gc, fp), sign


def canonicalize(G: HalfEdgeGraph, F: Sequence[int], basepointed: Optional[bool] = None,
                 check: bool = True) -> CanonResult:
    """Canonical key, orientation sign and automorphism data of the cell ``(G, F)``.

    ``sign`` is the parity of the permutation carrying ``F``'s order to the
    canonical forest order (forest edges sorted by canonical index).
    """
    if basepointed is None:
        basepointed = G.basepoint is not None
    if basepointed and G.basepoint is None:
        raise GraphError("basepointed cell needs a basepoint")
    if not basepointed and G.basepoint is not None:
        G = G.with_basepoint(None)
    F = list(F)
    if check:
        if len(set(F)) != len(F) or not is_forest(G, F):
            raise GraphError("F is not a forest of G")
        if not is_connected(G):
            raise GraphError("cell graph must be connected")
        if not is_minimal(G, basepointed):
            raise GraphError("cell graph must be minimal")
    gc = graph_canon(G)
    fp, sign, nv_aut, rev = canon_forest(gc, G.ends, F)
    aut = nv_aut * _extra_symmetry(gc.nv, gc.cert[2], fp)
    return CanonResult(_key_string(gc, fp), sign, aut, rev)


_KEY_CELLS: dict = {}


def cell_from_key(key: CellKey):
    """Canonical representative ``(graph, forest)`` of a key; forest in canonical order."""
    got = _KEY_CELLS.get(key)
    if got is None:
        try:
            parts = dict(p.split("=", 1) for p in key.split(";"))
            nv = int(parts["q"])
            b = None if parts["b"] == "-" else int(parts["b"])
            ends = tuple(tuple(int(x) for x in t.split("-"))
                         for t in parts["E"].split(",") if t)
            forest = tuple(int(x) for x in parts["F"].split(",") if x)
        except (KeyError, ValueError) as exc:
            raise GraphError(f"malformed cell key {key!r}") from exc
        got = (HalfEdgeGraph(nv, ends, b), forest)
        if len(_KEY_CELLS) > 1_000_000:
            _KEY_CELLS.clear()
        _KEY_CELLS[key] = got
    return got


_KEY_AUT: dict = {}


def key_aut_order(key: CellKey) -> int:
    got = _KEY_AUT.get(key)
    if got is None:
        G, F = cell_from_key(key)
        got = canonicalize(G, F, check=False).aut_order
        _KEY_AUT[key] = got
    return got


def aut_order_graph(G: HalfEdgeGraph, vcolors: Optional[Sequence] = None,
                    ecolors: Optional[Sequence] = None) -> int:
    """Order of the dart automorphism group respecting colours and basepoint."""
    if not is_connected(G):
        raise GraphError("aut_order_graph requires a connected graph")
    gc = _graph_canon(G.nv, G.ends, G.basepoint, vcolors, ecolors)
    counts = {}
    for a, b, c in gc.cert[2]:
        counts[(a, b, c)] = counts.get((a, b, c), 0) + 1
    extra = 1
    for (a, b, _), m in counts.items():
        extra *= factorial(m) * (2 ** m if a == b else 1)
    return len(gc.labelings) * extra


def signed_iso_count(X, Y) -> int:
    """Signed count of orientation-preserving isomorphisms between oriented cells.

    ``X`` and ``Y`` are ``(graph, forest)`` pairs.
    """
    cx = canonicalize(*X)
    cy = canonicalize(*Y)
    if cx.key != cy.key or cx.orientation_reversing or cy.orientation_reversing:
        return 0
    return cx.sign * cy.sign * cx.aut_order
