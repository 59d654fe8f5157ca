"""Vertex-oriented graphs, Morita cycles ``z(gamma)`` and the Morita cocycle.

The blow-up ``G^sigma`` replaces each vertex ``x`` of ``gamma`` by a polygon
with corners ``v_1 .. v_d`` (``v_0 = v_d``) and sides ``e_1 .. e_d``, side
``e_i`` running from ``v_{i-1}`` to ``v_i``.  The ``j``-th dart of the
orientation at ``x`` is re-attached at corner ``v_{sigma_x(j)}``.

Edge numbering of ``G^sigma`` is independent of ``sigma``: the edges of
``gamma`` keep their indices and the polygon sides follow, block by block,
the base vertex's polygon first.  So the forest bookkeeping is computed once
and only the attachment of the external darts varies.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .canon import (
    aut_order_graph, canon_forest, graph_canon, key_aut_order, permutation_parity,
    _key_string,
)
from .complex import Chain, _finish
from .halfedge import (
    GraphError, HalfEdgeGraph, components, is_connected, maximal_forests_of_polygon_union,
    rank, valences,
)


class GammaError(ValueError):
    """Malformed or inadmissible vertex-oriented graph."""


@dataclass(frozen=True)
class VertexOrientedGraph:
    graph: HalfEdgeGraph
    orientations: tuple          # per vertex, the darts at it in orientation order
    name: str = "gamma"
    base: int = 0
    edge_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "orientations", tuple(tuple(o) for o in self.orientations))
        G = self.graph
        if G.basepoint is not None:
            raise GammaError("gamma carries no basepoint")
        if len(self.orientations) != G.nv:
            raise GammaError("one orientation per vertex required")
        for v, o in enumerate(self.orientations):
            if sorted(o) != G.darts_at(v):
                raise GammaError(f"orientation at vertex {v} must list each dart there once")
        if not 0 <= self.base < G.nv:
            raise GammaError("base vertex out of range")

    @property
    def valences(self) -> list:
        return valences(self.graph)

    def reoriented(self, v: int, perm: Sequence[int]) -> "VertexOrientedGraph":
        """Copy with the orientation at ``v`` permuted (``new[j] = old[perm[j]]``)."""
        o = list(self.orientations)
        o[v] = tuple(o[v][p] for p in perm)
        return VertexOrientedGraph(self.graph, o, self.name, self.base, self.edge_names)

    def with_base(self, base: int) -> "VertexOrientedGraph":
        return VertexOrientedGraph(self.graph, self.orientations, self.name, base,
                                   self.edge_names)


def is_admissible(gamma: VertexOrientedGraph) -> bool:
    return is_connected(gamma.graph) and all(x >= 3 and x % 2 for x in gamma.valences)


def inadmissibility_reason(gamma: VertexOrientedGraph) -> Optional[str]:
    if not is_connected(gamma.graph):
        return "disconnected"
    if any(x % 2 == 0 for x in gamma.valences):
        return "even valence"
    if any(x < 3 for x in gamma.valences):
        return "valence below 3"
    return None


# -- fixtures and the text format ------------------------------------------------

def make_gamma(nv: int, edges: Sequence[Tuple[int, int]], name: str = "gamma",
               base: int = 0, orient: Optional[dict] = None) -> VertexOrientedGraph:
    """Vertex-oriented graph with the default orientation (darts in increasing order)."""
    G = HalfEdgeGraph(nv, tuple(edges))
    o = [tuple(G.darts_at(v)) for v in range(nv)]
    if orient:
        for v, darts in orient.items():
            o[v] = tuple(darts)
    return VertexOrientedGraph(G, o, name, base,
                               tuple(f"e{i}" for i in range(len(edges))))


def theta_gamma() -> VertexOrientedGraph:
    return make_gamma(2, [(0, 1)] * 3, "theta")


def banana_gamma(k: int) -> VertexOrientedGraph:
    return make_gamma(2, [(0, 1)] * k, f"banana{k}")


def k4_gamma() -> VertexOrientedGraph:
    return make_gamma(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], "K4")


def parse_gamma(text: str) -> VertexOrientedGraph:
    """Parse the ``gamma``/``vertices``/``edge``/``orient``/``base`` format."""
    name = None
    nv = None
    edges: List[Tuple[str, int, int]] = []
    orients: Dict[int, Tuple[int, List[str]]] = {}
    base = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        try:
            if word == "gamma":
                name = rest[0] if rest else "gamma"
            elif word == "vertices":
                (k,) = rest
                nv = int(k)
            elif word == "edge":
                en, u, v = rest
                edges.append((en, int(u), int(v)))
            elif word == "orient":
                v, spec = rest
                orients[int(v)] = (lineno, [d.strip() for d in spec.split(",") if d.strip()])
            elif word == "base":
                (v,) = rest
                base = int(v)
            else:
                raise GammaError(f"line {lineno}: unknown directive {word!r}")
        except (ValueError, IndexError):
            raise GammaError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if name is None:
        raise GammaError("missing 'gamma <name>' line")
    if nv is None:
        raise GammaError("missing 'vertices <k>' line")
    names = [e[0] for e in edges]
    if len(set(names)) != len(names):
        raise GammaError("duplicate edge name")
    index = {n: i for i, n in enumerate(names)}
    for en, u, v in edges:
        if not (0 <= u < nv and 0 <= v < nv):
            raise GammaError(f"edge {en}: vertex out of range")
    try:
        G = HalfEdgeGraph(nv, tuple((u, v) for _, u, v in edges))
    except GraphError as exc:
        raise GammaError(str(exc)) from None
    o = []
    for v in range(nv):
        if v not in orients:
            raise GammaError(f"missing orient line for vertex {v}")
        lineno, ds = orients[v]
        darts = []
        for d in ds:
            try:
                en, side = d.rsplit(".", 1)
                dart = 2 * index[en] + int(side)
                if side not in ("0", "1"):
                    raise ValueError
            except (ValueError, KeyError):
                raise GammaError(f"line {lineno}: bad dart {d!r}") from None
            if G.vertex_of(dart) != v:
                raise GammaError(f"line {lineno}: dart {d} is not at vertex {v}")
            darts.append(dart)
        if sorted(darts) != G.darts_at(v):
            raise GammaError(f"line {lineno}: orient {v} must list every dart at {v} exactly once")
        o.append(tuple(darts))
    if not 0 <= base < nv:
        raise GammaError("base vertex out of range")
    return VertexOrientedGraph(G, o, name, base, tuple(names))


def format_gamma(gamma: VertexOrientedGraph) -> str:
    names = gamma.edge_names or tuple(f"e{i}" for i in range(gamma.graph.ne))
    lines = [f"gamma {gamma.name}", f"vertices {gamma.graph.nv}"]
    for i, (u, v) in enumerate(gamma.graph.ends):
        lines.append(f"edge {names[i]} {u} {v}")
    for v, o in enumerate(gamma.orientations):
        lines.append(f"orient {v} " + ",".join(f"{names[d >> 1]}.{d & 1}" for d in o))
    lines.append(f"base {gamma.base}")
    return "\n".join(lines) + "\n"


# -- blow-ups ----------------------------------------------------------------------

@dataclass(frozen=True)
class BlowUpLayout:
    """The sigma-independent part of ``G^sigma``."""
    blocks: tuple      # gamma vertex of each polygon block, base first
    polygons: tuple    # per block, the side edges e_1 .. e_d
    corners: tuple     # per block, the corner vertices v_1 .. v_d (v_d is v_0)
    nv: int
    basepoint: Optional[int]
    poly_ends: tuple   # ends of the side edges, in edge order


def layout(gamma: VertexOrientedGraph, basepointed: bool) -> BlowUpLayout:
    G = gamma.graph
    blocks = (gamma.base,) + tuple(v for v in range(G.nv) if v != gamma.base)
    val = valences(G)
    polygons, corners, poly_ends = [], [], []
    vbase = 0
    ebase = G.ne
    for x in blocks:
        d = val[x]
        cs = tuple(vbase + i for i in range(d))
        corners.append(cs)
        polygons.append(tuple(ebase + i for i in range(d)))
        for i in range(d):
            poly_ends.append((cs[i - 1], cs[i]))
        vbase += d
        ebase += d
    bp = corners[0][-1] if basepointed else None
    return BlowUpLayout(blocks, tuple(polygons), tuple(corners), vbase, bp, tuple(poly_ends))


@dataclass(frozen=True)
class BlowUp:
    graph: HalfEdgeGraph
    layout: BlowUpLayout
    sigma: tuple
    sign: int
    attached: tuple    # per block, the dart of gamma sitting at v_1 .. v_d

    @property
    def polygons(self) -> tuple:
        return self.layout.polygons

    def corner_dart(self, block: int, i: int) -> int:
        """Dart of ``G^sigma`` at corner ``v_i`` (``i`` in ``0..d``, 0 and d agree)."""
        return self.attached[block][(i - 1) % len(self.attached[block])]


def is_permutation_family(gamma: VertexOrientedGraph, sigma: Sequence[Sequence[int]]) -> bool:
    val = gamma.valences
    return len(sigma) == len(val) and all(
        sorted(s) == list(range(val[x])) for x, s in enumerate(sigma))


def blow_up_gamma(gamma: VertexOrientedGraph, sigma: Sequence[Sequence[int]],
                  basepointed: bool = False, lay: Optional[BlowUpLayout] = None) -> BlowUp:
    """``G^sigma``; ``sigma[x][j]`` is the 0-based corner taking the ``j``-th dart at ``x``."""
    if not is_permutation_family(gamma, sigma):
        raise GammaError("sigma must hold one permutation per vertex")
    if lay is None:
        lay = layout(gamma, basepointed)
    G = gamma.graph
    ends = [[0, 0] for _ in range(G.ne)]
    attached = []
    sign = 1
    for bi, x in enumerate(lay.blocks):
        s = sigma[x]
        at = [None] * len(s)
        for j, d in enumerate(gamma.orientations[x]):
            ends[d >> 1][d & 1] = lay.corners[bi][s[j]]
            at[s[j]] = d
        attached.append(tuple(at))
        sign *= permutation_parity(s)
    g = HalfEdgeGraph(lay.nv, tuple(map(tuple, ends)) + lay.poly_ends, lay.basepoint)
    return BlowUp(g, lay, tuple(tuple(s) for s in sigma), sign, tuple(attached))


def sigma_families(gamma: VertexOrientedGraph) -> Iterable[tuple]:
    val = gamma.valences
    return itertools.product(*(itertools.permutations(range(d)) for d in val))


# -- sigma sums ------------------------------------------------------------------

# A builder turns one blow-up into (graph, [(forest, coeff), ...]) pieces.
Builder = Callable[[BlowUp], Iterable[Tuple[HalfEdgeGraph, Sequence[Tuple[tuple, int]]]]]


def accumulate(gamma: VertexOrientedGraph, basepointed: bool, builder: Builder,
               sigmas: Optional[Iterable[tuple]] = None, stats: Optional[dict] = None) -> dict:
    """Sum ``eps_sigma * builder(G^sigma)`` over sigma into a key -> int map."""
    lay = layout(gamma, basepointed)
    acc: dict = {}
    raw = 0
    for sigma in (sigma_families(gamma) if sigmas is None else sigmas):
        bu = blow_up_gamma(gamma, sigma, basepointed, lay)
        for g, forests in builder(bu):
            gc = graph_canon(g, cache=False)
            ends = g.ends
            for forest, c in forests:
                raw += 1
                fp, s, _, rev = canon_forest(gc, ends, forest)
                if rev:
                    continue
                k = _key_string(gc, fp)
                acc[k] = acc.get(k, 0) + bu.sign * c * s
    if stats is not None:
        stats["raw_terms"] = stats.get("raw_terms", 0) + raw
    return acc


def _pool_task(args):
    gamma, basepointed, builder, sigmas = args
    stats: dict = {}
    return accumulate(gamma, basepointed, builder, sigmas, stats), stats["raw_terms"] if stats else 0


def parallel_accumulate(gamma: VertexOrientedGraph, basepointed: bool, builder: Builder,
                        workers: int = 1, stats: Optional[dict] = None) -> dict:
    """Like :func:`accumulate`, fanning sigma slices out to worker processes.

    Integer addition is exact and the merge is keyed, so the result does not
    depend on the number of workers or their scheduling.
    """
    if workers <= 1:
        return {k: v for k, v in accumulate(gamma, basepointed, builder, stats=stats).items() if v}
    import multiprocessing as mp
    sig = list(sigma_families(gamma))
    n = max(1, min(len(sig), workers * 8))
    chunks = [sig[i::n] for i in range(n)]
    acc: dict = {}
    raw = 0
    with mp.get_context("fork").Pool(workers) as pool:
        for part, r in pool.imap(_pool_task, [(gamma, basepointed, builder, c) for c in chunks]):
            raw += r
            for k, v in part.items():
                acc[k] = acc.get(k, 0) + v
    if stats is not None:
        stats["raw_terms"] = stats.get("raw_terms", 0) + raw
    return {k: v for k, v in acc.items() if v}


def base_forests(lay: BlowUpLayout) -> list:
    """``(forest, eps_F)`` over the maximal forests of the polygon union."""
    return [(f, s) for f, _, s in maximal_forests_of_polygon_union(lay.polygons)]


class _ZBuilder:
    def __init__(self, lay: BlowUpLayout):
        self.forests = base_forests(lay)

    def __call__(self, bu: BlowUp):
        yield bu.graph, self.forests


def chain_dimension(gamma: VertexOrientedGraph) -> int:
    return sum(x - 1 for x in gamma.valences)


def blowup_rank(gamma: VertexOrientedGraph) -> int:
    return rank(gamma.graph) + gamma.graph.nv


def z(gamma: VertexOrientedGraph, basepointed: bool = False, base_vertex: Optional[int] = None,
      workers: int = 1, stats: Optional[dict] = None) -> Chain:
    """The Morita cycle ``sum_sigma sum_F eps_sigma eps_F (G^sigma, F)``."""
    reason = inadmissibility_reason(gamma)
    if reason == "even valence":
        # the sum cancels in pairs; return the zero chain without expanding it
        pass
    elif reason is not None:
        raise GammaError(f"inadmissible gamma: {reason}")
    if base_vertex is not None:
        gamma = gamma.with_base(base_vertex)
    lay = layout(gamma, basepointed)
    acc = parallel_accumulate(gamma, basepointed, _ZBuilder(lay), workers, stats)
    return _finish(acc, blowup_rank(gamma), "aut" if basepointed else "out",
                   chain_dimension(gamma))


# -- vertex-oriented graph classes --------------------------------------------------

@dataclass(frozen=True)
class GammaClass:
    """Canonical class of a vertex-oriented graph: key plus orientation sign."""
    key: str
    sign: int            # the input equals sign * (canonical reference orientation)
    degenerate: bool     # admits an orientation-reversing automorphism


_DEGENERATE: dict = {}


def _canonical_darts(G: HalfEdgeGraph, lab: Sequence[int], cedges: Sequence[tuple]):
    """Map darts of ``G`` to darts of the canonical graph under vertex labeling ``lab``."""
    slots: dict = {}
    for c, (a, b, _) in enumerate(cedges):
        slots.setdefault((a, b), []).append(c)
    used: dict = {}
    dmap = [0] * (2 * G.ne)
    for e, (a, b) in enumerate(G.ends):
        x, y = lab[a], lab[b]
        p = (x, y) if x <= y else (y, x)
        i = used.get(p, 0)
        used[p] = i + 1
        c = slots[p][i]
        if x <= y:
            dmap[2 * e], dmap[2 * e + 1] = 2 * c, 2 * c + 1
        else:
            dmap[2 * e], dmap[2 * e + 1] = 2 * c + 1, 2 * c
    return dmap


def _reference_orientation(nv: int, cedges: Sequence[tuple]) -> list:
    at = [[] for _ in range(nv)]
    for c, (a, b, _) in enumerate(cedges):
        at[a].append(2 * c)
        at[b].append(2 * c + 1)
    return at


def _dart_automorphisms(gc):
    """Every dart automorphism of the canonical graph of ``gc``."""
    nv, _, cedges = gc.cert
    lab0 = gc.labelings[0]
    inv0 = [0] * nv
    for v, l in enumerate(lab0):
        inv0[l] = v
    groups: dict = {}
    for c, (a, b, _) in enumerate(cedges):
        groups.setdefault((a, b), []).append(c)
    for lab in gc.labelings:
        pi = [lab[inv0[u]] for u in range(nv)]
        choices = []
        for (a, b), cs in groups.items():
            x, y = pi[a], pi[b]
            tgt = groups[(x, y) if x <= y else (y, x)]
            flips = [(False, True)] * len(cs) if a == b else [(x > y,)] * len(cs)
            choices.append([(cs, perm, fl) for perm in itertools.permutations(tgt)
                            for fl in itertools.product(*flips)])
        for combo in itertools.product(*choices):
            phi = [0] * (2 * len(cedges))
            for cs, perm, fl in combo:
                for c, c2, f in zip(cs, perm, fl):
                    phi[2 * c], phi[2 * c + 1] = (2 * c2 + 1, 2 * c2) if f else (2 * c2, 2 * c2 + 1)
            yield pi, phi


def _orientation_sign(phi, ref, pi) -> int:
    s = 1
    for v, darts in enumerate(ref):
        s *= permutation_parity([phi[d] for d in darts])
    return s


def gamma_class(G: HalfEdgeGraph, orientations: Sequence[Sequence[int]]) -> GammaClass:
    gc = graph_canon(G.with_basepoint(None) if G.basepoint is not None else G)
    nv, _, cedges = gc.cert
    key = "gamma:" + gc.prefix
    deg = _DEGENERATE.get(key)
    ref = _reference_orientation(nv, cedges)
    if deg is None:
        deg = any(_orientation_sign(phi, ref, pi) < 0 for pi, phi in _dart_automorphisms(gc))
        _DEGENERATE[key] = deg
    lab = gc.labelings[0]
    dmap = _canonical_darts(G, lab, cedges)
    sign = 1
    for v, o in enumerate(orientations):
        sign *= permutation_parity([dmap[d] for d in o])
    return GammaClass(key, sign, deg)


def gamma_key(gamma: VertexOrientedGraph) -> GammaClass:
    return gamma_class(gamma.graph, gamma.orientations)


def has_orientation_reversing_automorphism(gamma: VertexOrientedGraph) -> bool:
    return gamma_key(gamma).degenerate


# -- the Morita cocycle ------------------------------------------------------------

GSpaceElement = Dict[str, int]


def _polygon_completions(G: HalfEdgeGraph, F: Sequence[int]):
    """Ways to close each forest path into an odd polygon; ``None`` if impossible."""
    nv = G.nv
    if any(x != 3 for x in valences(G)):
        return None
    fdeg = [0] * nv
    for e in F:
        a, b = G.ends[e]
        fdeg[a] += 1
        fdeg[b] += 1
    if any(d == 0 or d > 2 for d in fdeg):
        return None
    comp = components(nv, [G.ends[e] for e in F])
    paths: dict = {}
    for e in F:
        paths.setdefault(comp[G.ends[e][0]], []).append(e)
    out = []
    fset = set(F)
    for root, es in sorted(paths.items()):
        if len(es) % 2 or len(es) < 2:
            return None
        endpoints = [v for v in range(nv) if comp[v] == root and fdeg[v] == 1]
        s, t = endpoints
        closers = [e for e in range(G.ne) if e not in fset and set(G.ends[e]) == {s, t}]
        if not closers:
            return None
        # walk the path from s to t
        adj: dict = {}
        for e in es:
            a, b = G.ends[e]
            adj.setdefault(a, []).append((b, e))
            adj.setdefault(b, []).append((a, e))
        walk_v, walk_e = [s], []
        prev = None
        while walk_v[-1] != t:
            v = walk_v[-1]
            for w, e in adj[v]:
                if e != prev:
                    walk_v.append(w)
                    walk_e.append(e)
                    prev = e
                    break
        out.append((walk_v, walk_e, closers))
    return out


def mu(G: HalfEdgeGraph, F: Sequence[int]) -> GSpaceElement:
    """Morita cocycle of one oriented cell, as canonical gamma key -> coefficient."""
    paths = _polygon_completions(G, F)
    if paths is None:
        return {}
    order = [e for _, we, _ in paths for e in we]
    pos = {e: i for i, e in enumerate(order)}
    reorder = permutation_parity([pos[e] for e in F])
    result: GSpaceElement = {}
    vblock = {}
    for bi, (wv, _, _) in enumerate(paths):
        for v in wv:
            vblock[v] = bi
    for closing in itertools.product(*(p[2] for p in paths)):
        inside = set(F) | set(closing)
        ext = [e for e in range(G.ne) if e not in inside]
        gends = tuple((vblock[G.ends[e][0]], vblock[G.ends[e][1]]) for e in ext)
        eidx = {e: i for i, e in enumerate(ext)}
        orient = []
        for wv, _, _ in paths:
            darts = []
            for v in wv:
                for i in (0, 1):
                    for e in ext:
                        if G.ends[e][i] == v:
                            darts.append(2 * eidx[e] + i)
            orient.append(darts)
        gamma = HalfEdgeGraph(len(paths), gends)
        cls = gamma_class(gamma, orient)
        if cls.degenerate:
            continue
        result[cls.key] = result.get(cls.key, 0) + reorder * cls.sign
    return {k: v for k, v in result.items() if v}


def mu_gamma(gamma: VertexOrientedGraph, c) -> Fraction:
    """Coefficient of ``gamma`` in ``mu`` of a chain (or of one cell key)."""
    from .canon import cell_from_key
    g = gamma_key(gamma)
    if g.degenerate:
        raise GammaError("gamma has an orientation-reversing automorphism")
    items = [(c, 1)] if isinstance(c, str) else c.terms.items()
    total = Fraction(0)
    for key, coeff in items:
        G, F = cell_from_key(key)
        val = mu(G.with_basepoint(None) if G.basepoint is not None else G, F).get(g.key)
        if val:
            total += coeff * val * g.sign
    return total


def c_gamma(gamma: VertexOrientedGraph) -> int:
    """``|Aut(gamma)| * prod_v 2|v|`` with dart-level automorphisms."""
    return aut_order_graph(gamma.graph) * math.prod(2 * x for x in gamma.valences)


def vertex_aut_order(gamma: VertexOrientedGraph) -> int:
    """Automorphisms counted as vertex permutations only."""
    return len(graph_canon(gamma.graph).labelings)


@dataclass
class PairingReport:
    gamma: str
    cells: int
    support: int
    constant: Optional[Fraction]
    consistent: bool
    c_gamma: int
    aut_dart: int
    aut_vertex: int
    violations: list = field(default_factory=list)

    @property
    def matches(self) -> bool:
        return self.consistent and self.constant == self.c_gamma

    def convention(self) -> Optional[str]:
        prod = self.c_gamma // self.aut_dart
        hits = []
        if self.constant == self.aut_dart * prod:
            hits.append("dart automorphisms")
        if self.constant == self.aut_vertex * prod:
            hits.append("vertex automorphisms")
        return " and ".join(hits) if hits else None


def verify_pairing_theorem(gamma: VertexOrientedGraph, cells: Sequence[str],
                           zchain: Optional[Chain] = None, workers: int = 1) -> PairingReport:
    """Check ``<z(gamma), X> = c * mu_gamma(X)`` for one constant over ``cells``."""
    if zchain is None:
        zchain = z(gamma, workers=workers)
    const = None
    ok = True
    support = 0
    bad = []
    for key in cells:
        lhs = zchain[key] * key_aut_order(key)
        rhs = mu_gamma(gamma, key)
        if rhs == 0:
            if lhs != 0:
                ok = False
                bad.append((key, lhs, rhs))
            continue
        support += 1
        ratio = lhs / rhs
        if const is None:
            const = ratio
        elif ratio != const:
            ok = False
            bad.append((key, lhs, rhs))
    if const is None or const == 0:
        ok = False
    return PairingReport(gamma.name, len(cells), support, const, ok, c_gamma(gamma),
                         aut_order_graph(gamma.graph), vertex_aut_order(gamma), bad)
