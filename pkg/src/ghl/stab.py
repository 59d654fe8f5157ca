"""Stabilization of basepointed Morita cycles and the chain that bounds it.

Notation follows the blow-up layout of :mod:`ghl.morita`.  The base polygon
``C_1`` has ``m = 2k+1`` sides ``e_1 .. e_m`` and corners ``v_0 = b, v_1 ..
v_{2k}``; ``e_i`` runs from ``v_{i-1}`` to ``v_i`` and ``f_i`` is the edge of
gamma attached at ``v_i``.  All chains built here live in rank ``n+1`` of the
basepointed complex, where ``n`` is the rank of ``G^sigma``.

The builders never share code with the boundary operators: lemma checks
compare ``d_C`` of one built chain against other built chains.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .canon import canonicalize, cell_from_key
from .complex import Chain, _finish, boundary, chain_to_text, d_C, d_R
from .halfedge import (
    add_basepoint_loop, attach_stem_to_edge, attach_stem_to_vertex, collapse_edge,
    maximal_forests_of_polygon_union,
)
from .morita import (
    BlowUp, GammaError, VertexOrientedGraph, base_forests, blowup_rank, chain_dimension,
    inadmissibility_reason, layout, parallel_accumulate, z,
)

__all__ = [
    "StabContext", "StabilityCertificate", "build_W", "build_X", "build_Y", "build_Yprime",
    "build_alpha", "build_beta", "build_gamma_e", "stabilize", "verify_stable_triviality",
]


class StabError(ValueError):
    pass


def stabilize(c: Chain) -> Chain:
    """Add a loop at the basepoint of every term."""
    if c.variant != "aut":
        raise StabError("stabilization needs a basepointed chain")
    acc: dict = {}
    for key, coeff in c.terms.items():
        G, F = cell_from_key(key)
        res = canonicalize(add_basepoint_loop(G), F, check=False)
        if not res.orientation_reversing:
            acc[res.key] = acc.get(res.key, 0) + coeff * res.sign
    return _finish(acc, c.rank + 1, "aut", c.dim)


@dataclass
class StabContext:
    gamma: VertexOrientedGraph
    workers: int = 1
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        reason = inadmissibility_reason(self.gamma)
        if reason is not None:
            raise GammaError(f"inadmissible gamma: {reason}")
        self.layout = layout(self.gamma, True)
        self.sides = self.layout.polygons[0]          # e_1 .. e_m
        self.m = len(self.sides)
        if self.m % 2 == 0 or self.m < 3:
            raise GammaError("base polygon must have an odd number >= 3 of sides")
        self.k = (self.m - 1) // 2
        self.rank = blowup_rank(self.gamma) + 1
        self.dim = chain_dimension(self.gamma)
        self.forests = base_forests(self.layout)

    def corner(self, i: int) -> int:
        """Vertex ``v_i`` of ``G^sigma`` (``v_0 = v_m = b``)."""
        return self.layout.corners[0][(i - 1) % self.m]

    def side(self, i: int) -> int:
        """Edge index of ``e_i``, cyclically (``e_0 = e_m``)."""
        return self.sides[(i - 1) % self.m]

    def _sum(self, builder: Callable, dim: int) -> Chain:
        acc = parallel_accumulate(self.gamma, True, builder, self.workers, self.stats)
        return _finish(acc, self.rank, "aut", dim)


def _index(ctx: StabContext, i: int, lo: int, hi: int, what: str) -> None:
    if not lo <= i <= hi:
        raise StabError(f"{what} index {i} outside {lo}..{hi}")


# -- builders (module level so that worker processes can pickle them) --------

class _Alpha:
    def __init__(self, ctx: StabContext, i: int):
        self.v = ctx.corner(i)
        self.forests = ctx.forests

    def __call__(self, bu: BlowUp):
        yield attach_stem_to_vertex(bu.graph, self.v).graph, self.forests


class _X:
    def __init__(self, ctx: StabContext, i: int, first_half_at_start: bool = False):
        self.e = ctx.side(i)
        self.i = i
        self.first = first_half_at_start
        self.lay = ctx.layout
        self.forests = None

    def __call__(self, bu: BlowUp):
        st = attach_stem_to_edge(bu.graph, self.e)
        if self.forests is None:
            tail, head = st.halves        # tail half touches v_{i-1}
            halves = [tail, head] if self.first else [head, tail]
            c1 = list(self.lay.polygons[0])
            c1[self.i - 1:self.i] = halves
            polys = [tuple(c1)] + list(self.lay.polygons[1:])
            self.forests = [(f, s) for f, _, s in maximal_forests_of_polygon_union(polys)]
        yield st.graph, self.forests


class _Stem:
    """Y_i (half of f_i at v_i appended) or Y'_i (stem appended)."""

    def __init__(self, ctx: StabContext, i: int, prime: bool):
        self.i = i
        self.prime = prime
        self.forests = ctx.forests

    def __call__(self, bu: BlowUp):
        d = bu.corner_dart(0, self.i)
        st = attach_stem_to_edge(bu.graph, d >> 1)
        extra = st.stem if self.prime else st.halves[d & 1]
        yield st.graph, [(f + (extra,), s) for f, s in self.forests]


class _Collapsed:
    """beta(e_i) (stem appended) or gamma(e_i) (half of f at the end of e_i appended)."""

    def __init__(self, ctx: StabContext, i: int, stem_last: bool):
        self.i = i
        self.e = ctx.side(i)
        self.stem_last = stem_last
        self.lay = ctx.layout
        self.forests = None

    def __call__(self, bu: BlowUp):
        col = collapse_edge(bu.graph, self.e)
        em = col.edge_map
        d = bu.corner_dart(0, self.i)      # f attaches at v_i; v_m is v_0
        f = em[d >> 1]
        st = attach_stem_to_edge(col.graph, f)
        if self.forests is None:
            c1 = [em[x] for x in self.lay.polygons[0] if x != self.e]
            polys = [tuple(c1)] + [tuple(em[x] for x in p) for p in self.lay.polygons[1:]]
            self.forests = [(fo, s) for fo, _, s in maximal_forests_of_polygon_union(polys)]
        extra = st.stem if self.stem_last else st.halves[d & 1]
        yield st.graph, [(fo + (extra,), s) for fo, s in self.forests]


class _Combination:
    """Integer combination of several builders over the same sigma."""

    def __init__(self, parts):
        self.parts = parts

    def __call__(self, bu: BlowUp):
        for coeff, b in self.parts:
            for g, forests in b(bu):
                yield g, [(f, coeff * s) for f, s in forests]


# -- public constructors ------------------------------------------------------

def build_alpha(ctx: StabContext, i: int) -> Chain:
    """``alpha(v_i)``: a stem from ``b`` to ``v_i``; ``alpha(v_0)`` is the stabilized cycle."""
    _index(ctx, i, 0, ctx.m - 1, "vertex")
    return ctx._sum(_Alpha(ctx, i), ctx.dim)


def build_X(ctx: StabContext, i: int, first_half_at_start: bool = False) -> Chain:
    """``X_i`` over the subdivided polygon.

    By default the half of ``e_i`` at ``v_i`` takes position ``i`` and the half
    at ``v_{i-1}`` position ``i+1``; the other order negates the chain.
    """
    _index(ctx, i, 1, ctx.m, "edge")
    return ctx._sum(_X(ctx, i, first_half_at_start), ctx.dim + 1)


def build_Y(ctx: StabContext, i: int) -> Chain:
    _index(ctx, i, 1, ctx.m - 1, "vertex")
    return ctx._sum(_Stem(ctx, i, prime=False), ctx.dim + 1)


def build_Yprime(ctx: StabContext, i: int) -> Chain:
    _index(ctx, i, 1, ctx.m - 1, "vertex")
    return ctx._sum(_Stem(ctx, i, prime=True), ctx.dim + 1)


def build_beta(ctx: StabContext, i: int) -> Chain:
    _index(ctx, i, 1, ctx.m, "edge")
    return ctx._sum(_Collapsed(ctx, i, stem_last=True), ctx.dim)


def build_gamma_e(ctx: StabContext, i: int) -> Chain:
    _index(ctx, i, 1, ctx.m, "edge")
    return ctx._sum(_Collapsed(ctx, i, stem_last=False), ctx.dim)


def W_coefficients(k: int) -> dict:
    """Rational coefficients of the pieces of ``W``: ``'Y'``, ``'Y\\''`` and ``X_j``."""
    out = {"Y": Fraction(1, 2 * k), "Y'": Fraction(-1, 2 * k)}
    for j in range(1, k + 1):
        out[j] = Fraction((-1) ** (j + 1) * (k - j + 1), k)
    return out


def build_W(ctx: StabContext) -> Chain:
    """``(Y - Y')/2k + sum_j (-1)^(j+1) (k-j+1)/k X_j``, in one sigma pass."""
    k = ctx.k
    coeffs = W_coefficients(k)
    scale = 2 * k            # makes every coefficient an integer
    parts = []
    for i in range(1, ctx.m):
        parts.append((int(coeffs["Y"] * scale), _Stem(ctx, i, prime=False)))
        parts.append((int(coeffs["Y'"] * scale), _Stem(ctx, i, prime=True)))
    for j in range(1, k + 1):
        parts.append((int(coeffs[j] * scale), _X(ctx, j)))
    return ctx._sum(_Combination(parts), ctx.dim + 1) * Fraction(1, scale)


# -- certification --------------------------------------------------------------

@dataclass
class StabilityCertificate:
    gamma_name: str
    rank: int
    dim: int
    Zplus: Chain
    W: Chain
    dR_W: Chain
    dC_W: Chain
    seconds: float

    @property
    def d_R_vanishes(self) -> bool:
        return not self.dR_W

    @property
    def d_C_matches(self) -> bool:
        return self.dC_W == self.Zplus

    @property
    def certified(self) -> bool:
        return bool(self.Zplus) and self.d_R_vanishes and self.d_C_matches

    def report(self) -> str:
        lines = [
            f"gamma: {self.gamma_name}",
            f"rank: {self.rank} (aut)",
            f"Z+ dimension: {self.dim}, terms: {len(self.Zplus)}",
            f"W dimension: {self.dim + 1}, terms: {len(self.W)}",
            f"d_R(W) terms: {len(self.dR_W)}",
            f"d_C(W) - Z+ terms: {len(self.dC_W - self.Zplus)}",
            f"seconds: {self.seconds:.2f}",
        ]
        if self.certified:
            lines.append("RESULT: BOUNDARY-CERTIFIED")
        else:
            lines.append("RESULT: FAILED")
            diff = boundary(self.W) - self.Zplus
            lines.append("difference boundary(W) - Z+:")
            lines.extend(chain_to_text(diff).splitlines()[1:])
        return "\n".join(lines) + "\n"


def verify_stable_triviality(gamma: VertexOrientedGraph, base_vertex: Optional[int] = None,
                             workers: int = 1) -> StabilityCertificate:
    t0 = time.perf_counter()
    if base_vertex is not None:
        gamma = gamma.with_base(base_vertex)
    ctx = StabContext(gamma, workers)
    Zp = stabilize(z(gamma, basepointed=True, workers=workers))
    W = build_W(ctx)
    cert = StabilityCertificate(gamma.name, ctx.rank, ctx.dim, Zp, W, d_R(W), d_C(W),
                                time.perf_counter() - t0)
    return cert
