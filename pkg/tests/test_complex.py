import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ghl.canon import canonicalize
from ghl.complex import (
    Chain, ChainFormatError, EdgeOriented, GradingError, OrderedEdgeGraph, OrientedCell,
    boundary, chain_to_text, d_C, d_R, delta_C, delta_R, dR_cycle_over_forests, edge_d_R,
    key_bigrade, key_dimension, key_rank, pair, read_chain, term,
)
from ghl.halfedge import GraphError, HalfEdgeGraph, dumbbell, rose, theta
from ghl.homology import enumerate_cells


def cell(G, F, c=1):
    return term(OrientedCell(G, tuple(F)), c)


def bar(G):
    return next(i for i, (a, b) in enumerate(G.ends) if a != b)


def test_oriented_cell_grading():
    x = OrientedCell(theta(), (0,))
    assert x.dimension == 1 and x.bigrade == (-1, 2) and x.rank == 2
    with pytest.raises(GraphError):
        OrientedCell(theta(), (0, 1)).validate()


def test_opposite_orientations_cancel():
    G = HalfEdgeGraph(3, ((0, 1), (1, 2), (0, 2), (0, 1), (1, 2), (0, 2)))
    assert cell(G, [0, 1]) + cell(G, [1, 0]) == Chain(3, "out", 2)


def test_chain_arithmetic():
    x = cell(theta(), [0])
    assert (x + x)[next(iter(x))[0]] == 2
    assert not (x - x)
    assert (x * Fraction(1, 3)) * 3 == x
    with pytest.raises(GradingError):
        x + cell(rose(2), [])


def test_d_C_of_rose_blowups():
    # collapsing the theta edge and the dumbbell bar both give the rose
    r = cell(rose(2), [])
    assert d_C(cell(theta(), [0])) == r
    assert d_C(cell(dumbbell(), [bar(dumbbell())])) == r
    assert d_R(cell(theta(), [0])) == -cell(theta(), [])


def test_delta_C_rose():
    got = delta_C(cell(rose(2), []))
    want = cell(dumbbell(), [bar(dumbbell())]) + cell(theta(), [0]) * 2
    assert got == want


def test_pairing_values():
    x = cell(theta(), [0])
    assert pair(x, x) == canonicalize(theta(), [0]).aut_order
    assert pair(x, Chain(2, "out", 1)) == 0


def test_edge_oriented_calculus():
    p = EdgeOriented.of(OrderedEdgeGraph((0, 1, 2)))
    assert edge_d_R(edge_d_R(p)) == EdgeOriented()
    q = EdgeOriented.of(OrderedEdgeGraph((2, 0, 1)))
    assert q == p
    assert EdgeOriented.of(OrderedEdgeGraph((1, 0, 2))) == -p
    a = EdgeOriented.of(OrderedEdgeGraph((0,)))
    b = EdgeOriented.of(OrderedEdgeGraph((1,)))
    assert a * b == -(b * a)


def test_polygon_cycle_is_dR_closed():
    G = HalfEdgeGraph(6, ((0, 3), (1, 4), (2, 5), (0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)))
    c = dR_cycle_over_forests(G, [(3, 4, 5), (6, 7, 8)])
    assert c and not d_R(c)
    with pytest.raises(GraphError):
        dR_cycle_over_forests(G, [(3, 5, 6)])


def test_key_helpers():
    k = next(iter(cell(theta(), [0])))[0]
    assert key_rank(k) == 2 and key_dimension(k) == 1 and key_bigrade(k) == (-1, 2)


def test_chain_file_roundtrip():
    c = cell(theta(), [0], Fraction(-3, 4)) + cell(dumbbell(), [bar(dumbbell())], 5)
    text = chain_to_text(c)
    assert text.splitlines()[0] == "chain v1 rank=2 variant=out dim=1"
    back = read_chain(io.StringIO(text))
    assert back == c and chain_to_text(back) == text


def test_chain_file_errors():
    with pytest.raises(ChainFormatError, match="line 1"):
        read_chain(io.StringIO("bogus\n"))
    bad = "chain v1 rank=2 variant=out dim=1\n1/1 q=2;b=-;E=0-1,0-1,0-1;F=0\nxx yy\n"
    with pytest.raises(ChainFormatError, match="line 3"):
        read_chain(io.StringIO(bad))
    wrong_dim = "chain v1 rank=2 variant=out dim=0\n1/1 q=2;b=-;E=0-1,0-1,0-1;F=0\n"
    with pytest.raises(ChainFormatError, match="line 2"):
        read_chain(io.StringIO(wrong_dim))


def test_read_recanonicalizes():
    # a forest listed out of canonical order reads back with the opposite sign
    key = enumerate_cells(3, 2, "out").keys[0]
    head, forest = key.rsplit("F=", 1)
    a, b = forest.split(",")
    c = read_chain(io.StringIO(f"chain v1 rank=3 variant=out dim=2\n2/1 {head}F={b},{a}\n"))
    assert c[key] == -2 and len(c) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["out", "aut"]), st.integers(1, 3))
def test_differentials_square_to_zero_rank3(seed, variant, k):
    b = enumerate_cells(3, k, variant)
    if not b.keys:
        return
    key = random.Random(seed).choice(b.keys)
    x = b.chain(key)
    assert not d_R(d_R(x)) and not d_C(d_C(x))
    assert not (d_R(d_C(x)) + d_C(d_R(x)))
    assert not boundary(boundary(x))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["out", "aut"]))
def test_adjoint_operators_square_to_zero(seed, variant):
    b = enumerate_cells(3, 1, variant)
    x = b.chain(random.Random(seed).choice(b.keys))
    assert not delta_R(delta_R(x)) and not delta_C(delta_C(x))
