import random

from hypothesis import given, settings, strategies as st

from ghl.canon import (
    aut_order_graph, canonicalize, cell_from_key, graph_canon, key_aut_order,
    permutation_parity, signed_iso_count,
)
from ghl.halfedge import HalfEdgeGraph, dumbbell, is_forest, relabel, rose, theta

from oracles import aut_count, is_reversing, random_minimal_graph, random_relabel


def test_parity():
    assert permutation_parity([0, 1, 2]) == 1
    assert permutation_parity([1, 0, 2]) == -1
    assert permutation_parity([2, 0, 1]) == 1
    assert permutation_parity([5, 3, 9]) == -1


def test_small_aut_orders():
    assert aut_order_graph(theta()) == 12
    assert aut_order_graph(rose(2)) == 8
    assert aut_order_graph(dumbbell()) == 8
    assert aut_order_graph(theta(basepoint=0)) == 6


def test_theta_single_edge_cell():
    # theta has two vertices, so every forest has at most one edge
    r = canonicalize(theta(), [0])
    assert not r.orientation_reversing and r.aut_order == 4


def test_key_roundtrip():
    r = canonicalize(dumbbell(), [2] if dumbbell().ends[2][0] != dumbbell().ends[2][1] else [1])
    G, F = cell_from_key(r.key)
    assert canonicalize(G, F).key == r.key
    assert canonicalize(G, F).sign == 1
    assert key_aut_order(r.key) == r.aut_order


def test_oriented_key_format():
    r = canonicalize(theta(), [1])
    assert r.key.startswith("q=2;b=-;E=") and r.key.endswith(";F=0")


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 3), st.booleans())
def test_aut_order_matches_bijection_count(seed, n, basepointed):
    rng = random.Random(seed)
    G = random_minimal_graph(rng, n, basepointed)
    if G is None:
        return
    cand = [e for e in range(G.ne) if not G.is_loop(e)]
    rng.shuffle(cand)
    F = []
    for e in cand:
        if rng.random() < 0.5 and is_forest(G, F + [e]):
            F.append(e)
    r = canonicalize(G, F, check=False)
    assert r.aut_order == aut_count(G, F)
    assert r.orientation_reversing == is_reversing(G, F)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 3))
def test_canonical_form_is_invariant(seed, n):
    rng = random.Random(seed)
    G = random_minimal_graph(rng, n, basepointed=rng.random() < 0.5)
    if G is None:
        return
    F = []
    for e in range(G.ne):
        if not G.is_loop(e) and rng.random() < 0.4 and is_forest(G, F + [e]):
            F.append(e)
    vperm, eperm, flips = random_relabel(rng, G)
    H = relabel(G, vperm, eperm, flips)
    order = list(range(len(F)))
    rng.shuffle(order)
    FH = [eperm[F[i]] for i in order]
    a = canonicalize(G, F, check=False)
    b = canonicalize(H, FH, check=False)
    assert a.key == b.key and a.aut_order == b.aut_order
    if not a.orientation_reversing:
        assert a.sign * b.sign == permutation_parity(order)


def test_signed_iso_count():
    G = dumbbell()
    bar = next(i for i, (a, b) in enumerate(G.ends) if a != b)
    assert signed_iso_count((G, [bar]), (G, [bar])) == aut_order_graph(G)
    H = relabel(G, [1, 0], [0, 1, 2])
    assert signed_iso_count((G, [bar]), (H, [bar])) == aut_order_graph(G)


def test_graph_canon_labelings_are_automorphisms():
    G = HalfEdgeGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    gc = graph_canon(G)
    assert len(gc.labelings) == 24
