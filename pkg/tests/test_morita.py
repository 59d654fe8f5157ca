import pytest

from ghl.complex import d_C, d_R
from ghl.halfedge import valences
from ghl.morita import (
    GammaError, banana_gamma, blow_up_gamma, c_gamma, format_gamma, gamma_key,
    has_orientation_reversing_automorphism, inadmissibility_reason, is_admissible, k4_gamma,
    layout, make_gamma, mu, mu_gamma, parse_gamma, sigma_families, theta_gamma,
    verify_pairing_theorem, z,
)
from ghl.canon import cell_from_key

THETA = """\
gamma theta
vertices 2
edge a 0 1
edge b 0 1
edge c 0 1
orient 0 a.0,b.0,c.0
orient 1 a.1,b.1,c.1
base 0
"""


def test_parse_and_format_roundtrip():
    g = parse_gamma(THETA)
    assert g.valences == [3, 3] and g.edge_names == ("a", "b", "c")
    assert parse_gamma(format_gamma(g)) == g


@pytest.mark.parametrize("text, match", [
    (THETA.replace("orient 1 a.1,b.1,c.1\n", ""), "vertex 1"),
    (THETA.replace("edge c 0 1", "edge c 0 x"), "line 5"),
    (THETA.replace("a.0,b.0,c.0", "a.0,b.0,b.1"), "line 6"),
    (THETA.replace("gamma theta\n", ""), "gamma"),
    (THETA + "frobnicate 3\n", "line 9"),
])
def test_parse_errors(text, match):
    with pytest.raises(GammaError, match=match):
        parse_gamma(text)


def test_admissibility():
    assert is_admissible(theta_gamma()) and is_admissible(k4_gamma())
    assert inadmissibility_reason(banana_gamma(4)) == "even valence"
    assert inadmissibility_reason(make_gamma(2, [(0, 1), (1, 1)])) is not None
    with pytest.raises(GammaError):
        z(make_gamma(4, [(0, 1)] * 3 + [(2, 3)] * 3))


def test_blow_up_structure():
    g = theta_gamma()
    fams = list(sigma_families(g))
    assert len(fams) == 36
    bu = blow_up_gamma(g, fams[7])
    assert valences(bu.graph) == [3] * 6
    assert bu.polygons == ((3, 4, 5), (6, 7, 8))
    lay = layout(g, True)
    assert lay.basepoint == lay.corners[0][-1]
    with pytest.raises(GammaError):
        blow_up_gamma(g, ((0, 0, 1), (0, 1, 2)))


def test_z_theta_terms():
    c = z(theta_gamma())
    assert (c.rank, c.variant, c.dim, c.grading) == (4, "out", 4, (-2, 6))
    assert sorted(v for _, v in c) == [-216, 108]
    assert not d_R(c) and not d_C(c)


def test_z_basepointed_is_cycle():
    c = z(theta_gamma(), basepointed=True)
    assert c.variant == "aut" and c and not d_R(c) and not d_C(c)


def test_orientation_change_negates():
    g = theta_gamma()
    odd = g.reoriented(0, (1, 0, 2))
    even = g.reoriented(1, (1, 2, 0))
    assert z(odd) == -z(g)
    assert z(even) == z(g)


def test_even_valence_is_zero():
    assert not z(banana_gamma(4))


def test_worker_count_does_not_change_result():
    g = theta_gamma()
    assert z(g, basepointed=True, workers=2) == z(g, basepointed=True, workers=1)


def test_gamma_classes():
    g = theta_gamma()
    assert not has_orientation_reversing_automorphism(g)
    assert gamma_key(g.reoriented(0, (1, 0, 2))).sign == -gamma_key(g).sign
    relabeled = make_gamma(2, [(1, 0)] * 3)
    assert gamma_key(relabeled).key == gamma_key(g).key


def test_mu_on_z_support():
    g = theta_gamma()
    c = z(g)
    for key, coeff in c:
        G, F = cell_from_key(key)
        assert mu_gamma(g, key) != 0
        assert set(mu(G, F)) == {gamma_key(g).key}


def test_mu_vanishes_off_polygon_covers():
    from ghl.halfedge import theta
    assert mu(theta(), [0]) == {}


def test_pairing_constant_theta():
    g = theta_gamma()
    c = z(g)
    rep = verify_pairing_theorem(g, list(c.terms), c)
    assert rep.consistent and rep.constant == c_gamma(g) == 432
    assert rep.convention() == "dart automorphisms"


def test_k4_cycle():
    c = z(k4_gamma())
    assert (c.rank, c.dim) == (7, 8) and c and not d_R(c) and not d_C(c)
