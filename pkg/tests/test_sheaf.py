"""Supports of open Q-locales, local sections, étaleness and sheaf homomorphisms."""

from __future__ import annotations

import pytest

from quantale_kit.corpus import enumerate_glocales, find_groupoid
from quantale_kit.errors import NotOpen
from quantale_kit.groupoid import (
    GLocale,
    identity_groupoid,
    induced_glocale,
    self_action,
    terminal_glocale,
)
from quantale_kit.order import ContinuousMap, FiniteSpace
from quantale_kit.qmodule import module_of_glocale
from quantale_kit.quantale import opens_quantale, support
from quantale_kit.sheaf import (
    check_bisections,
    check_sheaf_category_isomorphisms,
    check_sheaf_hom,
    check_support_laws,
    direct_image_table,
    enumerate_sheaf_homs,
    find_module_supports,
    is_etale_qlocale,
    local_sections,
    map_from_direct_image,
    open_qlocale,
)

SIERPINSKI = FiniteSpace.sierpinski()


def open_module(G, A, Q=None):
    Q = Q or opens_quantale(G)
    return open_qlocale(Q, module_of_glocale(G, A, Q))


def sierpinski_over_point():
    G = find_groupoid("z1")
    X = FiniteSpace.sierpinski("s", "t")
    obj = G.objects.points[0]
    unit = G.u(obj)
    A = GLocale(G, X, {"s": obj, "t": obj}, {(unit, "s"): "s", (unit, "t"): "t"})
    return G, A


# -- open_qlocale -----------------------------------------------------------

def test_quantale_support_is_the_module_support(z2q, z2_self_module):
    OQ = open_qlocale(z2q, z2_self_module)
    assert OQ.supp == support(z2q).table


def test_swap_support(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    assert OX.sp(z2_swap_module.element(["x1"])) == z2q.unit
    assert find_module_supports(z2_swap_module) == [OX.supp]


def test_closed_point_is_not_open():
    G = identity_groupoid(SIERPINSKI)
    A = GLocale(G, FiniteSpace(["b"]), {"b": "b"}, {("b", "b"): "b"})
    with pytest.raises(NotOpen):
        open_module(G, A)


# -- support laws -----------------------------------------------------------

def test_support_of_unit_action(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    spQ = support(z2q)
    for x in z2_swap_module.carrier:
        assert OX.sp(z2_swap_module.act(z2q.unit, x)) == OX.sp(x) == spQ(z2q.mul(z2q.unit, OX.sp(x)))


def test_swap_conjugation(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    g, x1 = z2q.element(["g"]), z2_swap_module.element(["x1"])
    assert OX.sp(z2_swap_module.act(g, x1)) == z2q.unit == z2q.mul(z2q.mul(g, z2q.unit), g)


def test_pair2_support_decreases(pair2q, pair2_self_module):
    OQ = open_qlocale(pair2q, pair2_self_module)
    a, x = pair2q.element(["(1,2)"]), pair2q.element(["(2,1)"])
    one = pair2q.element(["(1,1)"])
    assert OQ.sp(pair2_self_module.act(a, x)) == one
    assert support(pair2q)(a) == one


@pytest.mark.parametrize("name", ["z2", "pair2", "bundle-z2", "reflection-z2"])
def test_support_laws_over_small_glocales(name):
    G = find_groupoid(name)
    Q = opens_quantale(G)
    for A in enumerate_glocales(G, 2):
        M = module_of_glocale(G, A, Q)
        try:
            OM = open_qlocale(Q, M)
        except NotOpen:
            continue
        assert check_support_laws(Q, OM), A.name


# -- local sections and étaleness ------------------------------------------

def test_bottom_is_a_section(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    assert z2_swap_module.bottom in local_sections(OX)


def test_pair2_sections(pair2q, pair2_self_module):
    OQ = open_qlocale(pair2q, pair2_self_module)
    gamma = set(local_sections(OQ))
    assert len(gamma) == 9 and len(pair2q.partial_units) == 7
    assert set(pair2q.partial_units) < gamma
    assert check_bisections(pair2q, OQ)


def test_z2_sections_are_partial_units(z2q, z2_self_module):
    OQ = open_qlocale(z2q, z2_self_module)
    assert set(local_sections(OQ)) == set(z2q.partial_units)
    assert len(local_sections(OQ)) == 3


def test_quantale_is_etale(pair2q, pair2_self_module):
    assert is_etale_qlocale(open_qlocale(pair2q, pair2_self_module))


def test_induced_module_is_etale(pair2):
    A = induced_glocale(pair2, FiniteSpace(["a", "b"]), {"a": "1", "b": "2"})
    assert is_etale_qlocale(open_module(pair2, A))


def test_sierpinski_over_point_is_open_but_not_etale():
    G, A = sierpinski_over_point()
    OM = open_module(G, A)
    assert not is_etale_qlocale(OM)
    assert len(local_sections(OM)) == 2


# -- sheaf homomorphisms ----------------------------------------------------

def test_identity_is_a_sheaf_hom(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    assert check_sheaf_hom(OX, OX, tuple(z2_swap_module.carrier))


def test_direct_image_of_domain_map_is_a_sheaf_hom(pair2, pair2q):
    S, T = self_action(pair2), terminal_glocale(pair2)
    OS, OT = open_module(pair2, S, pair2q), open_module(pair2, T, pair2q)
    d = ContinuousMap(S.space, T.space, pair2.d.as_dict())
    h = direct_image_table(d, OS.module, OT.module)
    assert check_sheaf_hom(OS, OT, h)
    assert map_from_direct_image(h, OS.module, OT.module).table == d.table


def test_zero_map_does_not_preserve_supports(pair2, pair2q):
    S, T = self_action(pair2), terminal_glocale(pair2)
    OS, OT = open_module(pair2, S, pair2q), open_module(pair2, T, pair2q)
    zero = tuple(OT.module.bottom for _ in OS.module.carrier)
    v = check_sheaf_hom(OS, OT, zero)
    assert not v and v.law == "support-preservation"


def test_sheaf_homs_of_swap_are_the_two_automorphisms(z2q, z2_swap_module):
    OX = open_qlocale(z2q, z2_swap_module)
    assert len(enumerate_sheaf_homs(OX, OX)) == 2


@pytest.mark.parametrize("name,points", [
    ("z1+z1", 3),  # identity groupoid on two discrete points
    ("z2", 3),
    ("pair2", 3),
])
def test_sheaf_category_isomorphisms(name, points):
    G = find_groupoid(name)
    c = check_sheaf_category_isomorphisms(G, enumerate_glocales(G, points))
    assert c.verdict, c.verdict
    assert c.equivariant_maps == c.sheaf_homs
