"""Groupoid axioms, openness and étaleness, actions and equivariant maps."""

from __future__ import annotations

import pytest

from conftest import swap_glocale
from quantale_kit.errors import NotEtale
from quantale_kit.groupoid import (
    EquivariantMap,
    FiniteGroupoid,
    GLocale,
    check_action_pullback,
    check_equivariant,
    check_glocale,
    check_groupoid,
    discrete_group,
    identity_equivariant,
    identity_groupoid,
    induced_glocale,
    is_etale,
    make_named,
    pair_groupoid,
    self_action,
    terminal_glocale,
)
from quantale_kit.order import FiniteSpace

SIERPINSKI = FiniteSpace.sierpinski()


def rebuild(G, *, arrows=None, comp=None):
    return FiniteGroupoid(
        G.objects, arrows or G.arrows, G.d.as_dict(), G.r.as_dict(), G.u.as_dict(),
        G.i.as_dict(), comp or G.comp,
    )


# -- check_groupoid ---------------------------------------------------------

def test_identity_groupoid_on_sierpinski_is_a_groupoid():
    assert check_groupoid(identity_groupoid(SIERPINSKI))


def test_pair_groupoid_passes():
    G = pair_groupoid(2)
    assert len(G.composable.space) == 8
    assert check_groupoid(G)


def test_corrupted_pair_composition_fails_d_compatibility():
    G = pair_groupoid(2)
    comp = dict(G.comp)
    comp["(1,2)", "(2,1)"] = "(2,2)"
    v = check_groupoid(rebuild(G, comp=comp))
    assert not v and v.law == "d-compatibility"
    assert v.witness == ("(1,2)", "(2,1)", "(2,2)")


def test_composition_outside_composable_pairs_is_unrepresentable():
    G = pair_groupoid(2)
    comp = dict(G.comp)
    comp["(1,2)", "(1,2)"] = "(1,2)"
    with pytest.raises(ValueError):
        rebuild(G, comp=comp)


def test_composition_orientation():
    # g·h needs r(g) = d(h), and the composite keeps d(g) and r(h)
    G = pair_groupoid(2)
    assert G.comp["(1,2)", "(2,1)"] == "(1,1)"
    assert G.d("(1,2)") == "1" and G.r("(1,2)") == "2"


def test_discontinuous_multiplication_is_reported():
    # with {g} open, m⁻¹{g} = {(1,g), (g,1)} is not open in the product
    G = discrete_group("Z2")
    bad = rebuild(G, arrows=FiniteSpace(["1", "g"], [[], ["g"], ["1", "g"]]))
    v = check_groupoid(bad)
    assert not v and v.law == "continuity:m"
    assert not is_etale(bad)


# -- is_etale ---------------------------------------------------------------

def test_discrete_groupoids_are_etale():
    for G in (discrete_group("Z2"), discrete_group("Z3"), pair_groupoid(2), pair_groupoid(3)):
        assert is_etale(G)


def test_identity_groupoid_on_sierpinski_is_etale():
    assert is_etale(identity_groupoid(SIERPINSKI))


def test_indiscrete_arrows_are_not_etale():
    G = discrete_group("Z2")
    bad = rebuild(G, arrows=FiniteSpace.indiscrete(["1", "g"]))
    assert check_groupoid(bad)
    v = is_etale(bad)
    assert not v and v.law.startswith("etale")


# -- make_named -------------------------------------------------------------

def test_named_z2():
    G = make_named("discrete-group", group="Z2")
    assert G.objects.points == ("*",)
    assert set(G.arrows.points) == {"1", "g"}
    assert G.comp["g", "g"] == "1"


def test_named_pair():
    G = make_named("pair", n=2)
    assert len(G.arrows) == 4
    assert G.comp["(1,2)", "(2,2)"] == "(1,2)"


def test_named_identity_on_sierpinski():
    G = make_named("identity-on-space", space=SIERPINSKI)
    assert G.arrows is G.objects


def test_named_bundle_and_action_groupoids():
    assert is_etale(make_named("product-with-group", space=SIERPINSKI, group="Z2"))
    act = {("1", "a"): "a", ("1", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"}
    G = make_named("action-groupoid", group="Z2", space=FiniteSpace(["a", "b"]), action=act)
    assert len(G.arrows) == 4 and is_etale(G)


def test_named_refuses_non_etale_output():
    # swapping the points of Sierpinski space is not continuous, so the
    # translation groupoid fails before étaleness is reached
    act = {("1", "a"): "a", ("1", "b"): "b", ("g", "a"): "b", ("g", "b"): "a"}
    with pytest.raises((NotEtale, ValueError)):
        make_named("action-groupoid", group="Z2", space=SIERPINSKI, action=act)


def test_unknown_kind():
    with pytest.raises(ValueError):
        make_named("free-group")


# -- check_glocale ----------------------------------------------------------

def test_self_action_is_a_glocale():
    for G in (discrete_group("Z2"), pair_groupoid(2), identity_groupoid(SIERPINSKI)):
        A = self_action(G)
        assert check_glocale(G, A)
        assert check_action_pullback(G, A)


def test_swap_action_is_a_glocale(z2, z2_swap):
    assert check_glocale(z2, z2_swap)
    assert check_action_pullback(z2, z2_swap)


def test_non_unital_action_fails_unitarity(z2):
    X = FiniteSpace(["x1", "x2"])
    act = {(g, x): "x1" for g in ("1", "g") for x in ("x1", "x2")}
    A = GLocale(z2, X, {"x1": "*", "x2": "*"}, act)
    v = check_glocale(z2, A)
    assert not v and v.law == "unitarity"


def test_terminal_and_induced_glocales(pair2):
    assert check_glocale(pair2, terminal_glocale(pair2))
    A = induced_glocale(pair2, FiniteSpace(["a"]), {"a": "1"})
    assert len(A.space) == 2 and check_glocale(pair2, A)


def test_projection_identity_holds_pointwise(pair2):
    A = self_action(pair2)
    for g, x in A.pullback.space.points:
        assert pair2.comp[g, pair2.u(A.p(x))] == g


# -- check_equivariant ------------------------------------------------------

def test_identity_is_equivariant(z2_swap):
    assert check_equivariant(identity_equivariant(z2_swap))


def test_swap_map_is_equivariant(z2_swap):
    f = EquivariantMap(z2_swap, z2_swap, {"x1": "x2", "x2": "x1"})
    assert check_equivariant(f)


def test_map_off_the_base_fails(pair2):
    A = self_action(pair2)
    T = terminal_glocale(pair2)
    # send every arrow to object 1, although half of them live over 2
    f = EquivariantMap(A, T, {g: "1" for g in pair2.arrows.points})
    v = check_equivariant(f)
    assert not v and v.law == "over-base"


def test_constant_map_on_swap_is_not_equivariant(z2):
    A = swap_glocale(z2)
    v = check_equivariant(EquivariantMap(A, A, {"x1": "x1", "x2": "x1"}))
    assert not v and v.law == "equivariance"
