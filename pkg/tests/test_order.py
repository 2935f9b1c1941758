"""Finite spaces, frames, adjoints, direct images, spatialization, pullbacks."""

from __future__ import annotations

import pytest

from quantale_kit.errors import (
    NotDistributive,
    NotJoinPreserving,
    OpennessViolation,
    TopologyError,
)
from quantale_kit.groupoid import discrete_group, pair_groupoid
from quantale_kit.order import (
    ContinuousMap,
    FiniteSpace,
    Frame,
    LatticeMap,
    direct_image,
    find_isomorphism,
    frame_of_space,
    galois_check,
    identity_map,
    inverse_image,
    is_open_map,
    join_preservation,
    meet_preservation,
    points_of_frame,
    pullback_space,
    right_adjoint,
)

SIERPINSKI = FiniteSpace.sierpinski()


def closed_point_inclusion():
    return ContinuousMap(FiniteSpace(["b"]), SIERPINSKI, {"b": "b"})


# -- frame_of_space ---------------------------------------------------------

def test_frame_of_point_has_two_elements():
    assert len(frame_of_space(FiniteSpace(["*"]))) == 2


def test_frame_of_two_point_discrete_is_boolean():
    F = frame_of_space(FiniteSpace(["1", "2"]))
    assert len(F) == 4
    assert len(F.join_irreducibles()) == 2


def test_frame_of_sierpinski_is_a_three_chain():
    F = frame_of_space(SIERPINSKI)
    assert len(F) == 3
    elems = sorted(F, key=F.rank)
    assert all(F.leq(a, b) for a, b in zip(elems, elems[1:]))


def test_empty_space_has_one_open():
    F = frame_of_space(FiniteSpace([]))
    assert len(F) == 1 and F.top == F.bottom


def test_non_closed_family_names_the_offending_pair():
    with pytest.raises(TopologyError) as exc:
        FiniteSpace(["a", "b", "c"], [[], ["a"], ["b"], ["a", "b", "c"]])
    assert exc.value.witness == (frozenset({"a"}), frozenset({"b"}))


def test_missing_carrier_is_rejected():
    with pytest.raises(TopologyError):
        FiniteSpace(["a", "b"], [[], ["a"]])


def test_every_space_frame_is_distributive():
    for space in (SIERPINSKI, FiniteSpace(["1", "2", "3"]), FiniteSpace.indiscrete("ab")):
        assert frame_of_space(space).check_frame_law()


# -- right_adjoint ----------------------------------------------------------

def test_right_adjoint_of_identity_is_identity():
    F = frame_of_space(SIERPINSKI)
    ident = LatticeMap(F, F, tuple(F))
    assert right_adjoint(ident).table == tuple(F)


def test_right_adjoint_of_bottom_map_is_top_map():
    F = frame_of_space(FiniteSpace(["1", "2"]))
    bot = LatticeMap(F, F, tuple(F.bottom for _ in F))
    assert set(right_adjoint(bot).table) == {F.top}


def test_right_adjoint_rejects_non_join_preserving_map():
    F = frame_of_space(FiniteSpace(["1", "2"]))
    const_top = LatticeMap(F, F, tuple(F.top for _ in F))
    with pytest.raises(NotJoinPreserving):
        right_adjoint(const_top)


def test_pair_groupoid_d_galois_connection_over_all_pairs():
    G = pair_groupoid(2)
    d_shriek = direct_image(G.d)
    d_star = inverse_image(G.d)
    assert len(d_shriek.source) * len(d_shriek.target) == 16 * 4
    assert galois_check(d_shriek, d_star)
    assert right_adjoint(d_shriek).table == d_star.table


def test_right_adjoint_preserves_meets():
    G = pair_groupoid(2)
    g = right_adjoint(direct_image(G.d))
    assert meet_preservation(g.source, g.target, g.table.__getitem__)


# -- direct_image -----------------------------------------------------------

def test_direct_image_of_identity_is_identity():
    F = frame_of_space(SIERPINSKI)
    assert direct_image(identity_map(SIERPINSKI)).table == tuple(F)


def test_direct_image_of_pair_unit_is_the_unit_element():
    G = pair_groupoid(2)
    u = direct_image(G.u)
    G1 = frame_of_space(G.arrows)
    top0 = frame_of_space(G.objects).top
    assert G1.points_of(u(top0)) == {"(1,1)", "(2,2)"}


def test_closed_point_inclusion_has_no_direct_image():
    with pytest.raises(OpennessViolation):
        direct_image(closed_point_inclusion())


# -- openness ---------------------------------------------------------------

def test_discrete_maps_are_open():
    f = ContinuousMap(FiniteSpace("abc"), FiniteSpace("xy"), {"a": "x", "b": "x", "c": "y"})
    assert is_open_map(f)


def test_closed_point_inclusion_is_not_open():
    assert not is_open_map(closed_point_inclusion())


def test_pair_d_is_open():
    assert is_open_map(pair_groupoid(2).d)


# -- points_of_frame --------------------------------------------------------

def test_points_of_two_element_frame():
    space, _ = points_of_frame(frame_of_space(FiniteSpace(["*"])))
    assert len(space) == 1


def test_points_of_boolean_frame_are_discrete():
    space, _ = points_of_frame(frame_of_space(FiniteSpace(["1", "2"])))
    assert len(space) == 2 and space.is_discrete()


def test_points_of_three_chain_is_sierpinski():
    F = Frame.from_order([0, 1, 2], lambda a, b: a <= b)
    space, iso = points_of_frame(F)
    assert len(space) == 2 and not space.is_discrete()
    assert find_isomorphism(frame_of_space(space), frame_of_space(SIERPINSKI)) is not None
    assert len(set(iso)) == 3


def test_points_of_frame_roundtrip_witness():
    for space in (SIERPINSKI, FiniteSpace(["1", "2", "3"]), FiniteSpace(["p", "q", "t"], nbhd=[1, 2, 7])):
        F = frame_of_space(space)
        back, iso = points_of_frame(F)
        opens = frame_of_space(back)
        assert sorted(iso) == sorted(opens.labels)
        for a in F:
            for b in F:
                assert F.leq(a, b) == (not iso[a] & ~iso[b])


def test_diamond_is_not_distributive():
    # M3: bottom, three atoms, top
    rel = {(0, i) for i in range(5)} | {(i, 4) for i in range(5)} | {(i, i) for i in range(5)}
    M3 = Frame.from_order(range(5), lambda a, b: (a, b) in rel)
    with pytest.raises(NotDistributive):
        points_of_frame(M3)


# -- pullbacks --------------------------------------------------------------

def test_pullback_of_identities_is_the_diagonal():
    ident = identity_map(SIERPINSKI)
    pb = pullback_space(ident, ident)
    assert len(pb.space) == 2
    assert find_isomorphism(frame_of_space(pb.space), frame_of_space(SIERPINSKI)) is not None


def test_pair_groupoid_has_eight_composable_pairs():
    G = pair_groupoid(2)
    assert len(pullback_space(G.r, G.d).space) == 8


def test_z2_self_action_pullback_has_four_pairs():
    G = discrete_group("Z2")
    assert len(pullback_space(G.r, G.d).space) == 4


def test_join_preservation_reports_witness():
    F = frame_of_space(FiniteSpace(["1", "2"]))
    v = join_preservation(F, F, lambda a: F.top)
    assert not v and v.witness
