"""Quantales of opens: laws, partial units, support and the adjoint of multiplication."""

from __future__ import annotations

import pytest

from quantale_kit.corpus import find_groupoid
from quantale_kit.errors import NotEtale
from quantale_kit.groupoid import FiniteGroupoid, discrete_group, identity_groupoid
from quantale_kit.order import FiniteSpace, frame_of_space
from quantale_kit.quantale import (
    InvQuantale,
    check_inverse_quantal_frame,
    check_mu_star,
    check_partial_unit_meet,
    check_partial_units,
    check_quantale_laws,
    check_support,
    check_support_derived,
    find_supports,
    mu_star,
    mu_star_by_definition,
    opens_quantale,
    support,
)

SIERPINSKI = FiniteSpace.sierpinski()

# (groupoid name, |Q|, |I(Q)|), each computed by hand from the arrow space
# and the partial bijections it carries
SIZES = [
    ("z2", 4, 3),
    ("pair2", 16, 7),
    ("pair3", 512, 34),
    ("bundle-z2", 9, 5),
]


def mutated(Q, entries):
    mult = [row[:] for row in Q.mult]
    for (a, b), c in entries.items():
        mult[a][b] = c
    return InvQuantale(Q.carrier, mult, Q.invol, Q.unit)


@pytest.mark.parametrize("name,size,units", SIZES)
def test_quantale_and_partial_unit_counts(name, size, units):
    Q = opens_quantale(find_groupoid(name))
    assert (len(Q), len(Q.partial_units)) == (size, units)


def test_identity_groupoid_quantale_is_the_frame():
    Q = opens_quantale(identity_groupoid(SIERPINSKI))
    F = Q.carrier
    assert Q.unit == F.top
    assert all(Q.mul(a, b) == F.meet(a, b) for a in F for b in F)
    assert len(Q.partial_units) == len(Q) == 3


def test_z2_tables(z2q):
    Q = z2q
    g, one = Q.element(["g"]), Q.element(["1"])
    assert len(Q) == 4
    assert Q.mul(g, g) == one
    assert Q.unit == one
    assert Q.star(g) == g
    assert Q.base == (Q.bottom, one)


def test_pair2_tables(pair2q):
    Q = pair2q
    assert len(Q) == 16
    assert Q.mul(Q.element(["(1,2)"]), Q.element(["(2,1)"])) == Q.element(["(1,1)"])
    assert Q.arrows(Q.unit) == {"(1,1)", "(2,2)"}


def test_base_is_isomorphic_to_objects(pair2, pair2q):
    assert sorted(pair2q.base_iso.values()) == sorted(pair2q.base)
    assert len(pair2q.base) == len(frame_of_space(pair2.objects)) == 4


def test_non_etale_groupoid_has_no_quantale():
    G = discrete_group("Z2")
    bad = FiniteGroupoid(
        G.objects, FiniteSpace.indiscrete(["1", "g"]), G.d.as_dict(), G.r.as_dict(),
        G.u.as_dict(), G.i.as_dict(), G.comp,
    )
    with pytest.raises(NotEtale):
        opens_quantale(bad)


# -- partial units ----------------------------------------------------------

def test_z2_partial_units(z2q):
    assert {frozenset(z2q.arrows(s)) for s in z2q.partial_units} == {
        frozenset(), frozenset({"1"}), frozenset({"g"})
    }


def test_partial_units_of_identity_groupoid_are_everything():
    Q = opens_quantale(identity_groupoid(FiniteSpace(["1", "2"])))
    assert len(Q.partial_units) == len(Q)


def test_partial_unit_structure(pair2q):
    assert check_partial_units(pair2q)
    assert check_partial_unit_meet(pair2q)
    for s in pair2q.partial_units:
        assert pair2q.mul(pair2q.mul(s, pair2q.star(s)), s) == s


# -- support ----------------------------------------------------------------

def test_support_of_bottom(z2q):
    assert support(z2q)(z2q.bottom) == z2q.bottom


def test_z2_support_of_g(z2q):
    assert support(z2q)(z2q.element(["g"])) == z2q.unit


def test_pair2_support(pair2q):
    Q = pair2q
    a = Q.element(["(1,2)"])
    sp = support(Q)
    assert sp(a) == Q.element(["(1,1)"])
    assert Q.mul(sp(a), a) == a


@pytest.mark.parametrize("name", ["z2", "pair2", "bundle-z2", "reflection-z2"])
def test_support_laws_hold(name):
    Q = opens_quantale(find_groupoid(name))
    sp = support(Q)
    assert check_support(Q, sp)
    assert check_support_derived(Q, sp)
    for a in Q.carrier:
        assert Q.mul(sp(a), a) == a
        assert Q.leq(sp(a), Q.mul(a, Q.star(a)))


def test_support_search_finds_the_geometric_support(z2q):
    found = find_supports(z2q)
    assert [s.table for s in found] == [support(z2q).table]


# -- inverse quantal frames -------------------------------------------------

@pytest.mark.parametrize("name", ["z2", "pair2", "pair3", "bundle-z2", "reflection-z2"])
def test_groupoid_quantales_are_inverse_quantal_frames(name):
    assert check_inverse_quantal_frame(opens_quantale(find_groupoid(name)))


def test_boolean_frame_with_meet_is_an_inverse_quantal_frame():
    F = frame_of_space(FiniteSpace(["1", "2"]))
    mult = [[F.meet(a, b) for b in F] for a in F]
    Q = InvQuantale(F, mult, list(F), F.top)
    assert check_inverse_quantal_frame(Q)


def test_z2_involution_on_g_already_identity(z2q):
    Q = InvQuantale(z2q.carrier, z2q.mult, list(z2q.carrier), z2q.unit)
    assert check_quantale_laws(Q)
    assert check_inverse_quantal_frame(Q)


def test_single_entry_mutation_breaks_join_preservation(z2q):
    g = z2q.element(["g"])
    v = check_inverse_quantal_frame(mutated(z2q, {(g, g): g}))
    assert not v and v.law.startswith("mult-join")


def test_bilinear_mutation_breaks_partial_unit_density(z2q):
    g, top = z2q.element(["g"]), z2q.top
    Q = mutated(z2q, {(g, g): g, (g, top): g, (top, g): g, (top, top): top})
    assert check_quantale_laws(Q)
    v = check_inverse_quantal_frame(Q)
    assert not v and v.law == "partial-units-join-dense"


def test_broken_unit_is_reported(z2q):
    Q = InvQuantale(z2q.carrier, z2q.mult, z2q.invol, z2q.top)
    v = check_quantale_laws(Q)
    assert not v


# -- mu_star ----------------------------------------------------------------

def test_mu_star_of_bottom(z2q):
    assert mu_star(z2q, z2q.bottom) == 0


def test_z2_mu_star_of_unit(z2q):
    P = z2q.groupoid.composable.space
    assert P.subset(mu_star(z2q, z2q.unit)) == {("1", "1"), ("g", "g")}


def test_pair2_mu_star_of_unit(pair2, pair2q):
    P = pair2.composable.space
    expected = {(g, h) for g, h in P.points if pair2.comp[g, h] in {"(1,1)", "(2,2)"}}
    assert P.subset(mu_star(pair2q, pair2q.unit)) == expected
    assert mu_star(pair2q, pair2q.unit) == mu_star_by_definition(pair2q, pair2q.unit)


@pytest.mark.parametrize("name", ["z2", "pair2", "bundle-z2", "reflection-z2"])
def test_mu_star_is_the_adjoint_of_multiplication(name):
    assert check_mu_star(opens_quantale(find_groupoid(name)))


def test_partial_unit_meet_with_unit(pair2q):
    Q = pair2q
    for s in Q.partial_units:
        assert Q.carrier.meet(Q.mul(s, Q.top), Q.unit) == Q.mul(s, Q.star(s))
