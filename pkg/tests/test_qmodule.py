"""Q-locales: the module of an action, the adjoint of the action, and the way back."""

from __future__ import annotations

import pytest

from quantale_kit.corpus import enumerate_glocales, find_groupoid
from quantale_kit.errors import NoPointRealization, NotAFrameHom
from quantale_kit.groupoid import (
    EquivariantMap,
    check_equivariant,
    identity_groupoid,
    self_action,
    terminal_glocale,
)
from quantale_kit.order import FiniteSpace, identity_map
from quantale_kit.qmodule import (
    QLocale,
    alpha_star,
    alpha_star_by_definition,
    check_actions_coincide,
    check_alpha_star,
    check_category_isomorphism,
    check_lax_inequality,
    check_module_hom,
    check_qlocale,
    continuous_maps,
    enumerate_module_homs,
    glocale_of_qlocale,
    inverse_image_table,
    module_of_glocale,
    projection_of,
    realization,
    same_glocale,
)
from quantale_kit.quantale import mu_star, opens_quantale

SIERPINSKI = FiniteSpace.sierpinski()


def sierpinski_base_breaker():
    """Identity groupoid on Sierpinski space acting on its own opens, except
    that ``{a}·{a} = ∅`` and ``{a}·top = top``.  Still a unital module, but
    ``{a}·{a}`` differs from ``({a}·1) ∧ {a} = {a}``."""
    G = identity_groupoid(SIERPINSKI)
    Q = opens_quantale(G)
    X = module_of_glocale(G, self_action(G), Q)
    c, m = Q.element(["a"]), X.element(["a"])
    table = [row[:] for row in X.table]
    table[c][m] = X.bottom
    table[c][X.top] = X.top
    return G, Q, QLocale(Q, X.space, table), (c, m)


# -- module_of_glocale ------------------------------------------------------

def test_self_module_is_multiplication(z2q, z2_self_module):
    for a in z2q.carrier:
        for x in z2_self_module.carrier:
            assert z2_self_module.act(a, x) == z2q.mul(a, x)


def test_swap_module_table(z2q, z2_swap_module):
    X, Q = z2_swap_module, z2q
    g = Q.element(["g"])
    x1, x2 = X.element(["x1"]), X.element(["x2"])
    assert X.act(g, x1) == x2 and X.act(g, x2) == x1
    assert all(X.act(Q.unit, x) == x for x in X.carrier)


def test_bottom_acts_as_zero(z2q, z2_swap_module):
    assert all(z2_swap_module.act(z2q.bottom, x) == z2_swap_module.bottom for x in z2_swap_module.carrier)


def test_induced_modules_are_qlocales(pair2, pair2q):
    for A in enumerate_glocales(pair2, 2):
        M = module_of_glocale(pair2, A, pair2q)
        assert check_qlocale(pair2q, M)
        assert check_actions_coincide(pair2, A, M)


# -- check_qlocale ----------------------------------------------------------

def test_non_unital_module_fails(z2q, z2_swap_module):
    X = z2_swap_module
    table = [row[:] for row in X.table]
    table[z2q.unit][X.element(["x1"])] = X.bottom
    v = check_qlocale(z2q, QLocale(z2q, X.space, table))
    assert not v


def test_base_law_failure_names_the_pair():
    G, Q, X, pair = sierpinski_base_breaker()
    v = check_qlocale(Q, X)
    assert not v and v.law == "base-meet" and v.witness == pair


def test_base_law_failure_is_not_converted():
    G, Q, X, _ = sierpinski_base_breaker()
    with pytest.raises(NotAFrameHom):
        glocale_of_qlocale(G, X)


def test_projection_must_be_a_frame_map():
    # Q = opens of two discrete objects; both base atoms act as the identity
    # on the one-point frame, so p* sends a ∧ b = ∅ to top
    G = identity_groupoid(FiniteSpace(["1", "2"]))
    Q = opens_quantale(G)
    X = FiniteSpace(["pt"])
    table = [[0, 0 if a == Q.bottom else 1] for a in Q.carrier]
    with pytest.raises(NoPointRealization):
        projection_of(QLocale(Q, X, table))


# -- alpha_star -------------------------------------------------------------

def test_alpha_star_of_bottom(z2_swap_module):
    assert alpha_star(z2_swap_module, z2_swap_module.bottom) == 0


def test_alpha_star_on_q_is_mu_star(z2q, z2_self_module):
    P = realization(z2_self_module).space
    a = alpha_star(z2_self_module, z2q.unit)
    assert P.subset(a) == {("1", "1"), ("g", "g")}
    assert P.subset(a) == z2q.groupoid.composable.space.subset(mu_star(z2q, z2q.unit))


def test_alpha_star_of_swap(z2_swap_module):
    X = z2_swap_module
    P = realization(X).space
    x1 = X.element(["x1"])
    assert P.subset(alpha_star(X, x1)) == {("1", "x1"), ("g", "x2")}
    assert alpha_star(X, x1) == alpha_star_by_definition(X, x1)


def test_alpha_star_is_the_adjoint(pair2, pair2q):
    for A in enumerate_glocales(pair2, 2):
        assert check_alpha_star(module_of_glocale(pair2, A, pair2q), A)


# -- glocale_of_qlocale -----------------------------------------------------

def test_self_module_recovers_self_action(z2, z2_self_module):
    A = glocale_of_qlocale(z2, z2_self_module)
    assert same_glocale(A, self_action(z2))


def test_swap_roundtrip(z2, z2_swap, z2_swap_module):
    assert same_glocale(glocale_of_qlocale(z2, z2_swap_module), z2_swap)


def test_terminal_roundtrip(pair2, pair2q):
    T = terminal_glocale(pair2)
    assert same_glocale(glocale_of_qlocale(pair2, module_of_glocale(pair2, T, pair2q)), T)


# -- morphisms --------------------------------------------------------------

def test_lax_inequality_for_identity(z2_swap, z2_swap_module):
    assert check_lax_inequality(z2_swap, z2_swap, identity_map(z2_swap.space), z2_swap_module, z2_swap_module)


def test_equivariant_maps_give_module_homs(z2, z2q, z2_swap, z2_swap_module):
    T = terminal_glocale(z2)
    MT = module_of_glocale(z2, T, z2q)
    for f in continuous_maps(z2_swap.space, T.space):
        assert check_equivariant(EquivariantMap(z2_swap, T, f))
        fstar = inverse_image_table(f, z2_swap_module, MT)
        assert check_module_hom(z2q, MT, z2_swap_module, fstar)
        assert check_lax_inequality(z2_swap, T, f, z2_swap_module, MT)


def test_module_homs_of_swap(z2q, z2_swap_module):
    homs = enumerate_module_homs(z2q, z2_swap_module, z2_swap_module)
    assert tuple(z2_swap_module.carrier) in homs


@pytest.mark.parametrize("name,points", [("z1", 2), ("z2", 3), ("pair2", 3)])
def test_category_isomorphism(name, points):
    G = find_groupoid(name)
    c = check_category_isomorphism(G, enumerate_glocales(G, points))
    assert c.verdict, c.verdict
    assert c.equivariant_maps == c.spatial_homs
