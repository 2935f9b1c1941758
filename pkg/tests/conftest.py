from __future__ import annotations

from pathlib import Path

import pytest

from quantale_kit.groupoid import GLocale, discrete_group, pair_groupoid, self_action
from quantale_kit.order import FiniteSpace
from quantale_kit.qmodule import module_of_glocale
from quantale_kit.quantale import opens_quantale

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

# Filled by test_acceptance.py; printed at the end of the session so the
# acceptance verdicts land in the captured test output.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {text}")


@pytest.fixture(scope="session")
def z2():
    return discrete_group("Z2")


@pytest.fixture(scope="session")
def z2q(z2):
    return opens_quantale(z2)


@pytest.fixture(scope="session")
def pair2():
    return pair_groupoid(2)


@pytest.fixture(scope="session")
def pair2q(pair2):
    return opens_quantale(pair2)


def swap_glocale(G):
    X = FiniteSpace(["x1", "x2"])
    act = {("1", "x1"): "x1", ("1", "x2"): "x2", ("g", "x1"): "x2", ("g", "x2"): "x1"}
    return GLocale(G, X, {"x1": "*", "x2": "*"}, act, name="swap")


@pytest.fixture(scope="session")
def z2_swap(z2):
    return swap_glocale(z2)


@pytest.fixture(scope="session")
def z2_swap_module(z2, z2q, z2_swap):
    return module_of_glocale(z2, z2_swap, z2q)


@pytest.fixture(scope="session")
def z2_self_module(z2, z2q):
    return module_of_glocale(z2, self_action(z2), z2q)


@pytest.fixture(scope="session")
def pair2_self_module(pair2, pair2q):
    return module_of_glocale(pair2, self_action(pair2), pair2q)
