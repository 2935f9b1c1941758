"""Finite étale groupoids, their quantales of open sets, and the
correspondence between groupoid actions and quantale modules."""

from .errors import KitError, Verdict
from .groupoid import (
    EquivariantMap,
    FiniteGroupoid,
    GLocale,
    check_glocale,
    check_groupoid,
    discrete_group,
    is_etale,
    make_named,
    pair_groupoid,
    self_action,
    terminal_glocale,
)
from .order import ContinuousMap, FiniteSpace, Frame, frame_of_space
from .qmodule import QLocale, alpha_star, glocale_of_qlocale, module_of_glocale
from .quantale import InvQuantale, check_inverse_quantal_frame, mu_star, opens_quantale, support
from .sheaf import OpenQLocale, is_etale_qlocale, local_sections, open_qlocale

__version__ = "0.1.0"

__all__ = [
    "ContinuousMap",
    "EquivariantMap",
    "FiniteGroupoid",
    "FiniteSpace",
    "Frame",
    "GLocale",
    "InvQuantale",
    "KitError",
    "OpenQLocale",
    "QLocale",
    "Verdict",
    "alpha_star",
    "check_glocale",
    "check_groupoid",
    "check_inverse_quantal_frame",
    "discrete_group",
    "frame_of_space",
    "glocale_of_qlocale",
    "is_etale",
    "is_etale_qlocale",
    "local_sections",
    "make_named",
    "module_of_glocale",
    "mu_star",
    "open_qlocale",
    "opens_quantale",
    "pair_groupoid",
    "self_action",
    "support",
    "terminal_glocale",
]
