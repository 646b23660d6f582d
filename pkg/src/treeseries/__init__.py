"""Guarded fixed-point systems over commutative semirings, rational tree
series and weighted tree automata."""

from .descriptions import (
    Description,
    EquationSystem,
    WeightedTreeAutomaton,
    desc_const,
    desc_param,
    desc_scale,
    desc_sigma,
    desc_substitute,
    desc_sum,
    desc_zero,
    flatten,
    from_wta,
    is_flat,
    normalize_initial,
    to_wta,
)
from .document import Document, format_document, parse_document, parse_term, parse_tree
from .semiring import BOOL, INT, NAT, TROPICAL, Semiring, SemiringValue, ZMod, get_semiring
from .series import (
    TruncatedSeries,
    behavior,
    enumerate_trees,
    equiv_up_to,
    series_add,
    series_scale,
    series_sigma,
    solve,
    wta_coeff,
)
from .simulation import SimMatrix, build_DM, build_ME, check_chain, check_simulation, find_simulations
from .terms import (
    App,
    LinearForm,
    Param,
    RankedAlphabet,
    Var,
    eval_term,
    is_proper,
    normalize,
    substitute_linear,
)

__version__ = "0.1.0"
