"""Open and closed XOR-magic labelings of graphs of order 2^n."""

from .graph import Graph, GraphError, VertexMap, complement, is_connected, regularity
from .families import (
    CirculantSpec,
    andrasfai,
    cartesian_product,
    circulant,
    complement_power_of_cycle,
    doob,
    hypercube,
    mobius_ladder,
    power_of_cycle,
    strong_product,
)
from .labeling import (
    BitLabel,
    Labeling,
    Verdict,
    build_power_n_graph,
    canonical_bijection,
    verify_closed_xor_magic,
    verify_open_xor_magic,
    verify_xor_magic,
)
from .algebra import int_determinant, necessary_condition_open, smith_normal_form
from .search import SearchOutcome, SearchProblem, certify, solve
from .milp import build_model, encode, render_lp, split_label
from .catalog import catalog_list, catalog_load
from .degrees import reachable_degrees

__version__ = "0.1.0"
