"""Boolean automata networks at desk scale: parsing, signed interaction
graphs, asynchronous dynamics, cause tracing, potential transmission and
constructive update schedulers."""

from .core import (
    BAN,
    Config,
    ban_from_asts,
    ban_from_texts,
    eliminate_real_sources,
    flip,
    hd,
    nabla,
    parse_ban,
    parse_config,
    source_automata,
    step_bits,
)
from .expr import parse_expr, render
from .graph import (
    classify,
    depths,
    favour_graph,
    favour_sets,
    interaction_graph,
    path_sign_star,
    reformulate_totally_positive,
)
from .dynamics import (
    Streamline,
    Trajectory,
    attractors,
    hamiltonian_shortest,
    requires_reversibility,
    shortest_to_attractor,
    shortest_trajectory,
    step,
    transition_graph,
)
from .causality import cause_union, g_tau, kappa, tau_forest, verify_causality_lemmas
from .potential import (
    carrier_tables,
    charge,
    conjecture_only_super_transmitted,
    super_survivors,
    survivors,
    transmits,
    verify_potential_lemmas,
)
from .schedule import SCHEDULERS, bounds_suite, lemma14_check

__version__ = "0.1.0"

__all__ = [
    "BAN",
    "Config",
    "SCHEDULERS",
    "Streamline",
    "Trajectory",
    "attractors",
    "ban_from_asts",
    "ban_from_texts",
    "bounds_suite",
    "carrier_tables",
    "cause_union",
    "charge",
    "classify",
    "conjecture_only_super_transmitted",
    "depths",
    "eliminate_real_sources",
    "favour_graph",
    "favour_sets",
    "flip",
    "g_tau",
    "hamiltonian_shortest",
    "hd",
    "interaction_graph",
    "kappa",
    "lemma14_check",
    "nabla",
    "parse_ban",
    "parse_config",
    "parse_expr",
    "path_sign_star",
    "reformulate_totally_positive",
    "render",
    "requires_reversibility",
    "shortest_to_attractor",
    "shortest_trajectory",
    "source_automata",
    "step",
    "step_bits",
    "super_survivors",
    "survivors",
    "tau_forest",
    "transition_graph",
    "transmits",
    "verify_causality_lemmas",
    "verify_potential_lemmas",
]
