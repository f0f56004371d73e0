"""Bipartite no-signaling boxes and the nested 1-bit information-causality protocol.

Thin re-export of the compiled core: box constructors and metrics (PR,
isotropic, post-selected lossy quantum), CHSH values, twirling, and the
nested protocol simulator.
"""

from ._core import (
    Box,
    BoxError,
    DegeneratePostselectionError,
    MeasurementSettings,
    RunSummary,
    anisotropy,
    binary_entropy,
    chsh_value,
    depolarize,
    exact_protocol_stats,
    isotropic_box,
    load_box,
    local_deterministic_box,
    merit,
    mix,
    no_signaling,
    optimize_settings,
    parse_box,
    pdl_gate_matrix,
    pr_box,
    quantum_box,
    relabel,
    run_protocol,
    sample,
    save_box,
    serialize_box,
    success_probs,
    symmetrize_outputs,
    theory_S,
    uniform_box,
)

__all__ = [
    "Box",
    "BoxError",
    "DegeneratePostselectionError",
    "MeasurementSettings",
    "RunSummary",
    "anisotropy",
    "binary_entropy",
    "chsh_value",
    "depolarize",
    "exact_protocol_stats",
    "isotropic_box",
    "load_box",
    "local_deterministic_box",
    "merit",
    "mix",
    "no_signaling",
    "optimize_settings",
    "parse_box",
    "pdl_gate_matrix",
    "pr_box",
    "quantum_box",
    "relabel",
    "run_protocol",
    "sample",
    "save_box",
    "serialize_box",
    "success_probs",
    "symmetrize_outputs",
    "theory_S",
    "uniform_box",
]
