"""Exact tools for weighted partial systems, their correspondences and conjugacy relations."""

from .conjugacy import (
    ConjugacyCertificate,
    EdgeFunction,
    Verdict,
    check_branch_transition,
    check_graph_conjugacy,
    decide_finite,
    decide_weighted_orbit,
    find_graph_conjugacy_finite,
    forced_H_values,
    replay_witness,
    transition_ratio,
    verify_weighted_orbit_certificate,
)
from .io import dump_system, parse_system
from .spaces import FiniteSpace, IntervalSpace, IntervalUnion, PLFunc
from .wps import WPS, Branch, finite_system, graph_system, interval_system, matrix_system

__version__ = "0.1.0"
