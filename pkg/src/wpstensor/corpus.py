"""Built-in example systems with their expected verdicts.

Each entry builds its systems and re-derives every expected value from
scratch, so ``run_entry`` doubles as a regression check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F
from typing import Callable

from .conjugacy import (
    FAILS,
    HOLDS,
    ConjugacyCertificate,
    EdgeFunction,
    candidate_gammas,
    check_branch_transition,
    check_graph_conjugacy,
    decide_finite,
    decide_weighted_orbit,
    forced_H_values,
    replay_witness,
    transition_ratio,
    verify_weighted_orbit_certificate,
)
from .spaces import PLFunc
from .wps import (
    WPS,
    branching_edges,
    branching_points,
    fixed_points,
    interval_system,
    is_well_supported,
    matrix_system,
)

UNIT = ((F(0), F(1)),)


def _c(v) -> PLFunc:
    return PLFunc.constant(UNIT, F(v))


def _id() -> PLFunc:
    return PLFunc.identity(UNIT)


def e1_pair() -> tuple[WPS, WPS]:
    """Identity and the zero map on [0,1], weighted (1/3, 2/3) versus (1/2, 1/2)."""
    w = interval_system(UNIT, [({0}, _id(), _c(F(1, 3))), ({0}, _c(0), _c(F(2, 3)))])
    u = interval_system(UNIT, [({0}, _id(), _c(F(1, 2))), ({0}, _c(0), _c(F(1, 2)))])
    return w, u


def tent() -> PLFunc:
    return PLFunc.from_points([(0, 1), (F(1, 2), 1), (1, 0)])


def different_invariants_pair() -> tuple[WPS, WPS]:
    s = tent()
    sig = interval_system(UNIT, [({0}, s, _c(1)), ({0}, _c(0), _c(1)), ({0}, _c(0), _c(1))])
    tau = interval_system(UNIT, [({0}, s, _c(1)), ({0}, s, _c(1)), ({0}, _c(0), _c(1))])
    return sig, tau


def _h_pair(knot) -> EdgeFunction:
    lo = PLFunc.from_points([(0, F(1, 2)), (knot, F(1, 2)), (1, 1)])
    hi = PLFunc.from_points([(0, 2), (knot, 2), (1, 1)])
    return EdgeFunction(branches=(lo, hi, hi))


def literal_H_certificate() -> ConjugacyCertificate:
    """Knots at 1/2 with claimed constant 16; the self-loop at 2/3 breaks it."""
    return ConjugacyCertificate(_id(), _h_pair(F(1, 2)), F(16))


def corrected_H_certificate() -> ConjugacyCertificate:
    """Knots moved to 3/4 so the self-loop at 2/3 has factor 1; C = 4 suffices."""
    return ConjugacyCertificate(_id(), _h_pair(F(3, 4)), F(4))


def peters_pair() -> tuple[WPS, WPS]:
    sig = interval_system(UNIT, [({0}, PLFunc.affine(UNIT, F(1, 2), 0), _c(1))])
    tau = interval_system(UNIT, [({0}, PLFunc.affine(UNIT, F(1, 2), F(1, 2)), _c(1))])
    return sig, tau


def no_coinciding_pair() -> tuple[WPS, WPS]:
    """Two contractions with disjoint images, so nothing branches."""
    m1, m2 = PLFunc.affine(UNIT, F(1, 3), 0), PLFunc.affine(UNIT, F(1, 3), F(2, 3))
    a = interval_system(UNIT, [({0}, m1, _c(1)), ({0}, m2, _c(2))])
    b = interval_system(UNIT, [({0}, m1, PLFunc.affine(UNIT, 1, 1)), ({0}, m2, _c(F(1, 5)))])
    return a, b


SINK = [[0, 1, 0], [1, 0, 0], [1, 0, 0]]


@dataclass
class Check:
    name: str
    expected: object
    observed: object

    @property
    def ok(self) -> bool:
        return self.expected == self.observed


@dataclass
class Entry:
    name: str
    summary: str
    systems: Callable[[], tuple]
    checks: Callable[[], list]


def _e1_checks() -> list[Check]:
    w, u = e1_pair()
    tr = transition_ratio(w, u)
    ratios = {("diagonal" if rp.piece.is_diagonal() else "vertical"): rp.at(F(1, 2)) for rp in tr.pieces}
    btc = check_branch_transition(w, u)
    woc = decide_weighted_orbit(w, u)
    return [
        Check("graph conjugacy via identity", HOLDS, check_graph_conjugacy(w, u).status),
        Check("transition ratio off the origin", {"diagonal": F(3, 2), "vertical": F(3, 4)}, ratios),
        Check("transition ratio at (0,0)", F(1), tr.value((F(0), F(0)))),
        Check("branching points", [F(0)], branching_points(w)),
        Check("branch-transition conjugacy", FAILS, btc.status),
        Check("discontinuity edge", (F(0), F(0)), btc.witness["edge"]),
        Check("one-sided limits", [F(3, 4), F(3, 2)], sorted(btc.witness["limits"])),
        Check("weighted-orbit conjugacy", FAILS, woc.status),
    ]


def _forced_checks() -> list[Check]:
    w, u = e1_pair()
    forced = forced_H_values(w, u)
    wit = forced.verdict.witness or {}
    return [
        Check("forced H at (0,0)", F(1), forced.values.get((F(0), F(0)))),
        Check("forced H on the diagonal", F(2, 3), forced.values.get((F(1), F(1)))),
        Check("forced-H verdict", FAILS, forced.verdict.status),
        Check("witness edge", (F(0), F(0)), wit.get("edge")),
        Check("witness limits", [F(2, 3)], wit.get("limits")),
    ]


def _diff_literal_checks() -> list[Check]:
    sig, tau = different_invariants_pair()
    cert = literal_H_certificate()
    v = verify_weighted_orbit_certificate(sig, tau, cert)
    wit = v.witness or {}
    replay = replay_witness(sig, tau, cert, wit) if wit else {}
    return [
        Check("graph conjugacy via identity", HOLDS, check_graph_conjugacy(sig, tau).status),
        Check("certificate verdict", FAILS, v.status),
        Check("witness source", F(2, 3), wit.get("source")),
        Check("witness repetitions", 10, wit.get("repeat")),
        Check("replayed violation", True, replay.get("violates")),
    ]


def _diff_corrected_checks() -> list[Check]:
    sig, tau = different_invariants_pair()
    btc = check_branch_transition(sig, tau)
    v = verify_weighted_orbit_certificate(sig, tau, corrected_H_certificate())
    return [
        Check("branching edges", [(F(0), F(1))], branching_edges(sig)),
        Check("fixed points", [F(0), F(2, 3)], fixed_points(sig).isolated_points()),
        Check("branch-transition conjugacy", FAILS, btc.status),
        Check("discontinuity edge", (F(0), F(1)), btc.witness["edge"]),
        Check("limits and value", ([F(1, 2), F(2)], F(1)), (sorted(btc.witness["limits"]), btc.witness["value"])),
        Check("corrected certificate with C = 4", HOLDS, v.status),
    ]


def _peters_checks() -> list[Check]:
    sig, tau = peters_pair()
    found = None
    for g in candidate_gammas(sig, tau):
        if check_graph_conjugacy(sig, tau, g).holds:
            found = g
            break
    flip = PLFunc.affine(UNIT, -1, 1)
    btc = check_branch_transition(sig, tau, found) if found is not None else None
    return [
        Check("homeomorphism found", flip, found),
        Check("graph conjugacy", HOLDS, check_graph_conjugacy(sig, tau, flip).status),
        Check("branching points", [], branching_points(sig)),
        Check("branch-transition conjugacy", HOLDS, btc.status if btc else None),
    ]


def _matrix_2cycle_checks() -> list[Check]:
    a, b = matrix_system([[0, 1], [1, 0]]), matrix_system([[0, 2], [3, 0]])
    woc = decide_finite(a, b, "woc")
    return [
        Check("graph", HOLDS, decide_finite(a, b, "graph").status),
        Check("branch-transition", HOLDS, decide_finite(a, b, "btc").status),
        Check("weighted-orbit", HOLDS, woc.status),
        Check("emitted constant", F(1), woc.certificate.C if woc.certificate else None),
    ]


def _matrix_noniso_checks() -> list[Check]:
    a, b = matrix_system([[0, 1], [1, 0]]), matrix_system([[1, 0], [0, 1]])
    return [Check(rel, FAILS, decide_finite(a, b, rel).status) for rel in ("graph", "btc", "woc")]


def _no_coinciding_checks() -> list[Check]:
    a, b = no_coinciding_pair()
    return [
        Check("branching points", [], branching_points(a)),
        Check("graph conjugacy", HOLDS, check_graph_conjugacy(a, b).status),
        Check("branch-transition conjugacy", HOLDS, check_branch_transition(a, b).status),
        Check("weighted-orbit conjugacy", HOLDS, decide_weighted_orbit(a, b).status),
    ]


def _sink_checks() -> list[Check]:
    return [Check("well-supported", False, is_well_supported(matrix_system(SINK)))]


CORPUS: dict[str, Entry] = {e.name: e for e in [
    Entry("cpc-distinct-btc", "identity plus zero map, two weightings: same graph, different transitions",
          e1_pair, _e1_checks),
    Entry("not-weighted-orbit-conj", "the same pair: self-loops force incompatible values of H",
          e1_pair, _forced_checks),
    Entry("different-invariants-literal-H", "tent systems with the knot-at-1/2 certificate",
          different_invariants_pair, _diff_literal_checks),
    Entry("different-invariants-corrected", "tent systems with the repaired certificate",
          different_invariants_pair, _diff_corrected_checks),
    Entry("peters-conjugacy", "x/2 against (1+x)/2, related by x -> 1-x",
          peters_pair, _peters_checks),
    Entry("matrix-2cycle", "a two-cycle under two weightings",
          lambda: (matrix_system([[0, 1], [1, 0]]), matrix_system([[0, 2], [3, 0]])), _matrix_2cycle_checks),
    Entry("matrix-nonisomorphic", "a two-cycle against two self-loops",
          lambda: (matrix_system([[0, 1], [1, 0]]), matrix_system([[1, 0], [0, 1]])), _matrix_noniso_checks),
    Entry("no-coinciding", "two contractions with disjoint images",
          no_coinciding_pair, _no_coinciding_checks),
    Entry("sink-matrix", "a state with no outgoing edge",
          lambda: (matrix_system(SINK),), _sink_checks),
]}


def run_entry(name: str) -> list[Check]:
    if name not in CORPUS:
        raise KeyError(name)
    return CORPUS[name].checks()


def all_systems() -> list[tuple[str, WPS]]:
    out = []
    for name, e in CORPUS.items():
        for k, s in enumerate(e.systems()):
            out.append((f"{name}[{k}]", s))
    return out
