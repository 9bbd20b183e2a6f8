"""Trace- and configuration-level verdicts.

Legitimacy is judged against the graph module's distance oracle, never
against protocol state; round counting follows the neutralization-based
definition; segment decomposition and the step/round bound formulas turn
the protocol's worst-case guarantees into runtime checks.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import protocol
from .graph import (
    INFINITY,
    ComponentInfo,
    WeightedGraph,
    component_info,
    root_distances,
    root_hop_distances,
)
from .protocol import ProcessState, Rule, Status


class AnalysisError(Exception):
    pass


class TraceNotTerminatedError(AnalysisError):
    """Bound/milestone checks require a terminated trace."""


class MissingEnabledSetsError(AnalysisError):
    """Round counting requires per-step pre-enabled sets."""


# --- bound formulas ---------------------------------------------------------


def step_bound(n: int, n_max_cc: int, w_max: int) -> int:
    """Worst-case number of steps of any execution (integer weights)."""
    return (w_max * n_max_cc**3 + (3 - w_max) * n_max_cc + 3) * (n - 1)


def uniform_step_bound(n: int, n_max_cc: int) -> int:
    """Tighter step bound when every edge has the same weight."""
    return (n_max_cc**3 + 2 * n_max_cc + 3) * (n - 1)


def round_bound(n_max_cc: int, hop_diameter: int) -> int:
    """Worst-case number of rounds of any execution."""
    return 3 * n_max_cc + hop_diameter


def step_bound_for(g: WeightedGraph, info: ComponentInfo | None = None) -> int:
    info = info or component_info(g)
    return step_bound(g.node_count, info.n_max_cc, info.w_max)


def round_bound_for(g: WeightedGraph, info: ComponentInfo | None = None) -> int:
    info = info or component_info(g)
    return round_bound(info.n_max_cc, info.hop_diameter_root)


# --- legitimacy -------------------------------------------------------------


@dataclass
class LegitimacyReport:
    per_node: dict[int, tuple[bool, str | None]]
    config_legitimate: bool
    spanning_tree_ok: bool | None  # None unless the configuration is legitimate


def legitimate_state(
    config: Sequence[ProcessState],
    g: WeightedGraph,
    u: int,
    distances: Sequence[int | float] | None = None,
) -> tuple[bool, str | None]:
    """Verdict for one process, with the failing clause on rejection."""
    if distances is None:
        distances = root_distances(g)
    if u == g.root_id:
        return True, None
    st, par, d = config[u]
    if distances[u] == INFINITY:
        if st is Status.I:
            return True, None
        return False, "outside root component but not isolated"
    if st is not Status.C:
        return False, f"status {st.value} in root component"
    if d != distances[u]:
        return False, f"distance {d} != true distance {distances[u]}"
    adj = g.adjacency[u]
    if par not in adj:
        return False, "parent pointer does not designate a neighbor"
    if d != config[par].d + adj[par]:
        return False, "distance inconsistent with parent"
    return True, None


def legitimate_config(
    config: Sequence[ProcessState],
    g: WeightedGraph,
    distances: Sequence[int | float] | None = None,
) -> LegitimacyReport:
    if distances is None:
        distances = root_distances(g)
    per_node = {
        u: legitimate_state(config, g, u, distances) for u in range(g.node_count)
    }
    all_ok = all(ok for ok, _ in per_node.values())
    spanning_ok: bool | None = None
    if all_ok:
        spanning_ok = _spanning_tree_ok(config, g, distances)
    return LegitimacyReport(per_node, all_ok, spanning_ok)


def _spanning_tree_ok(config, g, distances) -> bool:
    # Parent edges over the root's component must chain every node to the
    # root with total weight equal to its true distance.
    for u in range(g.node_count):
        if u == g.root_id or distances[u] == INFINITY:
            continue
        weight = 0
        v = u
        for _ in range(g.node_count):
            if v == g.root_id:
                break
            par = config[v].par
            if par not in g.adjacency[v]:
                return False
            weight += g.adjacency[v][par]
            v = par
        else:
            return False  # did not reach the root: cycle or stray chain
        if weight != distances[u]:
            return False
    return True


# --- forest structure -------------------------------------------------------


@dataclass
class ForestView:
    abnormal_roots: dict[int, bool]  # node -> alive?
    branch_edges: frozenset[tuple[int, int]]
    illegal_membership: dict[int, bool]
    depth: dict[int, int]  # branch depth, only for nodes in some branch
    max_branch_depth: int


def alive_abnormal_roots(config, g: WeightedGraph) -> frozenset[int]:
    root = g.root_id
    return frozenset(
        u
        for u in range(g.node_count)
        if u != root
        and config[u].status is not Status.I
        and config[u].status is not Status.EF
        and protocol.ab_root(config, g, u)
    )


def forest_view(config, g: WeightedGraph) -> ForestView:
    root = g.root_id
    ab_roots: dict[int, bool] = {}
    for u in range(g.node_count):
        if u == root or config[u].status is Status.I:
            continue
        if protocol.ab_root(config, g, u):
            ab_roots[u] = config[u].status is not Status.EF
    depth: dict[int, int] = {}
    illegal = {u: False for u in range(g.node_count)}

    def resolve(u: int, onpath: set[int]) -> tuple[int, bool]:
        if u in depth:
            return depth[u], illegal[u]
        if u in onpath:
            raise AnalysisError(f"cycle in children relation through node {u}")
        if u == root or u in ab_roots:
            depth[u] = 1
            illegal[u] = u != root
            return 1, illegal[u]
        onpath.add(u)
        d_par, ill = resolve(config[u].par, onpath)
        onpath.discard(u)
        depth[u] = d_par + 1
        illegal[u] = ill
        return depth[u], ill

    for u in range(g.node_count):
        if u == root or config[u].status is not Status.I:
            resolve(u, set())
    edges = []
    for u in range(g.node_count):
        if u != root and config[u].status is Status.I:
            continue
        for v in protocol.children(config, g, u):
            edges.append((u, v))
    return ForestView(
        abnormal_roots=ab_roots,
        branch_edges=frozenset(edges),
        illegal_membership=illegal,
        depth=depth,
        max_branch_depth=max(depth.values(), default=0),
    )


# --- rounds -----------------------------------------------------------------


def _trace_configs(trace) -> list:
    return trace.configs if hasattr(trace, "configs") else list(trace)


def _enabled(config, g: WeightedGraph) -> frozenset[int]:
    root = g.root_id
    return frozenset(
        u
        for u in range(g.node_count)
        if u != root and protocol.enabled_rule(config, g, u) is not None
    )


def round_boundaries(trace, g: WeightedGraph) -> list[int]:
    """Configuration indices at which each round closes.

    A round closes once every process enabled at its start has either
    fired or been neutralized (enabled before a step, disabled after).
    """
    if not trace.steps:
        return []
    for record in trace.steps:
        if record.pre_enabled is None:
            raise MissingEnabledSetsError("trace lacks per-step enabled sets")
    post = [r.pre_enabled for r in trace.steps[1:]]
    post.append(_enabled(trace.configs[-1], g))
    boundaries: list[int] = []
    pending = set(trace.steps[0].pre_enabled)
    for i, record in enumerate(trace.steps):
        pending -= record.selected
        pending -= record.pre_enabled - post[i]
        if not pending:
            boundaries.append(i + 1)
            pending = set(post[i])
    return boundaries


def count_rounds(trace, g: WeightedGraph) -> int:
    """Closed rounds, plus one for a trailing partial round if any."""
    if not trace.steps:
        return 0
    boundaries = round_boundaries(trace, g)
    partial = 1 if not boundaries or boundaries[-1] != len(trace.steps) else 0
    return len(boundaries) + partial


# --- trace properties -------------------------------------------------------


def check_aar_monotone(trace, g: WeightedGraph) -> bool:
    """No alive abnormal root is ever created along the trace."""
    configs = _trace_configs(trace)
    prev: frozenset[int] | None = None
    for config in configs:
        cur = alive_abnormal_roots(config, g)
        if prev is not None and not cur <= prev:
            return False
        prev = cur
    return True


_RULE_CHAR = {Rule.R_I: "I", Rule.R_R: "R", Rule.R_C: "C", Rule.R_EB: "B", Rule.R_EF: "F"}
_SEGMENT_RE = re.compile(r"I?R?C*B?F?")


@dataclass
class SegmentReport:
    per_node_ok: dict[int, bool]
    segment_counts: dict[int, int]
    ok: bool


def segment_language_check(trace, g: WeightedGraph, info: ComponentInfo | None = None) -> SegmentReport:
    """Per node, split the trace into segments and match the rule pattern.

    A segment of a component ends at the first step where one of its alive
    abnormal roots stops being one; within a segment a node may fire at
    most: one isolate, one rejoin, any number of corrections, one freeze
    broadcast, one freeze acknowledgement, in that order. The number of
    segments never exceeds n_max_cc + 1.
    """
    info = info or component_info(g)
    configs = _trace_configs(trace)
    aars = [alive_abnormal_roots(c, g) for c in configs]
    per_node_ok: dict[int, bool] = {}
    counts: dict[int, int] = {}
    for nodes in info.components():
        nodeset = frozenset(nodes)
        boundaries = [
            i
            for i in range(len(trace.steps))
            if (aars[i] & nodeset) - aars[i + 1]
        ]
        n_segments = len(boundaries) + 1
        count_ok = n_segments <= info.n_max_cc + 1
        for u in nodes:
            if u == g.root_id:
                continue
            sequences: list[list[Rule]] = [[] for _ in range(n_segments)]
            for i, record in enumerate(trace.steps):
                if u in record.fired:
                    sequences[bisect_right(boundaries, i - 1)].append(record.fired[u])
            lang_ok = all(
                _SEGMENT_RE.fullmatch("".join(_RULE_CHAR[r] for r in seq))
                for seq in sequences
            )
            per_node_ok[u] = lang_ok and count_ok
            counts[u] = n_segments
    return SegmentReport(per_node_ok, counts, all(per_node_ok.values()))


@dataclass
class BoundReport:
    steps: int
    step_limit: int
    steps_ok: bool
    rounds: int
    round_limit: int
    rounds_ok: bool
    uniform_weights: bool
    uniform_step_limit: int | None
    uniform_ok: bool | None
    ok: bool

    @property
    def step_slack(self) -> int:
        return self.step_limit - self.steps

    @property
    def round_slack(self) -> int:
        return self.round_limit - self.rounds


def check_bounds(trace, g: WeightedGraph, info: ComponentInfo | None = None) -> BoundReport:
    if not trace.terminated:
        raise TraceNotTerminatedError("bound check requires a terminated trace")
    info = info or component_info(g)
    steps = trace.step_count
    rounds = count_rounds(trace, g)
    s_limit = step_bound(g.node_count, info.n_max_cc, info.w_max)
    r_limit = round_bound(info.n_max_cc, info.hop_diameter_root)
    weights = {w for _, _, w in g.edges()}
    uniform = len(weights) <= 1
    u_limit = uniform_step_bound(g.node_count, info.n_max_cc) if uniform else None
    u_ok = steps <= u_limit if uniform else None
    ok = steps <= s_limit and rounds <= r_limit and (u_ok is not False)
    return BoundReport(
        steps=steps,
        step_limit=s_limit,
        steps_ok=steps <= s_limit,
        rounds=rounds,
        round_limit=r_limit,
        rounds_ok=rounds <= r_limit,
        uniform_weights=uniform,
        uniform_step_limit=u_limit,
        uniform_ok=u_ok,
        ok=ok,
    )


@dataclass
class MilestoneReport:
    no_status_c_in_illegal_ok: bool    # holds after n_max_cc completed rounds
    illegal_cleared_ok: bool           # after 3*n_max_cc rounds, plus non-root
    hop_legitimacy_ok: bool            # after 3*n_max_cc + i rounds, hop <= i
    ok: bool


def check_round_milestones(trace, g: WeightedGraph, info: ComponentInfo | None = None) -> MilestoneReport:
    if not trace.terminated:
        raise TraceNotTerminatedError("milestone check requires a terminated trace")
    info = info or component_info(g)
    boundaries = round_boundaries(trace, g)
    distances = root_distances(g)
    hops = root_hop_distances(g)
    nm = info.n_max_cc
    ok_c = ok_cleared = ok_hop = True
    for idx, config in enumerate(trace.configs):
        completed = bisect_right(boundaries, idx)
        if completed < nm:
            continue
        view = forest_view(config, g)
        for u, in_illegal in view.illegal_membership.items():
            if in_illegal and config[u].status is Status.C:
                ok_c = False
        if completed < 3 * nm:
            continue
        if any(view.illegal_membership.values()):
            ok_cleared = False
        for u in range(g.node_count):
            if distances[u] == INFINITY and not legitimate_state(config, g, u, distances)[0]:
                ok_cleared = False
        budget = completed - 3 * nm
        for u in range(g.node_count):
            if hops[u] != INFINITY and hops[u] <= budget:
                if not legitimate_state(config, g, u, distances)[0]:
                    ok_hop = False
    return MilestoneReport(
        no_status_c_in_illegal_ok=ok_c,
        illegal_cleared_ok=ok_cleared,
        hop_legitimacy_ok=ok_hop,
        ok=ok_c and ok_cleared and ok_hop,
    )


# --- aggregate report -------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def full_trace_report(trace, g: WeightedGraph) -> list[CheckResult]:
    """Every per-trace check, as a flat pass/fail list."""
    info = component_info(g)
    results = [
        CheckResult("terminated", trace.terminated, f"steps={trace.step_count}")
    ]
    final = legitimate_config(trace.final, g)
    final_ok = final.config_legitimate and final.spanning_tree_ok is not False
    detail = "" if final_ok else "; ".join(
        f"node {u}: {why}" for u, (ok, why) in final.per_node.items() if not ok
    ) or "spanning tree check failed"
    results.append(CheckResult("final_legitimate", trace.terminated and final_ok, detail))
    if trace.terminated:
        bounds = check_bounds(trace, g, info)
        results.append(
            CheckResult(
                "step_bound",
                bounds.steps_ok and bounds.uniform_ok is not False,
                f"steps={bounds.steps} limit={bounds.step_limit}"
                + (
                    f" uniform_limit={bounds.uniform_step_limit}"
                    if bounds.uniform_weights
                    else ""
                ),
            )
        )
        results.append(
            CheckResult(
                "round_bound",
                bounds.rounds_ok,
                f"rounds={bounds.rounds} limit={bounds.round_limit}",
            )
        )
        milestones = check_round_milestones(trace, g, info)
        results.append(
            CheckResult(
                "round_milestones",
                milestones.ok,
                f"statusC={milestones.no_status_c_in_illegal_ok} "
                f"cleared={milestones.illegal_cleared_ok} hops={milestones.hop_legitimacy_ok}",
            )
        )
    else:
        results.append(CheckResult("step_bound", False, "NonTerminated"))
        results.append(CheckResult("round_bound", False, "NonTerminated"))
        results.append(CheckResult("round_milestones", False, "NonTerminated"))
    results.append(CheckResult("aar_monotone", check_aar_monotone(trace, g)))
    segments = segment_language_check(trace, g, info)
    results.append(
        CheckResult(
            "segment_language",
            segments.ok,
            f"max_segments={max(segments.segment_counts.values(), default=0)}",
        )
    )
    return results
