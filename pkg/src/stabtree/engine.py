"""Composite-atomicity execution semantics.

A step selects a nonempty subset of the enabled processes; every selected
process reads the pre-step configuration and writes its own state, all
atomically. Executions run until no process is enabled (terminal) or a step
budget is exhausted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from . import protocol
from .graph import WeightedGraph
from .protocol import ROOT_STATE, ProcessState, Rule, Status

Configuration = tuple[ProcessState, ...]


class EngineError(Exception):
    pass


class EmptySelectionError(EngineError):
    """The daemon returned an empty selection."""


class NotEnabledError(EngineError):
    """The daemon selected a process that is not enabled."""


class ConfigurationError(EngineError):
    """Malformed configuration (or configuration file)."""


def normal_initial_configuration(g: WeightedGraph) -> Configuration:
    """All non-root processes isolated (parent self, distance 0)."""
    return tuple(
        ROOT_STATE if u == g.root_id else ProcessState(Status.I, u, 0)
        for u in range(g.node_count)
    )


def random_configuration(g: WeightedGraph, seed: int, d_cap: int) -> Configuration:
    """Seeded arbitrary configuration: any status, any neighbor-or-self
    parent, any distance in [0, d_cap]."""
    import random

    if d_cap < 0:
        raise ConfigurationError(f"d_cap must be >= 0, got {d_cap}")
    rng = random.Random(seed)
    states = []
    for u in range(g.node_count):
        if u == g.root_id:
            states.append(ROOT_STATE)
            continue
        status = rng.choice(list(Status))
        par = rng.choice(sorted(g.adjacency[u]) + [u])
        states.append(ProcessState(status, par, rng.randint(0, d_cap)))
    return tuple(states)


def validate_configuration(config: Configuration, g: WeightedGraph) -> None:
    if len(config) != g.node_count:
        raise ConfigurationError(
            f"configuration has {len(config)} states for {g.node_count} nodes"
        )
    for u, state in enumerate(config):
        if u == g.root_id:
            if state != ROOT_STATE:
                raise ConfigurationError(f"root state must be {ROOT_STATE}, got {state}")
            continue
        if not isinstance(state.status, Status):
            raise ConfigurationError(f"node {u}: bad status {state.status!r}")
        if not isinstance(state.par, int) or not 0 <= state.par < g.node_count:
            raise ConfigurationError(f"node {u}: bad parent {state.par!r}")
        if not isinstance(state.d, int) or state.d < 0:
            raise ConfigurationError(f"node {u}: bad distance {state.d!r}")


def enabled_set(config: Configuration, g: WeightedGraph) -> frozenset[int]:
    root = g.root_id
    return frozenset(
        u
        for u in range(g.node_count)
        if u != root and protocol.enabled_rule(config, g, u) is not None
    )


def is_terminal(config: Configuration, g: WeightedGraph) -> bool:
    root = g.root_id
    return all(
        protocol.enabled_rule(config, g, u) is None
        for u in range(g.node_count)
        if u != root
    )


def step(config: Configuration, g: WeightedGraph, selection: Iterable[int]) -> Configuration:
    """Apply one atomic step to ``selection``; all reads precede all writes."""
    chosen = frozenset(selection)
    if not chosen:
        raise EmptySelectionError("selection must be nonempty")
    new = list(config)
    for u in chosen:
        rule = protocol.enabled_rule(config, g, u)
        if rule is None:
            raise NotEnabledError(f"node {u} is not enabled")
        new[u] = protocol._apply(config, g, u, rule)
    return tuple(new)


@dataclass(frozen=True)
class StepRecord:
    selected: frozenset[int]
    fired: Mapping[int, Rule]
    pre_enabled: frozenset[int]


@dataclass
class ExecutionTrace:
    configs: list[Configuration]
    steps: list[StepRecord]
    terminated: bool

    @property
    def initial(self) -> Configuration:
        return self.configs[0]

    @property
    def final(self) -> Configuration:
        return self.configs[-1]

    @property
    def step_count(self) -> int:
        return len(self.steps)


def default_max_steps(g: WeightedGraph) -> int:
    """Ten times the worst-case step bound: a violated bound shows up as
    non-termination instead of an endless run."""
    from . import analysis  # deferred: analysis imports this module

    return max(10, 10 * analysis.step_bound_for(g))


def run(
    config: Configuration,
    g: WeightedGraph,
    policy,
    max_steps: int | None = None,
) -> ExecutionTrace:
    """Drive ``policy`` until a terminal configuration or ``max_steps``."""
    validate_configuration(config, g)
    if max_steps is None:
        max_steps = default_max_steps(g)
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    root = g.root_id
    enabled: dict[int, Rule] = {}
    for u in range(g.node_count):
        if u != root:
            rule = protocol.enabled_rule(config, g, u)
            if rule is not None:
                enabled[u] = rule
    configs = [config]
    steps: list[StepRecord] = []
    while enabled and len(steps) < max_steps:
        pre_enabled = frozenset(enabled)
        selection = frozenset(policy.select(config, g, dict(enabled)))
        if not selection:
            raise EmptySelectionError(f"daemon {policy.name!r} selected nothing")
        if not selection <= pre_enabled:
            raise NotEnabledError(
                f"daemon {policy.name!r} selected disabled nodes {sorted(selection - pre_enabled)}"
            )
        fired = {u: enabled[u] for u in selection}
        new = list(config)
        for u in selection:
            new[u] = protocol._apply(config, g, u, fired[u])
        config = tuple(new)
        # Guards read only the process and its neighbors, so only the
        # selected nodes and their neighbors can change enabledness.
        affected = set(selection)
        for u in selection:
            affected.update(g.adjacency[u])
        affected.discard(root)
        for u in affected:
            rule = protocol.enabled_rule(config, g, u)
            if rule is None:
                enabled.pop(u, None)
            else:
                enabled[u] = rule
        steps.append(StepRecord(selection, fired, pre_enabled))
        configs.append(config)
    return ExecutionTrace(configs=configs, steps=steps, terminated=not enabled)


# --- configuration file format ---------------------------------------------
#
# One line per non-root process (the constant root line is omitted):
#   p <id> <status:I|C|EB|EF> <par:id> <d:uint>


def format_configuration(config: Configuration, g: WeightedGraph) -> str:
    lines = []
    for u, state in enumerate(config):
        if u == g.root_id:
            continue
        lines.append(f"p {u} {state.status.value} {state.par} {state.d}")
    return "\n".join(lines) + "\n"


def parse_configuration(text: str, g: WeightedGraph) -> Configuration:
    states: dict[int, ProcessState] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] != "p" or len(fields) != 5:
            raise ConfigurationError(f"line {lineno}: expected 'p <id> <status> <par> <d>'")
        try:
            u = int(fields[1])
            status = Status(fields[2])
            par = int(fields[3])
            d = int(fields[4])
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: {exc}") from exc
        if not 0 <= u < g.node_count or u == g.root_id:
            raise ConfigurationError(f"line {lineno}: bad process id {u}")
        if u in states:
            raise ConfigurationError(f"line {lineno}: duplicate process {u}")
        states[u] = ProcessState(status, par, d)
    missing = [u for u in range(g.node_count) if u != g.root_id and u not in states]
    if missing:
        raise ConfigurationError(f"missing states for processes {missing}")
    config = tuple(
        ROOT_STATE if u == g.root_id else states[u] for u in range(g.node_count)
    )
    validate_configuration(config, g)
    return config


def load_configuration(path, g: WeightedGraph) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_configuration(fh.read(), g)


def save_configuration(config: Configuration, g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_configuration(config, g))


# --- trace output -----------------------------------------------------------
#
# JSON lines: one header record, then one record per step carrying the
# selection, the fired rules, and the post-step states of selected nodes.


def _state_json(state: ProcessState) -> list:
    return [state.status.value, state.par, state.d]


def write_trace(
    trace: ExecutionTrace,
    fh: IO[str],
    *,
    graph_name: str = "",
    seed: int | None = None,
    daemon: str = "",
) -> None:
    header = {
        "type": "header",
        "graph": graph_name,
        "seed": seed,
        "daemon": daemon,
        "terminated": trace.terminated,
        "initial": [_state_json(s) for s in trace.initial],
    }
    fh.write(json.dumps(header) + "\n")
    for i, (record, post) in enumerate(zip(trace.steps, trace.configs[1:])):
        fh.write(
            json.dumps(
                {
                    "type": "step",
                    "index": i,
                    "selected": sorted(record.selected),
                    "fired": {str(u): r.value for u, r in sorted(record.fired.items())},
                    "post": {str(u): _state_json(post[u]) for u in sorted(record.selected)},
                }
            )
            + "\n"
        )
