"""Schedulers ("daemons") deciding which enabled processes fire each step.

The protocol's bounds hold under any daemon, so these policies are probes,
not assumptions: synchronous and central cover the classic extremes, the
random distributed daemon samples arbitrary interleavings, and the
adversarial heuristics try to stretch executions.

Randomized policies draw from a counter-based generator keyed by (seed,
step index), so a trace is bit-reproducible for a fixed seed no matter how
selections are evaluated.
"""

from __future__ import annotations

import random
from typing import Mapping

from . import protocol
from .graph import WeightedGraph
from .protocol import Rule


class DaemonSpecError(ValueError):
    """Unparseable daemon specification string."""


class DaemonPolicy:
    """Strategy mapping (configuration, enabled processes) to a selection.

    ``enabled`` is a mapping from node id to its enabled rule; the returned
    set must be a nonempty subset of its keys. A policy instance is bound
    to a single execution at a time (it keeps a step counter).
    """

    name = "daemon"
    seed: int | None = None

    def select(self, config, g: WeightedGraph, enabled: Mapping[int, Rule]) -> frozenset[int]:
        raise NotImplementedError


class _SeededPolicy(DaemonPolicy):
    def __init__(self, seed: int):
        self.seed = seed
        self._step = 0

    def _rng(self) -> random.Random:
        rng = random.Random((self.seed + 1) * 0x9E3779B97F4A7C15 + self._step)
        self._step += 1
        return rng


class SynchronousDaemon(DaemonPolicy):
    name = "sync"

    def select(self, config, g, enabled):
        return frozenset(enabled)


class CentralDaemon(_SeededPolicy):
    name = "central"

    def select(self, config, g, enabled):
        return frozenset({self._rng().choice(sorted(enabled))})


class RandomDistributedDaemon(_SeededPolicy):
    name = "rand"

    def __init__(self, seed: int, p: float):
        if not 0 < p <= 1:
            raise DaemonSpecError(f"inclusion probability must be in (0, 1], got {p}")
        super().__init__(seed)
        self.p = p
        self.name = f"rand:p={p}"

    def select(self, config, g, enabled):
        rng = self._rng()
        nodes = sorted(enabled)
        while True:
            chosen = frozenset(u for u in nodes if rng.random() < self.p)
            if chosen:
                return chosen


class AdversarialDaemon(_SeededPolicy):
    """Heuristic worst-case schedulers.

    ``starve-cleanup`` fires every distance-correction move while deferring
    cleanup rules; ``max-churn`` fires the single process whose move shifts
    its distance value the most. Both fall back to a random enabled process
    when their preferred set is empty.
    """

    STRATEGIES = ("starve-cleanup", "max-churn")

    def __init__(self, seed: int, strategy: str):
        if strategy not in self.STRATEGIES:
            raise DaemonSpecError(f"unknown adversarial strategy {strategy!r}")
        super().__init__(seed)
        self.strategy = strategy
        self.name = f"adv:{strategy}"

    def select(self, config, g, enabled):
        if self.strategy == "starve-cleanup":
            corrections = [u for u, rule in enabled.items() if rule is Rule.R_C]
            if corrections:
                self._step += 1  # keep the counter in lockstep with draws
                return frozenset(corrections)
            return frozenset({self._rng().choice(sorted(enabled))})
        # max-churn
        best: tuple[int, int, int] | None = None  # (delta, -u, u)
        for u, rule in enabled.items():
            if rule is Rule.R_C or rule is Rule.R_R:
                new = protocol.compute_path(config, g, u)
                delta = abs(new.d - config[u].d)
                cand = (delta, -u, u)
                if best is None or cand > best:
                    best = cand
        if best is not None:
            self._step += 1
            return frozenset({best[2]})
        return frozenset({self._rng().choice(sorted(enabled))})


def synchronous_daemon() -> DaemonPolicy:
    return SynchronousDaemon()


def central_daemon(seed: int) -> DaemonPolicy:
    return CentralDaemon(seed)


def random_distributed_daemon(seed: int, p: float) -> DaemonPolicy:
    return RandomDistributedDaemon(seed, p)


def adversarial_daemon(seed: int, strategy: str) -> DaemonPolicy:
    return AdversarialDaemon(seed, strategy)


def parse_daemon_spec(spec: str, seed: int = 0) -> DaemonPolicy:
    """Build a policy from its command-line name.

    Known specs: ``sync``, ``central``, ``rand:p=<float>``, ``adv:starve``,
    ``adv:churn``.
    """
    if spec == "sync":
        return synchronous_daemon()
    if spec == "central":
        return central_daemon(seed)
    if spec.startswith("rand:p="):
        try:
            p = float(spec[len("rand:p="):])
        except ValueError as exc:
            raise DaemonSpecError(f"bad probability in {spec!r}") from exc
        return random_distributed_daemon(seed, p)
    if spec == "adv:starve":
        return adversarial_daemon(seed, "starve-cleanup")
    if spec == "adv:churn":
        return adversarial_daemon(seed, "max-churn")
    raise DaemonSpecError(f"unknown daemon spec {spec!r}")
