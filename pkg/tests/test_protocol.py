import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from stabtree.graph import build_graph, generate_random_graph
from stabtree.protocol import (
    ROOT_STATE,
    GuardNotEnabledError,
    NoCandidateParentError,
    ProcessState,
    RootQueriedError,
    Rule,
    Status,
    ab_root,
    apply_rule,
    children,
    compute_path,
    enabled_rule,
    enabled_rules,
    p_correction,
    p_reset,
)

from conftest import mk_config


@pytest.fixture
def chain():
    """r(0) - u(1) - v(2) with weights 1 and 2."""
    return build_graph([(0, 1, 1), (1, 2, 2)], 3, 0)


class TestChildren:
    def test_isolated_has_no_children(self, chain):
        config = mk_config(chain, n1=(Status.I, 0, 1), n2=(Status.C, 1, 3))
        assert children(config, chain, 1) == frozenset()

    def test_coherent_child(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 3))
        assert children(config, chain, 1) == {2}

    def test_eb_parent_admits_differing_status(self, chain):
        config = mk_config(chain, n1=(Status.EB, 0, 1), n2=(Status.EF, 1, 3))
        assert children(config, chain, 1) == {2}

    def test_distance_too_small_excludes(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 2))
        assert children(config, chain, 1) == frozenset()


class TestAbRoot:
    def test_isolated_never_abnormal(self, chain):
        config = mk_config(chain, n1=(Status.I, 1, 5))
        assert not ab_root(config, chain, 1)

    def test_non_neighbor_parent(self, chain):
        config = mk_config(chain, n2=(Status.C, 2, 1))  # parent is itself
        assert ab_root(config, chain, 2)

    def test_distance_below_parent_plus_weight(self, chain):
        # d=1 < d_r + w(1,0) = 0 + 1? No: use node 2 with weight 2.
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 2))
        assert ab_root(config, chain, 2)  # 2 < 1 + 2

    def test_coherent_child_not_abnormal(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 3))
        assert not ab_root(config, chain, 2)

    def test_status_incoherence(self, chain):
        config = mk_config(chain, n1=(Status.EF, 0, 1), n2=(Status.C, 1, 3))
        assert ab_root(config, chain, 2)  # parent EF, child C, parent not EB

    def test_root_query_rejected(self, chain):
        config = mk_config(chain)
        with pytest.raises(RootQueriedError):
            ab_root(config, chain, 0)


class TestPredicates:
    def test_p_reset(self, chain):
        config = mk_config(chain, n2=(Status.EF, 2, 4))
        assert p_reset(config, chain, 2)
        config = mk_config(chain, n2=(Status.C, 2, 4))
        assert not p_reset(config, chain, 2)

    def test_p_correction_arithmetic(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 5))
        assert p_correction(config, chain, 2)  # 1 + 2 < 5

    def test_p_correction_requires_status_c(self, chain):
        config = mk_config(chain, n1=(Status.EB, 0, 0), n2=(Status.C, 1, 3))
        assert not p_correction(config, chain, 2)


class TestComputePath:
    def test_tie_broken_to_smallest_id(self):
        # v1=node1 (d=2, w=3) and v2=node2 (d=4, w=1) both sum to 5.
        g = build_graph([(0, 1, 1), (1, 3, 3), (2, 3, 1), (0, 2, 1)], 4, 0)
        config = mk_config(g, n1=(Status.C, 0, 2), n2=(Status.C, 0, 4), n3=(Status.I, 3, 0))
        assert compute_path(config, g, 3) == ProcessState(Status.C, 1, 5)

    def test_strict_minimum(self):
        g = build_graph([(0, 1, 1), (1, 3, 1), (2, 3, 1), (0, 2, 1)], 4, 0)
        config = mk_config(g, n1=(Status.C, 0, 2), n2=(Status.C, 0, 4), n3=(Status.I, 3, 0))
        assert compute_path(config, g, 3) == ProcessState(Status.C, 1, 3)

    def test_only_correct_neighbors_are_candidates(self):
        g = build_graph([(0, 1, 1), (1, 3, 1), (2, 3, 2), (0, 2, 1)], 4, 0)
        config = mk_config(g, n1=(Status.EB, 0, 0), n2=(Status.C, 0, 7), n3=(Status.I, 3, 0))
        assert compute_path(config, g, 3) == ProcessState(Status.C, 2, 9)

    def test_no_candidate_raises(self, chain):
        config = mk_config(chain, n1=(Status.I, 1, 0), n2=(Status.I, 2, 0))
        with pytest.raises(NoCandidateParentError):
            compute_path(config, chain, 2)

    def test_result_exceeds_parent_distance(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.I, 2, 0))
        new = compute_path(config, chain, 2)
        assert new.d > config[new.par].d


class TestEnabledRule:
    def test_isolated_with_correct_neighbor_rejoins(self, chain):
        config = mk_config(chain, n1=(Status.I, 1, 0))
        assert enabled_rule(config, chain, 1) is Rule.R_R

    def test_eb_with_no_children_feeds_back(self, chain):
        config = mk_config(chain, n1=(Status.EB, 0, 1), n2=(Status.I, 2, 0))
        assert enabled_rule(config, chain, 1) is Rule.R_EF

    def test_abnormal_root_without_correction_broadcasts(self, chain):
        # node 2: d=2 < d_1 + w = 3, and no cheaper correct neighbor
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 2))
        assert enabled_rule(config, chain, 2) is Rule.R_EB

    def test_root_rejected(self, chain):
        with pytest.raises(RootQueriedError):
            enabled_rule(mk_config(chain), chain, 0)


class TestApplyRule:
    def test_eb_only_writes_status(self, chain):
        config = mk_config(chain, n1=(Status.C, 0, 1), n2=(Status.C, 1, 2))
        assert apply_rule(config, chain, 2, Rule.R_EB) == ProcessState(Status.EB, 1, 2)

    def test_isolate_only_writes_status(self, chain):
        config = mk_config(chain, n1=(Status.I, 1, 0), n2=(Status.EF, 2, 9))
        assert apply_rule(config, chain, 2, Rule.R_I) == ProcessState(Status.I, 2, 9)

    def test_rejoin_runs_compute_path(self):
        g = build_graph([(0, 1, 4)], 2, 0)
        config = mk_config(g, n1=(Status.I, 1, 0))
        assert apply_rule(config, g, 1, Rule.R_R) == ProcessState(Status.C, 0, 4)

    def test_disabled_rule_rejected(self, chain):
        config = mk_config(chain, n1=(Status.I, 1, 0))
        with pytest.raises(GuardNotEnabledError):
            apply_rule(config, chain, 1, Rule.R_EF)


def all_states_for(g, u, d_values=(0, 1, 2, 3)):
    pars = sorted(g.adjacency[u]) + [u]
    return [
        ProcessState(st, par, d)
        for st in Status
        for par in pars
        for d in d_values
    ]


def test_guard_exclusivity_exhaustive_two_nodes():
    g = build_graph([(0, 1, 2)], 2, 0)
    for state in all_states_for(g, 1, d_values=range(5)):
        config = (ROOT_STATE, state)
        rules = enabled_rules(config, g, 1)
        assert len(rules) <= 1
        expected = rules[0] if rules else None
        assert enabled_rule(config, g, 1) is expected


@settings(max_examples=300, deadline=None)
@given(data=hs.data())
def test_guard_exclusivity_and_dispatch_agree(data):
    seed = data.draw(hs.integers(0, 10_000))
    n = data.draw(hs.integers(2, 5))
    g = generate_random_graph(seed, n, 0.7, 3)
    states = [ROOT_STATE]
    for u in range(1, n):
        states.append(
            ProcessState(
                data.draw(hs.sampled_from(list(Status))),
                data.draw(hs.sampled_from(sorted(g.adjacency[u]) + [u])),
                data.draw(hs.integers(0, 8)),
            )
        )
    config = tuple(states)
    for u in range(1, n):
        rules = enabled_rules(config, g, u)
        assert len(rules) <= 1
        assert enabled_rule(config, g, u) is (rules[0] if rules else None)


@settings(max_examples=300, deadline=None)
@given(data=hs.data())
def test_correct_node_with_wrong_distance_is_enabled(data):
    # A status-C node whose distance disagrees with its parent can always move.
    seed = data.draw(hs.integers(0, 10_000))
    n = data.draw(hs.integers(2, 5))
    g = generate_random_graph(seed, n, 0.8, 3)
    states = [ROOT_STATE]
    for u in range(1, n):
        states.append(
            ProcessState(
                data.draw(hs.sampled_from(list(Status))),
                data.draw(hs.sampled_from(sorted(g.adjacency[u]) + [u])),
                data.draw(hs.integers(0, 8)),
            )
        )
    config = tuple(states)
    for u in range(1, n):
        st, par, d = config[u]
        if st is not Status.C:
            continue
        inconsistent = par not in g.adjacency[u] or d != config[par].d + g.adjacency[u][par]
        if inconsistent:
            assert enabled_rule(config, g, u) is not None
