import math

import numpy as np
import pytest

from hoprl import (
    ExplorationStats,
    GatedChainEnv,
    HopConfig,
    QTable,
    Transition,
    TransitionGraph,
    hop,
    select_target,
    should_hop,
)
from hoprl.hopping import best_visited_value


def make_stats(state_count=10, action_count=4, visited=()):
    stats = ExplorationStats(state_count, action_count)
    for s in visited:
        stats.observe_visit(s)
    return stats


def test_never_hops_before_any_signal():
    q = QTable(10, 4)
    stats = make_stats(visited=[0])
    assert best_visited_value(q, stats) == 0.0
    assert should_hop(q, 0, gamma=0.9, stats=stats, cfg=HopConfig()) is False


def test_trigger_worked_example():
    # discounted outlook 0.9 against half of a best of 10: hop
    q = QTable(4, 1)
    q.set(0, 0, 10.0)
    q.set(1, 0, 1.0)
    stats = make_stats(4, 1, visited=[0, 1])
    cfg = HopConfig(prune_threshold=0.5)
    assert should_hop(q, 1, gamma=0.9, stats=stats, cfg=cfg) is True


def test_trigger_on_the_best_branch_itself():
    q = QTable(3, 1)
    q.set(0, 0, 10.0)
    stats = make_stats(3, 1, visited=[0])
    assert should_hop(q, 0, gamma=0.9, stats=stats, cfg=HopConfig(prune_threshold=0.5)) is False
    assert should_hop(q, 0, gamma=0.4, stats=stats, cfg=HopConfig(prune_threshold=0.5)) is True


def test_trigger_monotone_in_threshold():
    q = QTable(5, 2)
    q.values[:] = np.linspace(0, 3, 10).reshape(5, 2)
    stats = make_stats(5, 2, visited=range(5))
    for state in range(5):
        previous = False
        for threshold in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
            fired = should_hop(q, state, 0.9, stats, HopConfig(prune_threshold=threshold))
            assert previous is False or fired is True  # raising never unfires
            previous = fired


def test_single_visited_state_is_always_the_target():
    stats = make_stats(visited=[7])
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert select_target(stats, HopConfig(), rng) == 7


def test_identical_stats_split_evenly():
    stats = make_stats(visited=[2, 5])
    rng = np.random.default_rng(1)
    draws = np.array([select_target(stats, HopConfig(), rng) for _ in range(10_000)])
    freq = np.mean(draws == 2)
    assert abs(freq - 0.5) <= 0.02


def test_untried_actions_dominate_selection():
    # score gap of 80 at temperature 1: the analytic weight ratio e^-80
    # leaves the fully tried state essentially no probability
    stats = ExplorationStats(2, 80)
    stats.observe_visit(0)
    stats.observe_visit(1)
    for a in range(80):
        stats.observe_action(1, a)
    ratio = math.exp(-80 / 1.0)
    assert ratio < 1e-30
    rng = np.random.default_rng(2)
    draws = np.array([select_target(stats, HopConfig(target_temperature=1.0), rng) for _ in range(10_000)])
    assert np.mean(draws == 0) > 0.99


def test_selection_support_is_visited_states():
    stats = make_stats(visited=[1, 3, 8])
    rng = np.random.default_rng(3)
    targets = {select_target(stats, HopConfig(), rng) for _ in range(10_000)}
    assert targets <= {1, 3, 8}


def test_empty_visited_set_rejected():
    with pytest.raises(ValueError):
        select_target(make_stats(), HopConfig())


def test_selection_reproducible_from_config_seed():
    stats = make_stats(visited=[0, 1, 2, 3])
    cfg = HopConfig(rng_seed=42)
    first = [select_target(stats, cfg) for _ in range(5)]
    second = [select_target(stats, cfg) for _ in range(5)]
    assert first == second


def test_hop_moves_the_simulation_only():
    env = GatedChainEnv()
    stats = make_stats(env.state_count, env.action_count, visited=[0, 9])
    q = QTable(env.state_count, env.action_count)
    q.values[:] = np.random.default_rng(4).normal(size=q.values.shape)
    snapshot = q.copy()
    graph = TransitionGraph()
    graph.record(Transition(0, 1, 0.0, 9))
    edges_before = dict(graph.by_edge)

    hop(env, 9, stats)
    assert env.state == 9
    assert q.equals(snapshot)
    assert graph.by_edge == edges_before


def test_hop_rejects_unvisited_target():
    env = GatedChainEnv()
    stats = make_stats(env.state_count, env.action_count, visited=[0])
    with pytest.raises(ValueError):
        hop(env, 5, stats)
    with pytest.raises(ValueError):
        hop(env, env.state_count + 1, stats)


def test_hops_interleaved_with_steps_keep_graph_consistent():
    env = GatedChainEnv()
    stats = ExplorationStats(env.state_count, env.action_count)
    stats.observe_visit(env.state)
    graph = TransitionGraph()
    rng = np.random.default_rng(5)
    for _ in range(1000):
        if rng.random() < 0.3 and stats.explored_count > 0:
            hop(env, select_target(stats, HopConfig(), rng), stats)
        s = env.state
        a = int(rng.integers(env.action_count))
        s2, r = env.step(a)
        graph.record(Transition(s, a, r, s2))
        stats.observe_action(s, a)
        stats.observe_visit(s2)
    for s in range(env.state_count):
        assert set(graph.predecessors(s)) == {t for t in graph.by_edge.values() if t.target == s}
