"""Matching, MIS, topological order, acyclicity, component count."""

import random

import pytest

from annostream.generators import (clique_edges, cycle_edges, dag_instance,
                                   digraph_instance, gnp_edges, path_edges,
                                   star_edges, turnstile_instance,
                                   vanilla_instance)
from annostream.oracle import (oracle_acyclic, oracle_components,
                               oracle_is_mis, oracle_is_toposort,
                               oracle_max_matching)
from annostream.protocol import get_scheme, run_adversarial, run_honest
from annostream.stream import EdgeToken, GraphInstance

PETERSEN = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
            (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
            (1, 6), (2, 7), (3, 8), (4, 9), (5, 10)]


@pytest.mark.parametrize("name", ["maxmatch-frugal", "maxmatch-laconic"])
def test_matching_hand_cases(name):
    cases = [
        (6, path_edges(6), 3),
        (5, cycle_edges(5), 2),      # odd cycle needs a blossom
        (6, clique_edges(6), 3),
        (5, star_edges(1, [2, 3, 4, 5]), 1),
        (10, PETERSEN, 5),
        (4, [], 0),
    ]
    for n, edges, want in cases:
        inst = turnstile_instance(n, edges, seed=n)
        scheme = get_scheme(name).configure(inst)
        res = run_honest(scheme, inst, seed=n)
        assert res.accepted, (name, n, res.reason)
        assert res.value == want


@pytest.mark.parametrize("name", ["maxmatch-frugal", "maxmatch-laconic"])
def test_matching_random_vs_oracle(name):
    rng = random.Random(1)
    for trial in range(15):
        n = rng.randrange(4, 14)
        inst = turnstile_instance(n, gnp_edges(n, rng.uniform(0.2, 0.7),
                                               100 + trial),
                                  churn=2, seed=trial)
        scheme = get_scheme(name).configure(inst)
        res = run_honest(scheme, inst, seed=trial)
        assert res.accepted, res.reason
        assert res.value == oracle_max_matching(inst)


def test_matching_costs_stay_in_budget():
    inst = turnstile_instance(12, gnp_edges(12, 0.4, 3), seed=3)
    for s in (2, 4, 8):
        scheme = get_scheme("maxmatch-frugal").configure(inst, s=s)
        res = run_honest(scheme, inst, seed=5)
        assert res.accepted
        assert res.hcost <= scheme.hcost_bound(inst)
        assert res.vcost <= scheme.vcost_bound(inst)
    lac = get_scheme("maxmatch-laconic").configure(inst)
    res = run_honest(lac, inst, seed=5)
    assert res.accepted
    assert res.hcost <= lac.hcost_bound(inst)
    assert res.vcost <= lac.vcost_bound(inst)


def test_mis_output_is_a_true_mis():
    rng = random.Random(2)
    for trial in range(15):
        n = rng.randrange(3, 14)
        inst = turnstile_instance(n, gnp_edges(n, rng.uniform(0.1, 0.8),
                                               200 + trial), seed=trial)
        scheme = get_scheme("mis").configure(inst)
        res = run_honest(scheme, inst, seed=trial)
        assert res.accepted, res.reason
        assert oracle_is_mis(inst, res.value)
    empty = GraphInstance(n=4, model="turnstile", tokens=[])
    res = run_honest(get_scheme("mis").configure(empty), empty, seed=1)
    assert res.value == (1, 2, 3, 4)


def test_toposort_output_is_a_true_order():
    rng = random.Random(3)
    for trial in range(15):
        inst = dag_instance(rng.randrange(3, 14), rng.uniform(0.2, 0.7),
                            300 + trial)
        scheme = get_scheme("toposort").configure(inst)
        res = run_honest(scheme, inst, seed=trial)
        assert res.accepted, res.reason
        assert oracle_is_toposort(inst, res.value)


def test_toposort_refuses_cyclic_input():
    cyc = GraphInstance(n=3, model="vanilla",
                        tokens=[EdgeToken(1, 2, 1), EdgeToken(2, 3, 1),
                                EdgeToken(3, 1, 1)])
    scheme = get_scheme("toposort").configure(cyc)
    with pytest.raises(ValueError):
        run_honest(scheme, cyc, seed=1)


def test_acyclicity_both_verdicts():
    cyc = GraphInstance(n=3, model="vanilla",
                        tokens=[EdgeToken(1, 2, 1), EdgeToken(2, 3, 1),
                                EdgeToken(3, 1, 1)])
    res = run_honest(get_scheme("acyclicity").configure(cyc), cyc, seed=4)
    assert res.accepted and res.value is False
    rng = random.Random(4)
    for trial in range(12):
        inst = digraph_instance(rng.randrange(3, 12),
                                rng.uniform(0.1, 0.6), 400 + trial)
        scheme = get_scheme("acyclicity").configure(inst)
        res = run_honest(scheme, inst, seed=trial)
        assert res.accepted, res.reason
        assert res.value == oracle_acyclic(inst)


def test_components_hand_and_random():
    inst = vanilla_instance(7, [(1, 2), (2, 3), (5, 6)])
    res = run_honest(get_scheme("components").configure(inst), inst, seed=2)
    assert res.accepted and res.value == 4
    rng = random.Random(5)
    for trial in range(12):
        n = rng.randrange(3, 14)
        inst = turnstile_instance(n, gnp_edges(n, rng.uniform(0.05, 0.5),
                                               500 + trial),
                                  churn=3, seed=trial)
        scheme = get_scheme("components").configure(inst)
        res = run_honest(scheme, inst, seed=trial)
        assert res.accepted, res.reason
        assert res.value == oracle_components(inst)


@pytest.mark.parametrize("name,builder", [
    ("maxmatch-frugal",
     lambda: turnstile_instance(8, gnp_edges(8, 0.45, 21), seed=1)),
    ("maxmatch-laconic",
     lambda: turnstile_instance(8, gnp_edges(8, 0.45, 21), seed=1)),
    ("mis", lambda: turnstile_instance(8, gnp_edges(8, 0.4, 22), seed=2)),
    ("toposort", lambda: dag_instance(8, 0.5, 23)),
    ("acyclicity", lambda: dag_instance(8, 0.5, 24)),
    ("components", lambda: turnstile_instance(8, gnp_edges(8, 0.25, 25),
                                              seed=3)),
])
def test_adversarial_catch_rate(name, builder):
    inst = builder()
    scheme = get_scheme(name).configure(inst)
    for policy in scheme.mutations:
        st = run_adversarial(scheme, inst, policy, trials=60, seed=17)
        assert st.accepted_wrong == 0, (name, policy)
