"""Solver correctness against the exhaustive oracle and each other."""

import random

import pytest

from codedswitch.core import (
    BLOCKS,
    CONSECUTIVE,
    SwitchInstance,
    validate_read_plan,
)
from codedswitch.solvers import (
    EXACT,
    GREEDY_BLOCKS,
    GREEDY_CONSECUTIVE,
    MATCHING_K1,
    MATCHING_K2N2,
    dispatch_solver,
    solve_auto,
    solve_blocks,
    solve_consecutive_greedy,
    solve_exact,
    solve_k1_matching,
    solve_k2n2_matching,
)
from conftest import brute_max_served, make_example1, random_test_instance


def test_worked_example_all_k():
    # the three-packet instance reads 1, 2, or 3 packets as k drops
    for k, expected in ((3, 1), (2, 2), (1, 3)):
        inst = make_example1(k)
        result = solve_exact(inst)
        assert result.optimal_count == expected
        assert result.solver_tag == EXACT
        assert validate_read_plan(inst, result.plan)
        assert result.plan.served_count() == expected
    assert solve_k1_matching(make_example1(1)).optimal_count == 3


def test_exact_on_empty_instance():
    inst = SwitchInstance(n_units=4, k=2, n=2, packets=[])
    result = solve_exact(inst)
    assert result.optimal_count == 0
    assert result.plan.served_count() == 0


def test_exact_rejects_invalid():
    with pytest.raises(ValueError):
        solve_exact(SwitchInstance(n_units=2, k=3, n=2, packets=[]))


def test_exact_matches_oracle_mds():
    rnd = random.Random(101)
    for _ in range(150):
        n_units = rnd.randint(2, 8)
        n = rnd.randint(1, min(4, n_units))
        k = rnd.randint(1, n)
        load = rnd.randint(0, 5)
        inst = random_test_instance(rnd, n_units, k, n, load)
        result = solve_exact(inst)
        assert result.optimal_count == brute_max_served(inst)
        assert validate_read_plan(inst, result.plan)
        assert result.plan.served_count() == result.optimal_count


def test_exact_matches_oracle_replication():
    rnd = random.Random(202)
    for _ in range(120):
        n_units = rnd.randint(2, 8)
        k = rnd.choice([1, 2])
        n = k * rnd.randint(1, 2)
        if n > n_units:
            continue
        load = rnd.randint(0, 5)
        inst = random_test_instance(rnd, n_units, k, n, load, replication=True)
        result = solve_exact(inst)
        assert result.optimal_count == brute_max_served(inst)
        assert validate_read_plan(inst, result.plan)


def test_exact_with_duplicate_packets():
    # equal packets stress the symmetry canonicalization
    inst = SwitchInstance(
        n_units=6, k=2, n=3, packets=[{1, 2, 3}] * 4 + [{4, 5, 6}] * 2
    )
    result = solve_exact(inst)
    assert result.optimal_count == brute_max_served(inst) == 2


def test_adding_a_packet_never_hurts():
    rnd = random.Random(303)
    for _ in range(40):
        n_units = rnd.randint(3, 8)
        n = rnd.randint(2, min(4, n_units))
        k = rnd.randint(1, n)
        packets = [
            frozenset(rnd.sample(range(1, n_units + 1), n)) for _ in range(4)
        ]
        counts = []
        for take in range(len(packets) + 1):
            inst = SwitchInstance(n_units=n_units, k=k, n=n, packets=packets[:take])
            counts.append(solve_exact(inst).optimal_count)
        assert counts == sorted(counts)


def test_node_budget_flags_and_emits():
    rnd = random.Random(404)
    inst = random_test_instance(rnd, 12, 2, 4, 8)
    tight = solve_exact(inst, node_budget=2)
    assert tight.budget_exceeded
    assert tight.nodes_explored <= 2
    assert validate_read_plan(inst, tight.plan)
    free = solve_exact(inst)
    assert not free.budget_exceeded
    assert free.optimal_count >= tight.optimal_count


def test_time_budget_flags():
    rnd = random.Random(405)
    inst = random_test_instance(rnd, 14, 3, 6, 12)
    result = solve_exact(inst, time_budget=0.0)
    assert result.budget_exceeded
    assert validate_read_plan(inst, result.plan)


def test_k1_matching_equals_exact():
    rnd = random.Random(505)
    for _ in range(200):
        n_units = rnd.randint(2, 10)
        n = rnd.randint(2, min(4, n_units))
        load = rnd.randint(0, 8)
        inst = random_test_instance(rnd, n_units, 1, n, load)
        result = solve_k1_matching(inst)
        assert result.solver_tag == MATCHING_K1
        assert result.optimal_count == solve_exact(inst).optimal_count
        assert validate_read_plan(inst, result.plan)


def test_k1_matching_rejects_other_k():
    with pytest.raises(ValueError):
        solve_k1_matching(make_example1(2))


def test_k2n2_matching_equals_exact():
    rnd = random.Random(606)
    for _ in range(200):
        n_units = rnd.randint(2, 10)
        load = rnd.randint(0, 8)
        inst = random_test_instance(rnd, n_units, 2, 2, load)
        result = solve_k2n2_matching(inst)
        assert result.solver_tag == MATCHING_K2N2
        assert result.optimal_count == solve_exact(inst).optimal_count
        assert validate_read_plan(inst, result.plan)


def test_k2n2_matching_rejects_other_shapes():
    with pytest.raises(ValueError):
        solve_k2n2_matching(make_example1(2))


def test_consecutive_greedy_equals_exact():
    rnd = random.Random(707)
    for _ in range(200):
        n_units = rnd.randint(2, 12)
        n = rnd.randint(1, min(5, n_units))
        k = rnd.randint(1, n)
        load = rnd.randint(0, 8)
        inst = random_test_instance(rnd, n_units, k, n, load, write_policy=CONSECUTIVE)
        result = solve_consecutive_greedy(inst)
        assert result.solver_tag == GREEDY_CONSECUTIVE
        assert result.optimal_count == solve_exact(inst).optimal_count
        assert validate_read_plan(inst, result.plan)


def test_consecutive_greedy_assignments_are_consecutive():
    rnd = random.Random(808)
    for _ in range(60):
        n_units = rnd.randint(3, 12)
        n = rnd.randint(2, min(5, n_units))
        k = rnd.randint(1, n)
        inst = random_test_instance(
            rnd, n_units, k, n, rnd.randint(1, 6), write_policy=CONSECUTIVE
        )
        plan = solve_consecutive_greedy(inst).plan
        for units in plan.assignments.values():
            assert max(units) - min(units) == len(units) - 1


def test_consecutive_greedy_rejects_unrestricted():
    with pytest.raises(ValueError):
        solve_consecutive_greedy(make_example1(2))


def test_blocks_solver_equals_exact():
    rnd = random.Random(909)
    for _ in range(100):
        n = rnd.randint(1, 4)
        blocks = rnd.randint(1, 3)
        n_units = n * blocks
        k = rnd.randint(1, n)
        load = rnd.randint(0, 6)
        inst = random_test_instance(rnd, n_units, k, n, load, write_policy=BLOCKS)
        result = solve_blocks(inst)
        assert result.solver_tag == GREEDY_BLOCKS
        assert result.optimal_count == solve_exact(inst).optimal_count
        assert validate_read_plan(inst, result.plan)


def test_blocks_solver_rejects_unaligned():
    with pytest.raises(ValueError):
        solve_blocks(make_example1(2))


def test_auto_dispatch_tags():
    assert solve_auto(make_example1(1)).solver_tag == MATCHING_K1
    inst = SwitchInstance(n_units=4, k=2, n=2, packets=[{1, 2}])
    assert solve_auto(inst).solver_tag == MATCHING_K2N2
    inst = SwitchInstance(
        n_units=5, k=2, n=3, packets=[{1, 2, 3}], write_policy=CONSECUTIVE
    )
    assert solve_auto(inst).solver_tag == GREEDY_CONSECUTIVE
    inst = SwitchInstance(n_units=6, k=2, n=3, packets=[{1, 2, 3}], write_policy=BLOCKS)
    assert solve_auto(inst).solver_tag == GREEDY_BLOCKS
    assert solve_auto(make_example1(2)).solver_tag == EXACT


def test_dispatch_solver_selectors():
    inst = make_example1(2)
    assert dispatch_solver("exact", inst).optimal_count == 2
    assert dispatch_solver("auto", inst).optimal_count == 2
    with pytest.raises(ValueError, match="matching solver"):
        dispatch_solver("matching", inst)
    with pytest.raises(ValueError, match="unknown solver"):
        dispatch_solver("simplex", inst)
    cons = SwitchInstance(
        n_units=5, k=2, n=3, packets=[{1, 2, 3}], write_policy=CONSECUTIVE
    )
    assert dispatch_solver("greedy", cons).solver_tag == GREEDY_CONSECUTIVE
