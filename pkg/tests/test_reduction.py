"""Set-packing reduction: construction shape, equivalence, solution lifting."""

import random

import pytest

from codedswitch.core import EMPTY_PLAN, ReadPlan, UNRESTRICTED, validate_instance
from codedswitch.reduction import (
    LspInstance,
    extend_n,
    lift_solution,
    reduce_set_packing,
)
from codedswitch.solvers import solve_exact
from conftest import make_example1, random_test_instance


def brute_packing_optimum(sets) -> int:
    """Largest number of pairwise disjoint sets, by direct branching."""
    sets = [frozenset(s) for s in sets]
    load = len(sets)
    best = 0

    def rec(i: int, used: frozenset, count: int) -> None:
        nonlocal best
        best = max(best, count)
        if i == load or count + (load - i) <= best:
            return
        if not (sets[i] & used):
            rec(i + 1, used | sets[i], count + 1)
        rec(i + 1, used, count)

    rec(0, frozenset(), 0)
    return best


def random_lsp(rnd: random.Random, target: int = 1) -> LspInstance:
    universe = list(range(1, rnd.randint(3, 9) + 1))
    load = rnd.randint(1, 5)
    sets = [frozenset(rnd.sample(universe, 3)) for _ in range(load)]
    return LspInstance(set_size=3, sets=sets, target=target)


def test_lsp_instance_checks_set_sizes():
    with pytest.raises(ValueError, match="set 2"):
        LspInstance(set_size=3, sets=[{1, 2, 3}, {1, 2}], target=1)
    lsp = LspInstance(set_size=3, sets=[{3, 2, 1}], target=1)
    assert lsp.domain == (1, 2, 3)


def test_reduction_shape():
    lsp = LspInstance(
        set_size=3, sets=[{"a", "b", "c"}, {"c", "d", "e"}, {"d", "e", "f"}], target=2
    )
    red = reduce_set_packing(lsp)
    inst = red.instance
    s = len(lsp.domain)
    assert s == 6
    assert inst.n_units == 2 * s + 1 == red.theta_unit
    assert inst.k == 3
    assert inst.n == 4
    assert inst.load == 2 * len(lsp.sets)
    assert inst.write_policy == UNRESTRICTED
    assert red.target == 2 * lsp.target
    assert red.mirror_offset == s
    assert validate_instance(inst).ok
    # every packet carries the shared unit
    for pid in inst.packet_ids():
        assert red.theta_unit in inst.packet_units(pid)
    # mirrors are the originals shifted by the offset
    for i in range(1, len(lsp.sets) + 1):
        a = inst.packet_units(i) - {red.theta_unit}
        b = inst.packet_units(i + len(lsp.sets)) - {red.theta_unit}
        assert b == frozenset(u + s for u in a)
    assert red.element_unit("a") == 1


def test_reduction_element_order_is_deterministic():
    sets = [frozenset({"x", "y", "z"}), frozenset({"x", "q", "z"})]
    orders = {reduce_set_packing(LspInstance(3, sets, 1)).element_order for _ in range(5)}
    assert orders == {("q", "x", "y", "z")}


def test_reduction_rejects_small_sets():
    with pytest.raises(ValueError, match="at least 3"):
        reduce_set_packing(LspInstance(set_size=2, sets=[{1, 2}], target=1))


def test_reduction_equivalence_and_lift():
    rnd = random.Random(314)
    for _ in range(40):
        lsp = random_lsp(rnd)
        opt = brute_packing_optimum(lsp.sets)
        for m in range(0, len(lsp.sets) + 1):
            red = reduce_set_packing(
                LspInstance(set_size=3, sets=lsp.sets, target=m)
            )
            result = solve_exact(red.instance)
            assert (opt >= m) == (result.optimal_count >= 2 * m)
            lifted = lift_solution(red, result.plan)
            if opt >= m:
                assert lifted is not None
                assert len(lifted) >= m
                assert all(s in lsp.sets for s in lifted)
                union = set()
                for s in lifted:
                    assert not (s & union)
                    union |= s
            else:
                assert lifted is None


def test_lift_rejects_foreign_plans():
    lsp = LspInstance(set_size=3, sets=[{1, 2, 3}], target=1)
    red = reduce_set_packing(lsp)
    with pytest.raises(ValueError):
        lift_solution(red, ReadPlan({1: {1, 2}}))


def test_lift_none_when_plan_too_small():
    lsp = LspInstance(set_size=3, sets=[{1, 2, 3}], target=1)
    red = reduce_set_packing(lsp)
    assert lift_solution(red, EMPTY_PLAN) is None


def test_extend_n_shape_and_decision():
    rnd = random.Random(159)
    for _ in range(25):
        n_units = rnd.randint(4, 8)
        n = rnd.randint(3, min(4, n_units))
        inst = random_test_instance(rnd, n_units, 3, n, rnd.randint(1, 4))
        lstar = solve_exact(inst).optimal_count
        extended, target = extend_n(inst, 2)
        assert target == 4
        assert extended.n_units == 2 * n_units + 1
        assert extended.k == 3
        assert extended.n == n + 1
        assert extended.load == 2 * inst.load
        assert validate_instance(extended).ok
        lstar_ext = solve_exact(extended).optimal_count
        assert lstar_ext // 2 == lstar


def test_extend_n_rejects_small_k():
    with pytest.raises(ValueError, match="k >= 3"):
        extend_n(make_example1(2), 1)
