"""Solvers for the maximal simultaneous-read problem.

``solve_exact`` certifies the optimum by depth-first branch and bound and
works for every write policy and coding.  The remaining solvers are the
polynomial special cases: bipartite matching for k=1, general matching on
the MU graph for k=n=2, and a greedy single pass that is optimal when
packets occupy consecutive MU runs (or aligned blocks).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product

import networkx as nx

from .core import (
    BLOCKS,
    CONSECUTIVE,
    MDS,
    ReadPlan,
    SwitchInstance,
    require_valid,
    to_bipartite_graph,
)
from .matching import maximum_bipartite_matching

EXACT = "exact"
MATCHING_K1 = "matching_k1"
MATCHING_K2N2 = "matching_k2n2"
GREEDY_CONSECUTIVE = "greedy_consecutive"
GREEDY_BLOCKS = "greedy_blocks"


@dataclass(frozen=True)
class SolveResult:
    """A read plan plus the solver's claim about it.

    ``optimal_count`` equals the certified maximum unless
    ``budget_exceeded`` is set, in which case it is only the best count
    found before the search budget ran out.
    """

    plan: ReadPlan
    optimal_count: int
    solver_tag: str
    nodes_explored: int = 0
    budget_exceeded: bool = False


class _Abort(Exception):
    """Unwinds the exact search on budget exhaustion or a proven optimum."""


def _mask_units(units) -> int:
    mask = 0
    for u in units:
        mask |= 1 << (u - 1)
    return mask


def _units_from_mask(mask: int) -> frozenset[int]:
    units = set()
    u = 1
    while mask:
        if mask & 1:
            units.add(u)
        mask >>= 1
        u += 1
    return frozenset(units)


def solve_exact(
    inst: SwitchInstance,
    node_budget: int | None = None,
    time_budget: float | None = None,
) -> SolveResult:
    """Certify the maximum number of simultaneously readable packets.

    Packets are branched in input order: first on each canonical feasible
    k-subset of the packet's still-free MUs, then on skipping the packet.
    Free MUs that the remaining packets cannot distinguish (identical
    membership among undecided packets) are interchangeable and only one
    representative choice per equivalence class is explored.  The search
    is pruned with ``served + min(remaining, free_relevant // k)``.

    ``node_budget`` / ``time_budget`` (seconds) cap the search; when one
    trips, the best plan found so far is returned with
    ``budget_exceeded=True`` instead of a silent optimality claim.
    """
    require_valid(inst)
    L, k = inst.load, inst.k
    packet_masks = [_mask_units(inst.packets[i]) for i in range(L)]
    # unit_members[u] bit i set <=> packet i+1 stores a chunk on MU u
    unit_members = {u: 0 for u in range(1, inst.n_units + 1)}
    for i, mask in enumerate(packet_masks):
        for u in _units_from_mask(mask):
            unit_members[u] |= 1 << i
    suffix_units = [0] * (L + 1)
    for i in range(L - 1, -1, -1):
        suffix_units[i] = suffix_units[i + 1] | packet_masks[i]
    max_possible = min(L, inst.n_units // k)

    group_masks: list[tuple[int, ...]] | None = None
    if inst.is_replication:
        group_masks = [
            tuple(_mask_units(g) for g in inst.replication_groups(pid))
            for pid in inst.packet_ids()
        ]

    best_count = 0
    best_choices: list[int | None] = [None] * L
    current: list[int | None] = [None] * L
    nodes = 0
    exceeded = False
    deadline = time.monotonic() + time_budget if time_budget is not None else None

    def class_representatives(avail: int, i: int) -> list[list[int]]:
        """Partition avail units into classes the packets after i cannot tell apart."""
        classes: dict[int, list[int]] = {}
        future = ~((1 << (i + 1)) - 1)
        for u in sorted(_units_from_mask(avail)):
            classes.setdefault(unit_members[u] & future, []).append(u)
        return sorted(classes.values(), key=lambda us: us[0])

    def mds_choices(avail: int, i: int) -> list[int]:
        classes = class_representatives(avail, i)
        out: list[int] = []

        def pick(ci: int, need: int, mask: int) -> None:
            if need == 0:
                out.append(mask)
                return
            if ci == len(classes):
                return
            if sum(len(c) for c in classes[ci:]) < need:
                return
            units = classes[ci]
            for take in range(min(need, len(units)), -1, -1):
                m = mask
                for u in units[:take]:
                    m |= 1 << (u - 1)
                pick(ci + 1, need - take, m)

        pick(0, k, 0)
        return out

    def replication_choices(avail: int, i: int) -> list[int]:
        assert group_masks is not None
        per_group: list[list[int]] = []
        future = ~((1 << (i + 1)) - 1)
        for gmask in group_masks[i]:
            free_units = sorted(_units_from_mask(gmask & avail))
            if not free_units:
                return []
            seen: dict[int, int] = {}
            for u in free_units:
                seen.setdefault(unit_members[u] & future, u)
            per_group.append(sorted(seen.values()))
        return [_mask_units(combo) for combo in product(*per_group)]

    def check_budgets() -> None:
        # runs on node entry, before counting, so nodes_explored <= budget
        nonlocal exceeded
        if node_budget is not None and nodes >= node_budget:
            exceeded = True
            raise _Abort
        if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
            exceeded = True
            raise _Abort

    def dfs(i: int, free: int, count: int) -> None:
        nonlocal nodes, best_count, best_choices
        check_budgets()
        nodes += 1
        if count > best_count:
            best_count = count
            best_choices = current.copy()
            if best_count == max_possible:
                raise _Abort
        if i == L:
            return
        relevant = free & suffix_units[i]
        if count + min(L - i, relevant.bit_count() // k) <= best_count:
            return
        avail = packet_masks[i] & free
        if avail.bit_count() >= k:
            choices = (
                replication_choices(avail, i)
                if group_masks is not None
                else mds_choices(avail, i)
            )
            for choice in choices:
                current[i] = choice
                dfs(i + 1, free & ~choice, count + 1)
            current[i] = None
        dfs(i + 1, free, count)

    try:
        dfs(0, (1 << inst.n_units) - 1, 0)
    except _Abort:
        pass

    assignments = {
        i + 1: _units_from_mask(mask)
        for i, mask in enumerate(best_choices)
        if mask is not None
    }
    return SolveResult(
        plan=ReadPlan(assignments),
        optimal_count=best_count,
        solver_tag=EXACT,
        nodes_explored=nodes,
        budget_exceeded=exceeded,
    )


def solve_k1_matching(inst: SwitchInstance) -> SolveResult:
    """Optimal plan for k=1 via maximum bipartite packet/MU matching."""
    require_valid(inst)
    if inst.k != 1:
        raise ValueError("matching solver requires k = 1")
    graph = to_bipartite_graph(inst)
    matched = maximum_bipartite_matching(graph.packet_units)
    plan = ReadPlan({pid: frozenset({unit}) for pid, unit in matched.items()})
    return SolveResult(plan=plan, optimal_count=len(matched), solver_tag=MATCHING_K1)


def solve_k2n2_matching(inst: SwitchInstance) -> SolveResult:
    """Optimal plan for k=n=2 via maximum matching on the MU graph.

    Each packet becomes the edge between its two MUs; parallel packets on
    the same MU pair collapse to one usable edge (the lowest packet id).
    """
    require_valid(inst)
    if (inst.k, inst.n) != (2, 2):
        raise ValueError("MU-graph matching requires k = n = 2")
    edge_packet: dict[tuple[int, int], int] = {}
    for pid in inst.packet_ids():
        pair = tuple(sorted(inst.packet_units(pid)))
        edge_packet.setdefault(pair, pid)
    graph = nx.Graph()
    graph.add_nodes_from(range(1, inst.n_units + 1))
    graph.add_edges_from(sorted(edge_packet))
    matching = nx.max_weight_matching(graph, maxcardinality=True)
    assignments = {}
    for u, v in matching:
        pair = (u, v) if u < v else (v, u)
        assignments[edge_packet[pair]] = frozenset(pair)
    return SolveResult(
        plan=ReadPlan(assignments),
        optimal_count=len(assignments),
        solver_tag=MATCHING_K2N2,
    )


def solve_consecutive_greedy(inst: SwitchInstance) -> SolveResult:
    """Single greedy pass, optimal when every packet occupies a consecutive run.

    Packets are visited by non-decreasing maximal MU index (ties by packet
    id); a packet is served iff at least k of its MUs are still free, and
    it consumes the k lowest of them.  Requires MDS coding: the k-lowest
    rule ignores replica-group structure.
    """
    require_valid(inst)
    if inst.write_policy not in (CONSECUTIVE, BLOCKS):
        raise ValueError("greedy pass is only optimal for consecutive or block placement")
    if inst.coding != MDS:
        raise ValueError("greedy pass requires MDS coding")
    order = sorted(inst.packet_ids(), key=lambda pid: (max(inst.packet_units(pid)), pid))
    residual = {pid: set(inst.packet_units(pid)) for pid in order}
    assignments: dict[int, frozenset[int]] = {}
    for pos, pid in enumerate(order):
        if len(residual[pid]) < inst.k:
            continue
        taken = sorted(residual[pid])[: inst.k]
        assignments[pid] = frozenset(taken)
        for later in order[pos + 1 :]:
            residual[later] -= set(taken)
    return SolveResult(
        plan=ReadPlan(assignments),
        optimal_count=len(assignments),
        solver_tag=GREEDY_CONSECUTIVE,
    )


def solve_blocks(inst: SwitchInstance) -> SolveResult:
    """Optimal plan for aligned-block placement by solving blocks independently.

    All packets of one block share the same n MUs, so a block serves its
    floor(n/k) lowest-id packets with consecutive k-slices of the block.
    """
    require_valid(inst)
    if inst.write_policy != BLOCKS:
        raise ValueError("block solver requires blocks placement")
    if inst.coding != MDS:
        raise ValueError("block solver requires MDS coding")
    by_block: dict[int, list[int]] = {}
    for pid in inst.packet_ids():
        block = (min(inst.packet_units(pid)) - 1) // inst.n
        by_block.setdefault(block, []).append(pid)
    assignments: dict[int, frozenset[int]] = {}
    cap = inst.n // inst.k
    for block, pids in sorted(by_block.items()):
        base = block * inst.n + 1
        for slot, pid in enumerate(sorted(pids)[:cap]):
            start = base + slot * inst.k
            assignments[pid] = frozenset(range(start, start + inst.k))
    return SolveResult(
        plan=ReadPlan(assignments),
        optimal_count=len(assignments),
        solver_tag=GREEDY_BLOCKS,
    )


def solve_auto(
    inst: SwitchInstance,
    node_budget: int | None = None,
    time_budget: float | None = None,
) -> SolveResult:
    """Dispatch to the cheapest solver whose optimality guarantee applies."""
    require_valid(inst)
    if inst.k == 1:
        return solve_k1_matching(inst)
    if (inst.k, inst.n) == (2, 2):
        return solve_k2n2_matching(inst)
    if inst.coding == MDS and inst.write_policy == CONSECUTIVE:
        return solve_consecutive_greedy(inst)
    if inst.coding == MDS and inst.write_policy == BLOCKS:
        return solve_blocks(inst)
    return solve_exact(inst, node_budget=node_budget, time_budget=time_budget)


def dispatch_solver(
    name: str,
    inst: SwitchInstance,
    node_budget: int | None = None,
    time_budget: float | None = None,
) -> SolveResult:
    """Resolve a solver selector (auto/exact/matching/greedy) and run it."""
    if name == "auto":
        return solve_auto(inst, node_budget=node_budget, time_budget=time_budget)
    if name == "exact":
        return solve_exact(inst, node_budget=node_budget, time_budget=time_budget)
    if name == "matching":
        if inst.k == 1:
            return solve_k1_matching(inst)
        if (inst.k, inst.n) == (2, 2):
            return solve_k2n2_matching(inst)
        raise ValueError("matching solver applies only when k=1 or k=n=2")
    if name == "greedy":
        if inst.write_policy == BLOCKS:
            return solve_blocks(inst)
        return solve_consecutive_greedy(inst)
    raise ValueError(f"unknown solver {name!r}")
