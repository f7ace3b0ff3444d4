"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the production code paths: the
exhaustive solver enumerates assignments directly, and the instance
generator uses stdlib ``random`` rather than the package's numpy streams.
"""

from __future__ import annotations

import itertools
import random

import pytest

from codedswitch.core import MDS, Replication, SwitchInstance, UNRESTRICTED


def make_example1(k: int) -> SwitchInstance:
    """The worked three-packet instance: N=5, n=3, S1={1,2,3}, S2={2,4,5},
    S3={3,4,5}."""
    return SwitchInstance(
        n_units=5,
        k=k,
        n=3,
        packets=[{1, 2, 3}, {2, 4, 5}, {3, 4, 5}],
    )


@pytest.fixture
def example1():
    return make_example1


def assignment_options(inst: SwitchInstance, pid: int) -> list[frozenset[int]]:
    """All single-packet assignments valid in isolation."""
    if inst.is_replication:
        picks = [sorted(g) for g in inst.replication_groups(pid)]
        return [frozenset(combo) for combo in itertools.product(*picks)]
    units = sorted(inst.packet_units(pid))
    return [frozenset(sub) for sub in itertools.combinations(units, inst.k)]


def brute_max_served(inst: SwitchInstance) -> int:
    """Exhaustive optimum by branching over every per-packet assignment."""
    options = [assignment_options(inst, pid) for pid in inst.packet_ids()]
    load = len(options)
    best = 0

    def rec(i: int, used: frozenset[int], count: int) -> None:
        nonlocal best
        if count + (load - i) <= best:
            return
        if i == load:
            best = max(best, count)
            return
        for opt in options[i]:
            if not (opt & used):
                rec(i + 1, used | opt, count + 1)
        rec(i + 1, used, count)

    rec(0, frozenset(), 0)
    return best


def enumerate_union_sizes(w: int, n: int, n_units: int):
    """Exact union-size law by enumerating every w-tuple of n-subsets."""
    from fractions import Fraction

    subsets = list(itertools.combinations(range(n_units), n))
    counts = [0] * (n_units + 1)
    total = 0
    for combo in itertools.product(subsets, repeat=w):
        union = set()
        for s in combo:
            union.update(s)
        counts[len(union)] += 1
        total += 1
    return [Fraction(c, total) for c in counts]


def random_test_instance(
    rnd: random.Random,
    n_units: int,
    k: int,
    n: int,
    load: int,
    write_policy: str = UNRESTRICTED,
    replication: bool = False,
) -> SwitchInstance:
    """Instance with random placements, drawn from the stdlib RNG."""
    packets = []
    for _ in range(load):
        if write_policy == UNRESTRICTED:
            units = frozenset(rnd.sample(range(1, n_units + 1), n))
        elif write_policy == "consecutive":
            start = rnd.randint(1, n_units - n + 1)
            units = frozenset(range(start, start + n))
        else:
            block = rnd.randrange(n_units // n)
            units = frozenset(range(block * n + 1, block * n + n + 1))
        packets.append(units)
    coding: str | Replication = MDS
    if replication:
        width = n // k
        per_packet = []
        for units in packets:
            ordered = sorted(units)
            per_packet.append(
                tuple(
                    frozenset(ordered[g * width : (g + 1) * width]) for g in range(k)
                )
            )
        coding = Replication(tuple(per_packet))
    return SwitchInstance(
        n_units=n_units, k=k, n=n, packets=packets, write_policy=write_policy, coding=coding
    )
