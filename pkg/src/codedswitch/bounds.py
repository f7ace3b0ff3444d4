"""Probabilistic lower bound and Hall-condition upper bound machinery.

The lower bound comes from a randomized rounding argument: assign every
MU independently to one of its adjacent packets, each with probability
1/degree; a packet receiving at least k MUs is readable.  The expected
number of readable packets, a sum of Poisson-binomial tail probabilities,
lower-bounds the optimum.  The upper bound targets random ensembles: a
full-throughput plan requires the whole packet set to satisfy the Hall
condition |T(W)| >= k|W|, whose probability follows from the distribution
of the union size of random n-subsets (a balls-and-bins style Markov
chain with hypergeometric steps).

Both bound families assume MDS coding, where any k chunks recover a
packet; replication-coded instances are rejected.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import (
    BipartiteGraph,
    ReadPlan,
    SwitchInstance,
    require_valid,
    to_bipartite_graph,
)

Number = float | Fraction


def poisson_binomial_tail(probs: Iterable[Number], k: int) -> Number:
    """Pr(at least k successes) for independent Bernoulli trials ``probs``.

    Sequential convolution of the success counts; works unchanged for
    floats and ``Fraction`` inputs.
    """
    probs = list(probs)
    one: Number = Fraction(1) if any(isinstance(p, Fraction) for p in probs) else 1.0
    if k <= 0:
        return one
    if k > len(probs):
        return one - one
    # pmf over 0..k-1 successes; everything at k and above is lumped together
    dp: list[Number] = [one] + [one - one] * (k - 1)
    for p in probs:
        q = one - p
        for t in range(k - 1, 0, -1):
            dp[t] = dp[t] * q + dp[t - 1] * p
        dp[0] = dp[0] * q
    return one - sum(dp)


def _packet_success_probs(
    graph: BipartiteGraph, packet_id: int, exact: bool
) -> list[Number]:
    degrees = [graph.unit_degree(u) for u in sorted(graph.packet_units[packet_id])]
    if exact:
        return [Fraction(1, d) for d in degrees]
    return [1.0 / d for d in degrees]


def packet_read_probability(
    graph: BipartiteGraph, packet_id: int, k: int, exact: bool = False
) -> Number:
    """Probability the random MU assignment leaves packet ``packet_id`` readable.

    Each MU of the packet independently lands on it with probability
    1/degree; readable means at least k hits.  Computed by convolution;
    see :func:`packet_read_probability_dft` for the spectral cross-check.
    """
    probs = _packet_success_probs(graph, packet_id, exact)
    if k > len(probs):
        warnings.warn(
            f"requested {k} chunks but packet {packet_id} stores only {len(probs)}",
            stacklevel=2,
        )
    return poisson_binomial_tail(probs, k)


def poisson_binomial_tail_dft(probs: Iterable[float], k: int) -> float:
    """Same tail probability via the Poisson-binomial DFT closed form.

    Kept as an independent oracle for the convolution path; uses complex
    exponentials over the (n+1)-th roots of unity.
    """
    p = np.array([float(x) for x in probs])
    n = len(p)
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    m = n + 1
    s = np.arange(m)
    root = np.exp(2j * np.pi * s / m)
    factors = (1.0 - p)[None, :] + p[None, :] * root[:, None]
    inner = factors.prod(axis=1)
    t_sum = np.exp(-2j * np.pi * np.outer(s, np.arange(k)) / m).sum(axis=1)
    cdf_below_k = float((t_sum * inner).sum().real) / m
    return 1.0 - cdf_below_k


def packet_read_probability_dft(graph: BipartiteGraph, packet_id: int, k: int) -> float:
    """DFT-form readability probability for one packet of a graph."""
    return poisson_binomial_tail_dft(_packet_success_probs(graph, packet_id, exact=False), k)


@dataclass(frozen=True)
class PacketReadProbability:
    packet_id: int
    q: Number


def packet_read_probabilities(
    graph: BipartiteGraph, k: int, exact: bool = False
) -> tuple[PacketReadProbability, ...]:
    return tuple(
        PacketReadProbability(pid, packet_read_probability(graph, pid, k, exact))
        for pid in graph.packet_ids
    )


def _reject_replication(inst: SwitchInstance) -> None:
    if inst.is_replication:
        raise ValueError(
            "randomized-assignment bounds assume MDS coding (any k chunks recover "
            "a packet); replication-coded instances are not covered"
        )


def lower_bound_expected(inst: SwitchInstance, exact: bool = False) -> Number:
    """Expected readable-packet count of the random assignment; lower-bounds L*."""
    require_valid(inst)
    _reject_replication(inst)
    graph = to_bipartite_graph(inst)
    qs = [packet_read_probability(graph, pid, inst.k, exact) for pid in graph.packet_ids]
    if exact:
        return sum(qs, Fraction(0))
    return math.fsum(qs)


def _assign_units(graph: BipartiteGraph, rng: np.random.Generator) -> dict[int, list[int]]:
    """Randomly hand each MU to one adjacent packet; degree-0 MUs are idle."""
    received: dict[int, list[int]] = {pid: [] for pid in graph.packet_ids}
    for unit in graph.unit_ids:
        adjacent = sorted(graph.unit_packets[unit])
        if not adjacent:
            continue
        received[adjacent[int(rng.integers(len(adjacent)))]].append(unit)
    return received


def randomized_assignment(inst: SwitchInstance, rng: np.random.Generator) -> frozenset[int]:
    """One run of the randomized rounding: the set of readable packet ids."""
    require_valid(inst)
    _reject_replication(inst)
    received = _assign_units(to_bipartite_graph(inst), rng)
    return frozenset(pid for pid, units in received.items() if len(units) >= inst.k)


def randomized_read_plan(inst: SwitchInstance, rng: np.random.Generator) -> ReadPlan:
    """Turn one randomized assignment into a valid plan (k lowest MUs each)."""
    require_valid(inst)
    _reject_replication(inst)
    received = _assign_units(to_bipartite_graph(inst), rng)
    return ReadPlan(
        {
            pid: frozenset(sorted(units)[: inst.k])
            for pid, units in received.items()
            if len(units) >= inst.k
        }
    )


@dataclass(frozen=True)
class UnionSizeDistribution:
    """Distribution of |union of w uniform n-subsets of {1..n_units}|."""

    w: int
    n: int
    n_units: int
    probs: tuple[Number, ...]

    def prob_at_least(self, size: int) -> Number:
        tail = self.probs[max(size, 0) :]
        if any(isinstance(p, Fraction) for p in self.probs):
            return sum(tail, Fraction(0))
        return math.fsum(tail)


def union_size_distribution(
    w: int, n: int, n_units: int, exact: bool = False
) -> UnionSizeDistribution:
    """Union-size law via a Markov chain over the current union size.

    Each step merges one more uniform n-subset; the number of fresh
    elements it contributes is hypergeometric:
    Pr(m -> m+j) = C(n_units-m, j) * C(m, n-j) / C(n_units, n).
    """
    if not 1 <= n <= n_units:
        raise ValueError("need 1 <= n <= n_units")
    if w < 0:
        raise ValueError("w must be non-negative")
    zero: Number = Fraction(0) if exact else 0.0
    one: Number = Fraction(1) if exact else 1.0
    total = math.comb(n_units, n)
    probs: list[Number] = [zero] * (n_units + 1)
    probs[0] = one
    for _ in range(w):
        nxt: list[Number] = [zero] * (n_units + 1)
        for m, pm in enumerate(probs):
            if pm == zero:
                continue
            for j in range(max(0, n - m), min(n, n_units - m) + 1):
                ways = math.comb(n_units - m, j) * math.comb(m, n - j)
                step = Fraction(ways, total) if exact else ways / total
                nxt[m + j] += pm * step
        probs = nxt
    return UnionSizeDistribution(w=w, n=n, n_units=n_units, probs=tuple(probs))


def hall_full_throughput_upper_bound(
    load: int, k: int, n: int, n_units: int, exact: bool = False
) -> Number:
    """Probability that ``load`` random packets jointly pass the Hall condition.

    Full throughput requires the union of all packet MU sets to reach
    k*load, so this tail probability upper-bounds the chance that a random
    instance serves every packet.  Zero whenever k*load exceeds n_units.
    """
    if not k <= n <= n_units:
        raise ValueError("need k <= n <= n_units")
    dist = union_size_distribution(load, n, n_units, exact)
    return dist.prob_at_least(k * load)


def hall_condition_check(graph: BipartiteGraph, packet_subset: Iterable[int], k: int) -> bool:
    """True iff the subset's MU neighborhood has at least k MUs per packet."""
    subset = set(packet_subset)
    return len(graph.neighborhood(subset)) >= k * len(subset)


def hall_all_subsets_check(graph: BipartiteGraph, k: int) -> bool:
    """True iff every packet subset passes the Hall condition.

    Equivalent to the existence of a plan serving all packets.  Exhaustive
    over the 2^L subsets, so guarded to L <= 20.
    """
    load = len(graph.packet_ids)
    if load > 20:
        raise ValueError("subset enumeration is guarded to 20 packets")
    masks = []
    for pid in graph.packet_ids:
        m = 0
        for u in graph.packet_units[pid]:
            m |= 1 << u
        masks.append(m)
    unions = [0] * (1 << load)
    for w in range(1, 1 << load):
        low = w & -w
        unions[w] = unions[w ^ low] | masks[low.bit_length() - 1]
        if unions[w].bit_count() < k * w.bit_count():
            return False
    return True


@dataclass(frozen=True)
class MonteCarloSummary:
    samples: int
    mean: float
    std_error: float


@dataclass(frozen=True)
class BoundReport:
    """Lower bound on the optimum next to the trivial counting upper bound."""

    lower_expected: float
    trivial_upper: int
    monte_carlo: MonteCarloSummary | None = None


def bound_report(
    inst: SwitchInstance, samples: int | None = None, seed: int = 0
) -> BoundReport:
    """Closed-form expected lower bound, optionally with a Monte Carlo check.

    Each sample runs the randomized assignment on its own substream
    (keyed by sample index), so results are reproducible and independent
    of evaluation order.
    """
    require_valid(inst)
    lower = float(lower_bound_expected(inst))
    trivial = min(inst.load, inst.n_units // inst.k)
    mc = None
    if samples is not None and samples > 0:
        sizes = []
        for j in range(samples):
            rng = np.random.default_rng(np.random.SeedSequence((seed, j)))
            sizes.append(len(randomized_assignment(inst, rng)))
        mean = math.fsum(sizes) / samples
        if samples > 1:
            var = math.fsum((x - mean) ** 2 for x in sizes) / (samples - 1)
            std_error = math.sqrt(var / samples)
        else:
            std_error = 0.0
        mc = MonteCarloSummary(samples=samples, mean=mean, std_error=std_error)
    return BoundReport(lower_expected=lower, trivial_upper=trivial, monte_carlo=mc)
