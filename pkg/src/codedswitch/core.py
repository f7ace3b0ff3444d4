"""Data model for coded packet storage across parallel memory units.

A switch stores each packet as ``n`` encoded chunks spread over ``n`` of its
``N`` memory units (MUs); any ``k`` chunks recover the packet.  At read time
every MU can serve a single chunk, so a set of packets is simultaneously
readable only if pairwise-disjoint k-subsets of their MU sets exist.  This
module holds the instance/plan types, their validation, the throughput
metric and the bipartite packet/MU graph view.

MU indices and packet ids are 1-based on every public surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

UNRESTRICTED = "unrestricted"
CONSECUTIVE = "consecutive"
BLOCKS = "blocks"
WRITE_POLICIES = (UNRESTRICTED, CONSECUTIVE, BLOCKS)

MDS = "mds"


@dataclass(frozen=True)
class Replication:
    """Replication coding: chunk c is stored as copies on the MUs of group c.

    ``groups_per_packet[i]`` holds the k disjoint replica groups (size n/k
    each) partitioning packet i+1's MU set.  Reading a packet requires one
    MU from every group, in contrast to MDS coding where any k MUs do.
    """

    groups_per_packet: tuple[tuple[frozenset[int], ...], ...]

    def __init__(self, groups_per_packet: Iterable[Iterable[Iterable[int]]]):
        normalized = tuple(
            tuple(sorted((frozenset(g) for g in groups), key=lambda g: sorted(g)))
            for groups in groups_per_packet
        )
        object.__setattr__(self, "groups_per_packet", normalized)


Coding = str | Replication


@dataclass(frozen=True)
class SwitchInstance:
    """One read-scheduling instance: N MUs and the MU set of each packet.

    Attributes:
        n_units: number of memory units N (MU indices run 1..N).
        k: chunks needed to recover a packet.
        n: chunks written per packet; ``packets[i]`` must have n members.
        packets: per-packet MU-index sets, in request order.
        write_policy: structure imposed on MU sets at write time.
        coding: ``"mds"`` or a :class:`Replication` read constraint.
    """

    n_units: int
    k: int
    n: int
    packets: tuple[frozenset[int], ...]
    write_policy: str = UNRESTRICTED
    coding: Coding = MDS

    def __init__(
        self,
        n_units: int,
        k: int,
        n: int,
        packets: Iterable[Iterable[int]],
        write_policy: str = UNRESTRICTED,
        coding: Coding = MDS,
    ):
        object.__setattr__(self, "n_units", int(n_units))
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "packets", tuple(frozenset(p) for p in packets))
        object.__setattr__(self, "write_policy", write_policy)
        object.__setattr__(self, "coding", coding)

    @property
    def load(self) -> int:
        """Number of requested packets L."""
        return len(self.packets)

    @property
    def is_replication(self) -> bool:
        return isinstance(self.coding, Replication)

    def packet_ids(self) -> range:
        return range(1, self.load + 1)

    def packet_units(self, packet_id: int) -> frozenset[int]:
        return self.packets[packet_id - 1]

    def replication_groups(self, packet_id: int) -> tuple[frozenset[int], ...]:
        if not isinstance(self.coding, Replication):
            raise ValueError("instance is not replication-coded")
        return self.coding.groups_per_packet[packet_id - 1]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_instance`; violations are data, not errors."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_instance(inst: SwitchInstance) -> ValidationReport:
    """Check every structural invariant of a :class:`SwitchInstance`.

    Returns a report whose violations name the offending packet (1-based)
    and the rule it breaks.  Parameter-level problems are reported once
    with an ``instance:`` prefix.
    """
    v: list[str] = []
    N, k, n = inst.n_units, inst.k, inst.n
    if N < 1:
        v.append("instance: N must be at least 1")
    if k < 1:
        v.append("instance: k must be at least 1")
    if k > n:
        v.append("instance: k exceeds n")
    if n > N:
        v.append("instance: n exceeds N")
    if inst.write_policy not in WRITE_POLICIES:
        v.append(f"instance: unknown write policy {inst.write_policy!r}")
    if inst.write_policy == BLOCKS and n >= 1 and N % n != 0:
        v.append("instance: blocks policy requires n to divide N")
    if inst.is_replication and k >= 1 and n % k != 0:
        v.append("instance: replication requires k to divide n")
    if v:
        return ValidationReport(tuple(v))

    if inst.is_replication:
        groups = inst.coding.groups_per_packet  # type: ignore[union-attr]
        if len(groups) != inst.load:
            v.append(
                f"instance: replication lists groups for {len(groups)} packets, "
                f"expected {inst.load}"
            )
            return ValidationReport(tuple(v))

    for pid in inst.packet_ids():
        units = inst.packets[pid - 1]
        if len(units) != n:
            v.append(f"packet {pid}: has {len(units)} distinct MU indices, expected n={n}")
            continue
        if not all(1 <= u <= N for u in units):
            v.append(f"packet {pid}: MU indices outside 1..{N}")
            continue
        lo, hi = min(units), max(units)
        if inst.write_policy == CONSECUTIVE and hi - lo != n - 1:
            v.append(f"packet {pid}: not consecutive")
        if inst.write_policy == BLOCKS and (hi - lo != n - 1 or (lo - 1) % n != 0):
            v.append(f"packet {pid}: not an aligned block")
        if inst.is_replication:
            v.extend(_check_replication_groups(inst, pid, units))
    return ValidationReport(tuple(v))


def _check_replication_groups(
    inst: SwitchInstance, pid: int, units: frozenset[int]
) -> list[str]:
    groups = inst.replication_groups(pid)
    size = inst.n // inst.k
    if len(groups) != inst.k:
        return [f"packet {pid}: has {len(groups)} replica groups, expected k={inst.k}"]
    v = []
    seen: set[int] = set()
    for g in groups:
        if len(g) != size:
            v.append(f"packet {pid}: replica group of size {len(g)}, expected {size}")
        if seen & g:
            v.append(f"packet {pid}: replica groups overlap")
        seen |= g
    if not v and seen != units:
        v.append(f"packet {pid}: replica groups do not partition its MU set")
    return v


def require_valid(inst: SwitchInstance) -> None:
    """Raise ``ValueError`` listing all violations if ``inst`` is invalid."""
    report = validate_instance(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))


@dataclass(frozen=True)
class ReadPlan:
    """A (partial) assignment of k disjoint MUs to each served packet.

    ``assignments`` maps served packet ids to their chosen MU k-subsets;
    unserved packets are simply absent.
    """

    assignments: Mapping[int, frozenset[int]]
    served: frozenset[int] = field(init=False)
    used_units: frozenset[int] = field(init=False)

    def __init__(self, assignments: Mapping[int, Iterable[int]]):
        fixed = {int(pid): frozenset(units) for pid, units in assignments.items()}
        object.__setattr__(self, "assignments", fixed)
        object.__setattr__(self, "served", frozenset(fixed))
        all_units: set[int] = set()
        for units in fixed.values():
            all_units |= units
        object.__setattr__(self, "used_units", frozenset(all_units))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ReadPlan) and dict(self.assignments) == dict(
            other.assignments
        )

    def served_count(self) -> int:
        return len(self.served)


EMPTY_PLAN = ReadPlan({})


def validate_read_plan(inst: SwitchInstance, plan: ReadPlan) -> bool:
    """True iff ``plan`` is a feasible simultaneous read for ``inst``.

    Feasible means: every served packet gets exactly k MUs drawn from its
    own MU set, no MU serves two packets, and under replication coding each
    served packet draws exactly one MU per replica group.
    """
    total = 0
    used: set[int] = set()
    for pid, units in plan.assignments.items():
        if not 1 <= pid <= inst.load:
            return False
        if len(units) != inst.k or not units <= inst.packet_units(pid):
            return False
        if inst.is_replication:
            if any(len(units & g) != 1 for g in inst.replication_groups(pid)):
                return False
        total += len(units)
        used |= units
    if len(used) != total:  # some MU serves two packets
        return False
    return used == set(plan.used_units) and set(plan.assignments) == set(plan.served)


def throughput(inst: SwitchInstance, served_count: int) -> Fraction:
    """Fraction of MUs actively serving packets: served_count * k / N, exact.

    Rejects counts above floor(N/k), which disjointness makes infeasible.
    """
    if served_count < 0:
        raise ValueError("served_count must be non-negative")
    if served_count > inst.n_units // inst.k:
        raise ValueError(
            f"served_count {served_count} exceeds floor(N/k) = {inst.n_units // inst.k}"
        )
    return Fraction(served_count * inst.k, inst.n_units)


@dataclass(frozen=True)
class BipartiteGraph:
    """Packet/MU adjacency view: packet vertices keep degree n; MU degrees vary."""

    packet_ids: tuple[int, ...]
    unit_ids: tuple[int, ...]
    packet_units: Mapping[int, frozenset[int]]
    unit_packets: Mapping[int, frozenset[int]]

    def unit_degree(self, unit: int) -> int:
        return len(self.unit_packets[unit])

    @property
    def edge_count(self) -> int:
        return sum(len(units) for units in self.packet_units.values())

    def neighborhood(self, packet_ids: Iterable[int]) -> frozenset[int]:
        """Union of the MU sets of the given packets."""
        out: set[int] = set()
        for pid in packet_ids:
            out |= self.packet_units[pid]
        return frozenset(out)


def to_bipartite_graph(inst: SwitchInstance) -> BipartiteGraph:
    """Build the packet/MU adjacency graph of a valid instance."""
    require_valid(inst)
    packet_units = {pid: inst.packet_units(pid) for pid in inst.packet_ids()}
    reverse: dict[int, set[int]] = {u: set() for u in range(1, inst.n_units + 1)}
    for pid, units in packet_units.items():
        for u in units:
            reverse[u].add(pid)
    return BipartiteGraph(
        packet_ids=tuple(inst.packet_ids()),
        unit_ids=tuple(range(1, inst.n_units + 1)),
        packet_units=packet_units,
        unit_packets={u: frozenset(p) for u, p in reverse.items()},
    )
