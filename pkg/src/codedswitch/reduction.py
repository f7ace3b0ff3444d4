"""Set-packing reductions that certify hardness of the read problem.

``reduce_set_packing`` turns an l-set-packing instance (find M pairwise
disjoint sets among L sets of size l) into a read instance with k = l and
n = l + 1: every input set is mirrored onto fresh elements and one shared
element theta is appended to all 2L sets, doubling the packing target.
``extend_n`` applies the same mirror-and-theta step to any read instance,
raising n by one while preserving the decision answer.  ``lift_solution``
maps a read plan of the reduced instance back to disjoint original sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .core import MDS, ReadPlan, SwitchInstance, UNRESTRICTED, require_valid, validate_read_plan

Element = Hashable


def _element_sort_key(element: Element) -> tuple[str, str]:
    return (element.__class__.__name__, str(element))


@dataclass(frozen=True)
class LspInstance:
    """l-set-packing input: L sets of size ``set_size``, packing target M."""

    set_size: int
    sets: tuple[frozenset[Element], ...]
    target: int

    def __init__(self, set_size: int, sets: Iterable[Iterable[Element]], target: int):
        object.__setattr__(self, "set_size", int(set_size))
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in sets))
        object.__setattr__(self, "target", int(target))
        for i, s in enumerate(self.sets, start=1):
            if len(s) != self.set_size:
                raise ValueError(f"set {i} has {len(s)} elements, expected {self.set_size}")

    @property
    def domain(self) -> tuple[Element, ...]:
        union: set[Element] = set()
        for s in self.sets:
            union |= s
        return tuple(sorted(union, key=_element_sort_key))


@dataclass(frozen=True)
class ReducedInstance:
    """Read instance produced from an :class:`LspInstance`, plus its renaming.

    Packets 1..L are the original sets (plus theta), packets L+1..2L their
    mirrors.  Element j of ``element_order`` maps to MU j; its mirror is MU
    j + mirror_offset; theta is the last MU.
    """

    instance: SwitchInstance
    element_order: tuple[Element, ...]
    target: int
    source: LspInstance

    @property
    def mirror_offset(self) -> int:
        return len(self.element_order)

    @property
    def theta_unit(self) -> int:
        return 2 * len(self.element_order) + 1

    def element_unit(self, element: Element) -> int:
        return self.element_order.index(element) + 1


def reduce_set_packing(lsp: LspInstance) -> ReducedInstance:
    """Build the read instance whose optimum is at least 2M iff the packing
    instance has M disjoint sets.

    Requires set size >= 3, the regime where set packing is hard.  The
    renaming is deterministic: domain elements sorted to MUs 1..s, mirrors
    to s+1..2s, theta to 2s+1, so the construction is reproducible.
    """
    if lsp.set_size < 3:
        raise ValueError("reduction requires sets of size at least 3")
    elements = lsp.domain
    index = {e: j + 1 for j, e in enumerate(elements)}
    s = len(elements)
    theta = 2 * s + 1
    a_side = [frozenset(index[e] for e in a) | {theta} for a in lsp.sets]
    b_side = [frozenset(index[e] + s for e in a) | {theta} for a in lsp.sets]
    inst = SwitchInstance(
        n_units=theta,
        k=lsp.set_size,
        n=lsp.set_size + 1,
        packets=a_side + b_side,
        write_policy=UNRESTRICTED,
        coding=MDS,
    )
    return ReducedInstance(
        instance=inst,
        element_order=elements,
        target=2 * lsp.target,
        source=lsp,
    )


def extend_n(inst: SwitchInstance, target: int) -> tuple[SwitchInstance, int]:
    """Mirror-and-theta step on a read instance: same k, n+1, 2L packets, 2M.

    MU u keeps its index, its mirror becomes u + N, theta becomes 2N + 1.
    The decision answer is preserved: the new instance serves 2*target
    packets iff the old one serves ``target``.
    """
    require_valid(inst)
    if inst.k < 3:
        raise ValueError("extension step is defined for k >= 3")
    if inst.coding != MDS:
        raise ValueError("extension step requires MDS coding")
    offset = inst.n_units
    theta = 2 * offset + 1
    a_side = [units | {theta} for units in inst.packets]
    b_side = [frozenset(u + offset for u in units) | {theta} for units in inst.packets]
    extended = SwitchInstance(
        n_units=theta,
        k=inst.k,
        n=inst.n + 1,
        packets=a_side + b_side,
        write_policy=UNRESTRICTED,
        coding=MDS,
    )
    return extended, 2 * target


def lift_solution(
    reduced: ReducedInstance, plan: ReadPlan
) -> tuple[frozenset[Element], ...] | None:
    """Recover >= M pairwise-disjoint original sets from a plan serving >= 2M.

    Theta sits in at most one served assignment, so one of the two mirror
    sides serves >= M packets without it; such an assignment is exactly the
    original (or mirrored) set, which maps back by the renaming.  Ties
    prefer the original side.  Returns None when the plan serves fewer
    than 2M packets (no conclusion either way).
    """
    if not validate_read_plan(reduced.instance, plan):
        raise ValueError("plan is not valid for the reduced instance")
    if plan.served_count() < reduced.target:
        return None
    load = len(reduced.source.sets)
    theta = reduced.theta_unit
    a_clean = sorted(
        pid for pid, units in plan.assignments.items() if pid <= load and theta not in units
    )
    b_clean = sorted(
        pid - load
        for pid, units in plan.assignments.items()
        if pid > load and theta not in units
    )
    m = reduced.source.target
    if len(a_clean) >= m:
        return tuple(reduced.source.sets[i - 1] for i in a_clean)
    if len(b_clean) >= m:
        return tuple(reduced.source.sets[i - 1] for i in b_clean)
    raise AssertionError("a plan serving 2M packets always leaves one clean side")
