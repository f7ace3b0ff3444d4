"""Strict JSON readers and canonical writers for instances, plans, and
reports.

All document writers sort collections (packet lists ascending, assignment
keys numeric) so equal objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .bounds import BoundReport
from .core import (
    MDS,
    ReadPlan,
    Replication,
    SwitchInstance,
    WRITE_POLICIES,
    UNRESTRICTED,
    validate_instance,
)
from .ensemble import EnsembleConfig, EnsembleStats
from .reduction import LspInstance, ReducedInstance


class FormatError(ValueError):
    """Malformed document: bad JSON, wrong shape, or failed validation."""


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_unit_list(value: Any, where: str) -> list[int]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list of MU indices")
    return [_as_int(v, where) for v in value]


def _parse_coding(value: Any) -> str | Replication:
    if value == "mds":
        return MDS
    if isinstance(value, dict) and set(value) == {"replication"}:
        body = value["replication"]
        if not isinstance(body, dict) or set(body) != {"groups_per_packet"}:
            raise FormatError('coding.replication: expected {"groups_per_packet": [...]}')
        raw = body["groups_per_packet"]
        if not isinstance(raw, list):
            raise FormatError("coding.replication.groups_per_packet: expected a list")
        groups = []
        for i, per_packet in enumerate(raw, start=1):
            if not isinstance(per_packet, list):
                raise FormatError(f"packet {i}: replica groups must be a list of lists")
            groups.append(
                tuple(
                    frozenset(_as_unit_list(g, f"packet {i} replica group"))
                    for g in per_packet
                )
            )
        return Replication(tuple(groups))
    raise FormatError(f"coding: expected \"mds\" or a replication object, got {value!r}")


def parse_instance(text: str | bytes, validate: bool = True) -> SwitchInstance:
    """Parse an instance document, optionally enforcing all invariants.

    Accepts either the bare object or one wrapped as ``{"instance": ...}``.
    With ``validate=False`` only the document shape is checked, so the
    caller can report semantic violations itself.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if isinstance(doc, dict) and set(doc) == {"instance"}:
        doc = doc["instance"]
    if not isinstance(doc, dict):
        raise FormatError("instance: expected a JSON object")
    allowed = {"N", "k", "n", "write_policy", "coding", "packets"}
    unknown = set(doc) - allowed
    if unknown:
        raise FormatError(f"instance: unknown keys {sorted(unknown)}")
    for key in ("N", "k", "n", "packets"):
        if key not in doc:
            raise FormatError(f"instance: missing key {key!r}")
    if not isinstance(doc["packets"], list):
        raise FormatError("packets: expected a list")
    policy = doc.get("write_policy", UNRESTRICTED)
    if not isinstance(policy, str) or policy not in WRITE_POLICIES:
        raise FormatError(f"write_policy: expected one of {sorted(WRITE_POLICIES)}")
    packets = [
        frozenset(_as_unit_list(p, f"packet {i}"))
        for i, p in enumerate(doc["packets"], start=1)
    ]
    try:
        inst = SwitchInstance(
            n_units=_as_int(doc["N"], "N"),
            k=_as_int(doc["k"], "k"),
            n=_as_int(doc["n"], "n"),
            packets=packets,
            write_policy=policy,
            coding=_parse_coding(doc.get("coding", "mds")),
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if validate:
        report = validate_instance(inst)
        if not report.ok:
            raise FormatError("; ".join(report.violations))
    return inst


def instance_document(inst: SwitchInstance) -> dict:
    doc: dict[str, Any] = {
        "N": inst.n_units,
        "k": inst.k,
        "n": inst.n,
        "write_policy": inst.write_policy,
    }
    if inst.is_replication:
        doc["coding"] = {
            "replication": {
                "groups_per_packet": [
                    [sorted(g) for g in inst.replication_groups(pid)]
                    for pid in inst.packet_ids()
                ]
            }
        }
    else:
        doc["coding"] = "mds"
    doc["packets"] = [sorted(inst.packet_units(pid)) for pid in inst.packet_ids()]
    return doc


def plan_document(inst: SwitchInstance, plan: ReadPlan, throughput: Fraction) -> dict:
    return {
        "served": sorted(plan.served),
        "assignments": {
            str(pid): sorted(plan.assignments[pid]) for pid in sorted(plan.assignments)
        },
        "throughput": f"{throughput.numerator}/{throughput.denominator}",
    }


def parse_plan(text: str | bytes) -> ReadPlan:
    """Parse a plan document back into a :class:`ReadPlan`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "assignments" not in doc:
        raise FormatError('plan: expected an object with an "assignments" key')
    raw = doc["assignments"]
    if not isinstance(raw, dict):
        raise FormatError("plan.assignments: expected an object")
    assignments = {}
    for key, units in raw.items():
        try:
            pid = int(key)
        except ValueError:
            raise FormatError(f"plan.assignments: bad packet id {key!r}") from None
        assignments[pid] = frozenset(_as_unit_list(units, f"assignment {key}"))
    if "served" in doc:
        served = doc["served"]
        if not isinstance(served, list) or set(
            _as_int(v, "served") for v in served
        ) != set(assignments):
            raise FormatError("plan: served list disagrees with assignment keys")
    return ReadPlan(assignments)


def parse_lsp(text: str | bytes, target: int) -> LspInstance:
    """Parse an ``{"l": ..., "sets": [[...]]}`` document into an instance."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != {"l", "sets"}:
        raise FormatError('set-packing input: expected keys "l" and "sets"')
    size = _as_int(doc["l"], "l")
    if not isinstance(doc["sets"], list):
        raise FormatError("sets: expected a list of lists")
    sets = []
    for i, raw in enumerate(doc["sets"], start=1):
        if not isinstance(raw, list):
            raise FormatError(f"set {i}: expected a list")
        sets.append(frozenset(raw))
    try:
        return LspInstance(set_size=size, sets=sets, target=target)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def reduction_document(reduced: ReducedInstance) -> dict:
    return {
        "instance": instance_document(reduced.instance),
        "target": reduced.target,
        "mapping": {
            "elements": {
                str(e): j + 1 for j, e in enumerate(reduced.element_order)
            },
            "mirror_offset": reduced.mirror_offset,
            "theta_unit": reduced.theta_unit,
        },
    }


def bound_report_document(report: BoundReport) -> dict:
    doc: dict[str, Any] = {
        "lower_expected": report.lower_expected,
        "trivial_upper": report.trivial_upper,
    }
    if report.monte_carlo is not None:
        doc["monte_carlo"] = {
            "samples": report.monte_carlo.samples,
            "mean": report.monte_carlo.mean,
            "std_error": report.monte_carlo.std_error,
        }
    return doc


def parse_ensemble_config(text: str | bytes) -> EnsembleConfig:
    """Parse the JSON ensemble description consumed by the CLI."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("ensemble config: expected a JSON object")
    allowed = {
        "N",
        "k",
        "n",
        "loads",
        "instances_per_point",
        "write_policy",
        "coding",
        "master_seed",
        "solver",
        "metrics",
        "node_budget",
    }
    unknown = set(doc) - allowed
    if unknown:
        raise FormatError(f"ensemble config: unknown keys {sorted(unknown)}")
    for key in ("N", "k", "n", "loads", "instances_per_point"):
        if key not in doc:
            raise FormatError(f"ensemble config: missing key {key!r}")
    if not isinstance(doc["loads"], list) or not doc["loads"]:
        raise FormatError("ensemble config: loads must be a non-empty list")
    kwargs: dict[str, Any] = {
        "n_units": _as_int(doc["N"], "N"),
        "k": _as_int(doc["k"], "k"),
        "n": _as_int(doc["n"], "n"),
        "loads": tuple(_as_int(v, "loads") for v in doc["loads"]),
        "instances_per_point": _as_int(doc["instances_per_point"], "instances_per_point"),
    }
    if "write_policy" in doc:
        kwargs["write_policy"] = doc["write_policy"]
    if "coding" in doc:
        if doc["coding"] not in ("mds", "replication"):
            raise FormatError('ensemble config: coding must be "mds" or "replication"')
        kwargs["coding"] = doc["coding"]
    if "master_seed" in doc:
        kwargs["master_seed"] = _as_int(doc["master_seed"], "master_seed")
    if "solver" in doc:
        kwargs["solver"] = doc["solver"]
    if "metrics" in doc:
        if not isinstance(doc["metrics"], list):
            raise FormatError("ensemble config: metrics must be a list")
        kwargs["metrics"] = tuple(doc["metrics"])
    if "node_budget" in doc and doc["node_budget"] is not None:
        kwargs["node_budget"] = _as_int(doc["node_budget"], "node_budget")
    try:
        return EnsembleConfig(**kwargs)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def stats_document(stats: EnsembleStats) -> dict:
    rows = []
    for row in stats.rows:
        rows.append(
            {
                "scheme": row.scheme,
                "N": row.n_units,
                "k": row.k,
                "n": row.n,
                "L": row.load,
                "samples": row.samples,
                "mean_Lstar": row.mean_lstar,
                "std_Lstar": row.std_lstar,
                "mean_throughput": row.mean_throughput,
                "full_fraction": row.full_fraction,
                "lower_bound_mean": row.lower_bound_mean,
                "hall_upper_bound": row.hall_upper_bound,
                "budget_flagged": row.budget_flagged,
            }
        )
    paired = []
    for diff in stats.paired:
        paired.append(
            {
                "L": diff.load,
                "scheme_a": diff.scheme_a,
                "scheme_b": diff.scheme_b,
                "mean_diff": diff.mean_diff,
                "std_error": diff.std_error,
                "samples": diff.samples,
            }
        )
    return {"rows": rows, "paired": paired}
