"""Document parsing and canonical serialization."""

import json
from fractions import Fraction

import pytest

from codedswitch.bounds import bound_report
from codedswitch.core import CONSECUTIVE, ReadPlan, throughput
from codedswitch.ensemble import METRICS
from codedswitch.formats import (
    FormatError,
    bound_report_document,
    dump_json,
    instance_document,
    parse_ensemble_config,
    parse_instance,
    parse_lsp,
    parse_plan,
    plan_document,
    reduction_document,
)
from codedswitch.reduction import reduce_set_packing
from codedswitch.solvers import solve_exact
from conftest import make_example1

EX1 = json.dumps(
    {
        "N": 5,
        "k": 2,
        "n": 3,
        "write_policy": "unrestricted",
        "coding": "mds",
        "packets": [[1, 2, 3], [2, 4, 5], [3, 4, 5]],
    }
)


def test_parse_instance_round_trip():
    inst = parse_instance(EX1)
    assert inst == make_example1(2)
    again = parse_instance(json.dumps(instance_document(inst)))
    assert again == inst


def test_parse_instance_accepts_wrapper_and_defaults():
    wrapped = json.dumps({"instance": {"N": 4, "k": 1, "n": 2, "packets": [[1, 2]]}})
    inst = parse_instance(wrapped)
    assert inst.write_policy == "unrestricted"
    assert not inst.is_replication


def test_parse_instance_empty_packets():
    inst = parse_instance(json.dumps({"N": 4, "k": 1, "n": 2, "packets": []}))
    assert inst.load == 0


def test_parse_instance_rejects_malformed():
    with pytest.raises(FormatError, match="invalid JSON"):
        parse_instance("{nope")
    with pytest.raises(FormatError, match="missing key"):
        parse_instance(json.dumps({"N": 4, "k": 1, "n": 2}))
    with pytest.raises(FormatError, match="unknown keys"):
        parse_instance(json.dumps({"N": 4, "k": 1, "n": 2, "packets": [], "z": 0}))
    with pytest.raises(FormatError, match="expected an integer"):
        parse_instance(json.dumps({"N": "4", "k": 1, "n": 2, "packets": []}))
    with pytest.raises(FormatError, match="write_policy"):
        parse_instance(
            json.dumps({"N": 4, "k": 1, "n": 2, "packets": [], "write_policy": "x"})
        )
    with pytest.raises(FormatError, match="coding"):
        parse_instance(json.dumps({"N": 4, "k": 1, "n": 2, "packets": [], "coding": "xor"}))


def test_parse_instance_reports_semantic_violations():
    doc = json.dumps({"N": 3, "k": 4, "n": 3, "packets": []})
    with pytest.raises(FormatError, match="k exceeds n"):
        parse_instance(doc)
    # structural parse succeeds when validation is deferred
    inst = parse_instance(doc, validate=False)
    assert inst.k == 4

    positioned = json.dumps({"N": 5, "k": 2, "n": 3, "packets": [[1, 2, 3], [1, 2]]})
    with pytest.raises(FormatError, match="packet 2"):
        parse_instance(positioned)


def test_parse_instance_replication():
    doc = json.dumps(
        {
            "N": 4,
            "k": 2,
            "n": 4,
            "packets": [[1, 2, 3, 4]],
            "coding": {"replication": {"groups_per_packet": [[[1, 2], [3, 4]]]}},
        }
    )
    inst = parse_instance(doc)
    assert inst.is_replication
    assert inst.replication_groups(1) == (frozenset({1, 2}), frozenset({3, 4}))
    out = instance_document(inst)
    assert out["coding"] == {"replication": {"groups_per_packet": [[[1, 2], [3, 4]]]}}
    assert parse_instance(json.dumps(out)) == inst

    with pytest.raises(FormatError, match="groups_per_packet"):
        parse_instance(
            json.dumps(
                {"N": 4, "k": 2, "n": 4, "packets": [[1, 2, 3, 4]], "coding": {"replication": {}}}
            )
        )


def test_plan_document_and_parse():
    inst = make_example1(2)
    result = solve_exact(inst)
    rho = throughput(inst, result.optimal_count)
    doc = plan_document(inst, result.plan, rho)
    assert doc["served"] == sorted(doc["served"])
    assert doc["throughput"] == "4/5"
    assert list(doc["assignments"]) == [str(pid) for pid in sorted(result.plan.served)]
    parsed = parse_plan(json.dumps(doc))
    assert parsed == result.plan


def test_plan_document_zero_throughput():
    inst = make_example1(2)
    doc = plan_document(inst, ReadPlan({}), Fraction(0))
    assert doc["throughput"] == "0/1"


def test_parse_plan_rejects_mismatched_served():
    doc = {"served": [1, 2], "assignments": {"1": [1, 2]}}
    with pytest.raises(FormatError, match="served"):
        parse_plan(json.dumps(doc))
    with pytest.raises(FormatError, match="bad packet id"):
        parse_plan(json.dumps({"assignments": {"one": [1]}}))


def test_parse_lsp():
    lsp = parse_lsp(json.dumps({"l": 3, "sets": [[1, 2, 3], [3, 4, 5]]}), target=1)
    assert lsp.set_size == 3
    assert lsp.sets == (frozenset({1, 2, 3}), frozenset({3, 4, 5}))
    with pytest.raises(FormatError, match="set 2"):
        parse_lsp(json.dumps({"l": 3, "sets": [[1, 2, 3], [1]]}), target=1)
    with pytest.raises(FormatError):
        parse_lsp(json.dumps({"sets": []}), target=1)


def test_reduction_document():
    lsp = parse_lsp(json.dumps({"l": 3, "sets": [[1, 2, 3], [4, 5, 6]]}), target=2)
    red = reduce_set_packing(lsp)
    doc = reduction_document(red)
    assert doc["target"] == 4
    assert doc["mapping"]["mirror_offset"] == 6
    assert doc["mapping"]["theta_unit"] == 13
    assert doc["mapping"]["elements"]["1"] == 1
    inner = parse_instance(json.dumps(doc["instance"]))
    assert inner == red.instance


def test_bound_report_document():
    report = bound_report(make_example1(2), samples=10, seed=1)
    doc = bound_report_document(report)
    assert doc["lower_expected"] == pytest.approx(1.75)
    assert doc["trivial_upper"] == 2
    assert doc["monte_carlo"]["samples"] == 10
    no_mc = bound_report_document(bound_report(make_example1(2)))
    assert "monte_carlo" not in no_mc


def test_parse_ensemble_config():
    doc = {
        "N": 8,
        "k": 2,
        "n": 4,
        "loads": [1, 2],
        "instances_per_point": 5,
        "write_policy": "consecutive",
        "coding": "mds",
        "master_seed": 9,
        "solver": "greedy",
        "metrics": ["mean_Lstar"],
        "node_budget": 100,
    }
    config = parse_ensemble_config(json.dumps(doc))
    assert config.n_units == 8
    assert config.loads == (1, 2)
    assert config.write_policy == CONSECUTIVE
    assert config.metrics == ("mean_Lstar",)
    assert config.node_budget == 100

    minimal = parse_ensemble_config(
        json.dumps({"N": 8, "k": 2, "n": 4, "loads": [1], "instances_per_point": 2})
    )
    assert minimal.metrics == METRICS
    assert minimal.node_budget is None

    with pytest.raises(FormatError, match="unknown keys"):
        parse_ensemble_config(json.dumps({**doc, "shape": 1}))
    with pytest.raises(FormatError, match="loads"):
        parse_ensemble_config(
            json.dumps({"N": 8, "k": 2, "n": 4, "loads": [], "instances_per_point": 2})
        )
    with pytest.raises(FormatError, match="unknown metric"):
        parse_ensemble_config(json.dumps({**doc, "metrics": ["p99"]}))


def test_dump_json_is_stable():
    assert dump_json({"b": 1, "a": 2}) == '{\n  "b": 1,\n  "a": 2\n}\n'
