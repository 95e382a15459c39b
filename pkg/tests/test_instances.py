import json
import math
from fractions import Fraction as F

import pytest

from degnet.instances import (InstanceError, decomposition_from_dict, decomposition_to_dict, fraction_text,
                              instance_from_dict, instance_to_dict, labeling_from_dict, labeling_to_dict,
                              load_instance, to_fraction, write_json)
from degnet.verify import data_files

TRIANGLE = {
    "vertices": [0, 1, 2],
    "edges": [{"id": 0, "u": 0, "v": 1, "cost": 1}, {"id": 1, "u": 1, "v": 2, "cost": "3/2"},
              {"id": 2, "u": 0, "v": 2, "cost": 0.25}],
    "requirements": [{"u": 0, "v": 2, "r": 1}],
    "p": 2, "A": 3,
}


def test_fraction_helpers():
    assert to_fraction("3/2") == F(3, 2) and to_fraction(0.1) == F(1, 10)
    assert fraction_text(F(6, 4)) == "3/2" and fraction_text(4) == "4" and fraction_text(math.inf) == "inf"


def test_instance_round_trip():
    inst = instance_from_dict(TRIANGLE)
    assert inst.graph.costs == {0: 1, 1: F(3, 2), 2: F(1, 4)}
    assert inst.power_budget() == 9
    again = instance_from_dict(instance_to_dict(inst))
    assert instance_to_dict(again) == instance_to_dict(inst)


def test_budget_given_directly():
    data = dict(TRIANGLE, Ap="12")
    data.pop("A")
    assert instance_from_dict(data).power_budget() == 12


@pytest.mark.parametrize("patch, field", [
    ({"edges": [{"id": 0, "u": 0}]}, "edges/0"),
    ({"p": 0}, "p"),
    ({"mode": "tree"}, "mode"),
    ({"requirements": [{"u": 0, "v": 1, "r": -1}]}, "requirements/0/r"),
])
def test_schema_errors_name_the_field(patch, field):
    with pytest.raises(InstanceError, match=f"field {field}"):
        instance_from_dict(dict(TRIANGLE, **patch))


def test_semantic_errors():
    with pytest.raises(InstanceError, match="degree_bounds/7"):
        instance_from_dict(dict(TRIANGLE, degree_bounds={"7": 1}))
    with pytest.raises(InstanceError, match="root"):
        instance_from_dict(dict(TRIANGLE, root=9))
    with pytest.raises(InstanceError):
        instance_from_dict(dict(TRIANGLE, edges=[{"id": 0, "u": 0, "v": 5}]))
    with pytest.raises(InstanceError, match="needs A"):
        instance_from_dict({"vertices": [0], "edges": []}).power_budget()


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InstanceError, match="no such file"):
        load_instance(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InstanceError, match="invalid JSON"):
        load_instance(bad)


def test_decomposition_round_trip():
    data = {"bags": [{"id": 0, "vertices": [0, 1]}, {"id": 1, "vertices": [1, 2], "parent": 0}], "root_bag": 0}
    td = decomposition_from_dict(data)
    assert decomposition_from_dict(decomposition_to_dict(td)).bags == td.bags
    with pytest.raises(InstanceError, match="root_bag"):
        decomposition_from_dict(dict(data, root_bag=5))
    with pytest.raises(InstanceError):
        decomposition_from_dict({"bags": [{"id": 0, "vertices": [0], "parent": 3}], "root_bag": 0})


def test_labeling_round_trip():
    data = {"root": "r", "children": {"r": ["a"]}, "labels": {"r": ["1"], "a": ["2", "3"]},
            "gamma": {"r": [["1", "2"], ["1", "3"]]}, "groups": [["3"]], "costs": [{"2": "1/2", "3": "1"}]}
    inst = labeling_from_dict(data)
    assert labeling_from_dict(labeling_to_dict(inst)).gamma == inst.gamma
    with pytest.raises(InstanceError):
        labeling_from_dict(dict(data, costs=[{"2": "2"}]))


def test_write_json_is_sorted(tmp_path):
    path = tmp_path / "x.json"
    write_json(path, {"b": 1, "a": 2})
    assert path.read_text() == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_bundled_instances_load():
    names = [p.name for p in data_files("")]
    assert len([n for n in names if n.startswith("snd_")]) == 5
    for p in data_files("snd_") + data_files("gst_"):
        json.loads(p.read_text())
        load_instance(p)
