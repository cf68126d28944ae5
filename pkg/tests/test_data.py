import json

import pytest

from sgsacc import (
    DialogueAction,
    SlotSchema,
    build_value_pools,
    parse_generations,
    parse_instances,
    parse_schemas,
)
from sgsacc.data import (
    group_by_instance,
    index_generations,
    instance_to_record,
)
from sgsacc.errors import (
    DataError,
    SchemaConflictError,
    SchemaError,
    SlotResolutionError,
)

from conftest import write_jsonl


SCHEMA_RECORDS = [
    {
        "service_name": "Restaurants_1",
        "description": "restaurant finder",
        "slots": [
            {
                "name": "kids_friendly",
                "description": "whether the place is kids friendly",
                "is_categorical": True,
                "possible_values": ["True", "False"],
            },
            {
                "name": "restaurant_name",
                "description": "name of the restaurant",
                "is_categorical": False,
                "possible_values": [],
            },
        ],
    },
    {
        "service_name": "Salon_1",
        "slots": [
            {
                "name": "stylist_name",
                "description": "the name of the hair stylist",
                "is_categorical": False,
                "possible_values": [],
            }
        ],
    },
]


def test_parse_schemas_derives_boolean_flag(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(SCHEMA_RECORDS))
    catalog = parse_schemas(path)
    assert set(catalog) == {"Restaurants_1", "Salon_1"}
    kids = catalog["Restaurants_1"].find_slot("kids_friendly")
    assert kids.is_boolean and kids.is_categorical
    name = catalog["Restaurants_1"].find_slot("restaurant_name")
    assert not name.is_boolean and not name.is_categorical


def test_parse_schemas_empty_catalog(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text("[]")
    assert parse_schemas(path) == {}


def test_parse_schemas_duplicate_service(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps([SCHEMA_RECORDS[0], SCHEMA_RECORDS[0]]))
    with pytest.raises(SchemaConflictError):
        parse_schemas(path)


def test_parse_schemas_malformed_entry_names_offender(tmp_path):
    records = [{"service_name": "Broken_1", "slots": [{"description": "no name"}]}]
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(records))
    with pytest.raises(SchemaError, match="Broken_1"):
        parse_schemas(path)


def test_boolean_slot_requires_true_false_values():
    with pytest.raises(SchemaError):
        SlotSchema("flag", "a flag", True, True, ("True", "Maybe"))
    with pytest.raises(SchemaError):
        SlotSchema("flag", "a flag", False, True, ("True", "False"))


def _catalog(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(SCHEMA_RECORDS))
    return parse_schemas(path)


INSTANCE_RECORDS = [
    {
        "instance_id": "t-1",
        "service": "Salon_1",
        "domain": "Salon",
        "actions": [{"intent": "INFORM", "slot": "stylist_name", "values": ["Queens"]}],
        "ground_truth": "What about Queens?",
        "previous_turn": "I want to book a hair cut.",
    },
    {
        "instance_id": "t-2",
        "service": "Restaurants_1",
        "domain": "Restaurants",
        "actions": [
            {"intent": "INFORM", "slot": "kids_friendly", "values": ["True"]},
            {"intent": "GOODBYE", "slot": None, "values": []},
        ],
        "ground_truth": "Yes it is kids friendly. Have a good day.",
        "previous_turn": None,
    },
]


def test_parse_instances_populates_context_and_split(tmp_path):
    catalog = _catalog(tmp_path)
    path = tmp_path / "instances.jsonl"
    write_jsonl(path, INSTANCE_RECORDS)
    instances = parse_instances(path, catalog, unseen_domains=["Restaurants"])
    assert [i.instance_id for i in instances] == ["t-1", "t-2"]
    assert instances[0].previous_turn == "I want to book a hair cut."
    assert not instances[0].is_unseen_domain
    assert instances[1].is_unseen_domain
    assert instances[1].previous_turn is None
    assert instances[1].actions[1].intent == "GOODBYE"


def test_parse_instances_unknown_slot(tmp_path):
    catalog = _catalog(tmp_path)
    record = dict(INSTANCE_RECORDS[0])
    record["actions"] = [{"intent": "INFORM", "slot": "no_such_slot", "values": ["x"]}]
    path = tmp_path / "instances.jsonl"
    write_jsonl(path, [record])
    with pytest.raises(SlotResolutionError) as excinfo:
        parse_instances(path, catalog)
    assert excinfo.value.instance_id == "t-1"
    assert excinfo.value.slot == "no_such_slot"


def test_parse_instances_missing_ground_truth(tmp_path):
    catalog = _catalog(tmp_path)
    record = dict(INSTANCE_RECORDS[0])
    del record["ground_truth"]
    path = tmp_path / "instances.jsonl"
    write_jsonl(path, [record])
    with pytest.raises(DataError, match="ground truth"):
        parse_instances(path, catalog)


def test_instance_round_trip(tmp_path):
    catalog = _catalog(tmp_path)
    path = tmp_path / "instances.jsonl"
    write_jsonl(path, INSTANCE_RECORDS)
    instances = parse_instances(path, catalog, unseen_domains=["Restaurants"])
    rewritten = tmp_path / "round_trip.jsonl"
    write_jsonl(rewritten, [instance_to_record(i) for i in instances])
    again = parse_instances(rewritten, catalog, unseen_domains=["Restaurants"])
    assert again == instances


def test_split_partitions_dataset(tmp_path):
    catalog = _catalog(tmp_path)
    path = tmp_path / "instances.jsonl"
    write_jsonl(path, INSTANCE_RECORDS)
    instances = parse_instances(path, catalog, unseen_domains=["Restaurants"])
    seen = [i for i in instances if not i.is_unseen_domain]
    unseen = [i for i in instances if i.is_unseen_domain]
    assert len(seen) + len(unseen) == len(instances)


GENERATION_RECORDS = [
    {"instance_id": "t-1", "system_id": "ft", "text": "Queens.", "log_likelihood": -1.5},
    {"instance_id": "t-1", "system_id": "pt", "text": "How about Queens?"},
    {"instance_id": "t-2", "system_id": "ft", "text": "Kids friendly, yes."},
]


def test_parse_generations_preserves_likelihood(tmp_path):
    path = tmp_path / "gens.jsonl"
    write_jsonl(path, GENERATION_RECORDS)
    candidates = parse_generations(path)
    assert candidates[0].log_likelihood == -1.5
    assert candidates[1].log_likelihood is None


def test_parse_generations_empty_file(tmp_path):
    path = tmp_path / "gens.jsonl"
    path.write_text("")
    assert parse_generations(path) == []


def test_parse_generations_skips_dangling_reference(tmp_path, caplog):
    path = tmp_path / "gens.jsonl"
    write_jsonl(path, GENERATION_RECORDS + [
        {"instance_id": "ghost", "system_id": "ft", "text": "Boo."}
    ])
    with caplog.at_level("WARNING"):
        candidates = parse_generations(path, known_instance_ids={"t-1", "t-2"})
    assert len(candidates) == 3
    assert any("ghost" in message for message in caplog.messages)


def test_parse_generations_accepts_json_array(tmp_path):
    path = tmp_path / "gens.json"
    path.write_text(json.dumps(GENERATION_RECORDS))
    assert len(parse_generations(path)) == 3


def test_index_generations_rejects_duplicates(tmp_path):
    path = tmp_path / "gens.jsonl"
    write_jsonl(path, GENERATION_RECORDS + [GENERATION_RECORDS[0]])
    with pytest.raises(DataError, match="multiple candidates"):
        index_generations(parse_generations(path))


def test_group_by_instance_keeps_order(tmp_path):
    path = tmp_path / "gens.jsonl"
    write_jsonl(path, GENERATION_RECORDS)
    grouped = group_by_instance(parse_generations(path))
    assert [c.system_id for c in grouped["t-1"]] == ["ft", "pt"]


def test_build_value_pools_collects_non_categorical_values(tmp_path):
    catalog = _catalog(tmp_path)
    path = tmp_path / "instances.jsonl"
    extra = {
        "instance_id": "t-3",
        "service": "Salon_1",
        "domain": "Salon",
        "actions": [{"intent": "INFORM", "slot": "stylist_name", "values": ["Floyd"]}],
        "ground_truth": "Floyd it is.",
    }
    write_jsonl(path, INSTANCE_RECORDS + [extra])
    instances = parse_instances(path, catalog)
    pools = build_value_pools(instances, catalog)
    assert pools[("Salon_1", "stylist_name")] == ("Floyd", "Queens")
    # categorical slots contribute no pool
    assert ("Restaurants_1", "kids_friendly") not in pools


def test_action_requires_intent():
    with pytest.raises(DataError):
        DialogueAction(intent="")
