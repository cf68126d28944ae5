import json

import pytest
from hypothesis import HealthCheck, settings

from sgsacc import (
    CachedNliBackend,
    DialogueAction,
    EvalInstance,
    MockNliBackend,
    ServiceSchema,
    SlotSchema,
)

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


SALON = ServiceSchema(
    service_name="Salon_1",
    slots=(
        SlotSchema("stylist_name", "the name of the hair stylist", False, False),
        SlotSchema(
            "is_unisex",
            "whether the salon caters to everyone",
            True,
            True,
            ("True", "False"),
        ),
        SlotSchema(
            "price_range",
            "price bracket of the salon",
            True,
            False,
            ("cheap", "moderate", "expensive"),
        ),
        SlotSchema("appointment_time", "time of the booked appointment", False, False),
    ),
)

RESTAURANT = ServiceSchema(
    service_name="Restaurants_3",
    slots=(
        SlotSchema(
            "kids_friendly",
            "whether the place is kids friendly",
            True,
            True,
            ("True", "False"),
        ),
        SlotSchema("restaurant_name", "name of the restaurant", False, False),
        SlotSchema("cuisine", "the cuisines offered", False, False),
    ),
)


@pytest.fixture
def catalog():
    return {SALON.service_name: SALON, RESTAURANT.service_name: RESTAURANT}


@pytest.fixture
def mock_nli():
    return CachedNliBackend(MockNliBackend())


def make_instance(
    instance_id="inst-001",
    service="Salon_1",
    domain="Salon",
    actions=(DialogueAction("INFORM", "stylist_name", ("Queens",)),),
    ground_truth="The name of the hair stylist is Queens.",
    previous_turn=None,
    is_unseen_domain=False,
):
    return EvalInstance(
        instance_id=instance_id,
        service=service,
        domain=domain,
        actions=tuple(actions),
        ground_truth=ground_truth,
        previous_turn=previous_turn,
        is_unseen_domain=is_unseen_domain,
    )


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
