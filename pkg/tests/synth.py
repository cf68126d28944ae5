"""Deterministic synthetic dataset: 50 instances, two systems.

Ten instance patterns cycle over five rounds with varying values. The
patterns cover single- and multi-value slots, boolean true/false, categorical
substitution, REQUEST/GOODBYE/REQ_MORE, augmentation-dependent entailment,
engineered validation failures (no entailed candidate; an entailed negative)
and planted slot errors. Non-categorical value pools stay at <= 4 distinct
values dataset-wide so that negative sampling with the default budget always
takes every eligible value, making negatives fully predictable.
"""

import json

SCHEMAS = [
    {
        "service_name": "Salon_1",
        "slots": [
            {
                "name": "stylist_name",
                "description": "the name of the hair stylist",
                "is_categorical": False,
                "possible_values": [],
            },
            {
                "name": "appointment_time",
                "description": "time of the booked appointment",
                "is_categorical": False,
                "possible_values": [],
            },
        ],
    },
    {
        "service_name": "Flights_2",
        "slots": [
            {
                "name": "is_nonstop",
                "description": "whether the flight is a direct one",
                "is_categorical": True,
                "possible_values": ["True", "False"],
            },
            {
                "name": "airline",
                "description": "company operating the flight",
                "is_categorical": True,
                "possible_values": ["Delta", "United", "Alaska"],
            },
            {
                "name": "departure_time",
                "description": "takeoff time of the outbound flight",
                "is_categorical": False,
                "possible_values": [],
            },
            {
                "name": "fare",
                "description": "ticket cost of the trip",
                "is_categorical": False,
                "possible_values": [],
            },
        ],
    },
    {
        "service_name": "Restaurants_3",
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
            {
                "name": "cuisine",
                "description": "the cuisines offered",
                "is_categorical": False,
                "possible_values": [],
            },
        ],
    },
    {
        "service_name": "Movies_4",
        "slots": [
            {
                "name": "movie_name",
                "description": "title of the movie",
                "is_categorical": False,
                "possible_values": [],
            },
            {
                "name": "genre",
                "description": "kind of the movie",
                "is_categorical": True,
                "possible_values": ["Comedy", "Horror", "Drama"],
            },
        ],
    },
]

UNSEEN_DOMAINS = ["Movies"]

STYLISTS = ["Queens", "Floyd's Barbershop", "Super Cuts", "Magic Shears"]
TIMES = ["4:10 pm", "6:40 am", "9:15 am", "11:05 pm"]
FARES = ["$449", "$120", "$87", "$305"]
RESTAURANTS = ["Lucia", "Golden Wok", "Casa Verde", "Blue Finch"]
CUISINES = ["Italian", "Mexican", "Thai", "French"]
MOVIES = ["Amelie", "Coraline", "Dune", "Frozen"]
GENRES = ["Comedy", "Horror", "Drama"]
AIRLINES = ["Delta", "United", "Alaska"]


def _action(intent, slot=None, values=()):
    return {"intent": intent, "slot": slot, "values": list(values)}


def _pattern_0(r):
    stylist = STYLISTS[r % 4]
    instance = {
        "service": "Salon_1",
        "domain": "Salon",
        "actions": [_action("INFORM", "stylist_name", [stylist])],
        "ground_truth": f"The name of the hair stylist is {stylist}.",
        "previous_turn": None,
    }
    ft = f"The name of the hair stylist is {stylist}."
    pt = f"Your stylist is {stylist}."
    return instance, ft, pt


def _pattern_1(r):
    stylist = STYLISTS[(r + 1) % 4]
    instance = {
        "service": "Salon_1",
        "domain": "Salon",
        "actions": [_action("INFORM", "stylist_name", [stylist])],
        "ground_truth": f"What about {stylist}?",
        "previous_turn": "I want to book a hair cut.",
    }
    ft = f"The name of the hair stylist is {stylist}."
    pt = f"How about {stylist}?"
    return instance, ft, pt


def _pattern_2(r):
    time, fare = TIMES[r % 4], FARES[r % 4]
    instance = {
        "service": "Flights_2",
        "domain": "Flights",
        "actions": [
            _action("INFORM", "departure_time", [time]),
            _action("INFORM", "fare", [fare]),
        ],
        "ground_truth": f"Your flight takes off at {time} and the ticket cost of the trip is {fare}.",
        "previous_turn": None,
    }
    ft = f"Your flight takes off at {time} and the ticket cost of the trip is {fare}."
    if r == 4:
        ft = f"The ticket cost of the trip is {fare}, departure to be confirmed."
    pt = f"Your flight takes off at {time}."
    return instance, ft, pt


def _pattern_3(r):
    name = RESTAURANTS[r % 4]
    cuisine_a, cuisine_b = CUISINES[r % 4], CUISINES[(r + 1) % 4]
    instance = {
        "service": "Restaurants_3",
        "domain": "Restaurants",
        "actions": [
            _action("INFORM", "kids_friendly", ["True"]),
            _action("INFORM", "restaurant_name", [name]),
            _action("INFORM", "cuisine", [cuisine_a, cuisine_b]),
        ],
        "ground_truth": (
            f"Yes, {name} is kids friendly and its cuisines are {cuisine_a} and {cuisine_b}."
        ),
        "previous_turn": "Is there a place for the whole family?",
    }
    ft = f"{name} is kids friendly and offers {cuisine_a} and {cuisine_b} cuisines."
    pt = f"{name} is kids friendly and offers {cuisine_a} dishes."
    return instance, ft, pt


def _pattern_4(r):
    instance = {
        "service": "Flights_2",
        "domain": "Flights",
        "actions": [_action("INFORM", "is_nonstop", ["False"])],
        "ground_truth": "The flight has a layover in Denver.",
        "previous_turn": None,
    }
    ft = "It is not a nonstop flight."
    pt = "The flight makes one stop on the way."
    return instance, ft, pt


def _pattern_5(r):
    movie = MOVIES[r % 4]
    genre = GENRES[r % 3]
    wrong = GENRES[(r + 1) % 3]
    instance = {
        "service": "Movies_4",
        "domain": "Movies",
        "actions": [
            _action("INFORM", "movie_name", [movie]),
            _action("INFORM", "genre", [genre]),
        ],
        "ground_truth": f"I found {movie}. It is a {genre} film.",
        "previous_turn": "Can you find me something to watch?",
    }
    ft = f"I found {movie}. It is a {genre} film."
    if r == 2:
        ft = f"I found {movie}. It is a {wrong} film."
    pt = f"I found {movie}. It is a {wrong} film."
    return instance, ft, pt


def _pattern_6(r):
    instance = {
        "service": "Flights_2",
        "domain": "Flights",
        "actions": [_action("REQUEST", "departure_time")],
        "ground_truth": "What departure time do you request?",
        "previous_turn": None,
    }
    ft = "What departure time do you request?"
    pt = "When would you like to leave?"
    return instance, ft, pt


def _pattern_7(r):
    if r % 2 == 0:
        instance = {
            "service": "Salon_1",
            "domain": "Salon",
            "actions": [_action("REQ_MORE")],
            "ground_truth": "What else do you need?",
            "previous_turn": "Thanks, that is booked.",
        }
        ft = "What else do you need today?"
        pt = "Anything more I can help with?"
    else:
        instance = {
            "service": "Salon_1",
            "domain": "Salon",
            "actions": [_action("GOODBYE")],
            "ground_truth": "Have a good day.",
            "previous_turn": "Thanks, that is all.",
        }
        ft = "Goodbye, have a good day!"
        pt = "Until next time!"
    return instance, ft, pt


def _pattern_8(r):
    airline = AIRLINES[r % 3]
    wrong = AIRLINES[(r + 1) % 3]
    instance = {
        "service": "Flights_2",
        "domain": "Flights",
        "actions": [_action("INFORM", "airline", [airline])],
        "ground_truth": "Your trip is booked.",
        "previous_turn": None,
    }
    ft = f"The company operating the flight is {airline}."
    pt = f"Your flight is booked with {wrong}."
    return instance, ft, pt


def _pattern_9(r):
    stylist = STYLISTS[r % 4]
    other = STYLISTS[(r + 1) % 4]
    instance = {
        "service": "Salon_1",
        "domain": "Salon",
        "actions": [_action("INFORM", "stylist_name", [stylist])],
        "ground_truth": f"The name of the hair stylist is {stylist}, not {other}.",
        "previous_turn": None,
    }
    ft = f"Your stylist is {stylist}."
    pt = f"Your stylist is {other}."
    return instance, ft, pt


_PATTERNS = [
    _pattern_0,
    _pattern_1,
    _pattern_2,
    _pattern_3,
    _pattern_4,
    _pattern_5,
    _pattern_6,
    _pattern_7,
    _pattern_8,
    _pattern_9,
]


def build_synthetic_dataset():
    """Returns (schema_records, instance_records, {system: generation_records})."""
    instances = []
    generations = {"ft": [], "pt": []}
    for index in range(50):
        round_no, pattern_no = divmod(index, 10)
        record, ft_text, pt_text = _PATTERNS[pattern_no](round_no)
        instance_id = f"inst-{index:03d}"
        record = {"instance_id": instance_id, **record}
        instances.append(record)
        generations["ft"].append(
            {
                "instance_id": instance_id,
                "system_id": "ft",
                "text": ft_text,
                "log_likelihood": round(-2.0 - 0.01 * index, 4),
            }
        )
        generations["pt"].append(
            {
                "instance_id": instance_id,
                "system_id": "pt",
                "text": pt_text,
                "log_likelihood": round(-2.5 - 0.01 * index, 4),
            }
        )
    return SCHEMAS, instances, generations


def write_dataset(directory):
    """Write the dataset files; returns their paths as a dict."""
    schemas, instances, generations = build_synthetic_dataset()
    paths = {
        "schemas": directory / "schemas.json",
        "instances": directory / "instances.jsonl",
        "ft": directory / "generations_ft.jsonl",
        "pt": directory / "generations_pt.jsonl",
    }
    paths["schemas"].write_text(json.dumps(schemas, indent=2) + "\n", encoding="utf-8")
    paths["instances"].write_text(
        "\n".join(json.dumps(record) for record in instances) + "\n", encoding="utf-8"
    )
    for system in ("ft", "pt"):
        paths[system].write_text(
            "\n".join(json.dumps(record) for record in generations[system]) + "\n",
            encoding="utf-8",
        )
    return paths
