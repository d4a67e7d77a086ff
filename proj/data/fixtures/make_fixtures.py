#!/usr/bin/env python3
"""Regenerates the small synthetic datasets under data/fixtures.

Output is deterministic; rerunning rewrites identical files.
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

BANKING = {
    "transfer": ("Move money between accounts or to another person.",
                 ["send {amt} to {who}", "transfer {amt} from checking to savings",
                  "i want to wire {amt} to {who}", "move {amt} over to {who}"]),
    "transactions": ("List recent transactions on an account.",
                     ["show my recent transactions", "what were my last {n} transactions",
                      "list the charges on my {acct} account", "any new transactions on {acct}"]),
    "balance": ("Tell the current balance of an account.",
                ["what is my {acct} balance", "how much money is in {acct}",
                 "tell me the balance of my {acct} account", "check my {acct} balance please"]),
    "freeze_account": ("Freeze an account to stop all activity.",
                       ["freeze my {acct} account", "please lock my {acct} account right now",
                        "i need to freeze {acct}", "put a hold on my {acct} account"]),
    "pay_bill": ("Pay a bill from an account.",
                 ["pay my {bill} bill", "use {acct} to pay the {bill} bill",
                  "i want to pay {amt} toward my {bill} bill", "settle the {bill} bill"]),
    "bill_balance": ("Tell how much is owed on a bill.",
                     ["how much do i owe on my {bill} bill", "what is the balance on the {bill} bill",
                      "tell me what i owe for {bill}", "check the {bill} bill amount"]),
    "bill_due": ("Tell when a bill is due.",
                 ["when is my {bill} bill due", "what is the due date for {bill}",
                  "when do i have to pay the {bill} bill", "due date of my {bill} bill"]),
    "interest_rate": ("Tell the interest rate of an account.",
                      ["what is the interest rate on {acct}", "how much interest does {acct} earn",
                       "tell me the rate on my {acct} account", "interest rate for {acct} please"]),
    "routing": ("Give the routing number of the bank.",
                ["what is my routing number", "give me the routing number for {acct}",
                 "i need the bank routing number", "routing number for my {acct} account"]),
    "min_payment": ("Tell the minimum payment due on a card.",
                    ["what is the minimum payment on my card", "minimum due on the {card} card",
                     "how little can i pay on {card}", "lowest payment for my {card} card"]),
    "order_checks": ("Order new paper checks.",
                     ["order new checks", "i need more checks for {acct}",
                      "send me a new checkbook", "can i get {n} new checks"]),
    "pin_change": ("Change the PIN of a card.",
                   ["change my pin", "i want a new pin for the {card} card",
                    "reset the pin on {card}", "update my {card} card pin"]),
    "report_fraud": ("Report a fraudulent charge.",
                     ["report a fraudulent charge of {amt}", "there is fraud on my {card} card",
                      "someone stole {amt} from {acct}", "i see a charge i did not make on {card}"]),
    "account_blocked": ("Explain why an account is blocked.",
                        ["why is my {acct} account blocked", "my {acct} account is locked",
                         "i cannot access {acct} anymore", "{acct} says it is blocked"]),
    "spending_history": ("Summarize past spending.",
                         ["how much did i spend on {thing} last month", "show my spending on {thing}",
                          "what did i spend on {thing} this year", "spending history for {thing}"]),
}

HOME = {
    "what_song": ("Identify the song that is playing.",
                  ["what song is this", "name the song playing now", "who sings this song",
                   "what is the name of this {genre} track"]),
    "play_music": ("Start playing music.",
                   ["play some {genre}", "put on {artist}", "start playing {genre} music",
                    "i want to hear {artist}"]),
    "todo_list_update": ("Add or remove an item on the to-do list.",
                         ["add {task} to my to do list", "remove {task} from my todo list",
                          "put {task} on the to do list", "take {task} off my to do list"]),
    "reminder": ("List existing reminders.",
                 ["what reminders do i have", "read my reminders", "list my reminders for {day}",
                  "do i have any reminders {day}"]),
    "reminder_update": ("Create or change a reminder.",
                        ["remind me to {task} {day}", "set a reminder to {task}",
                         "change my reminder about {task}", "create a reminder for {day} to {task}"]),
    "calendar_update": ("Add or change a calendar event.",
                        ["schedule {event} on {day}", "add {event} to my calendar",
                         "move {event} to {day}", "put {event} on the calendar for {day}"]),
    "order_status": ("Tell the status of an order.",
                     ["where is my {item} order", "has my {item} shipped yet",
                      "status of the {item} i ordered", "when will my {item} arrive"]),
    "update_playlist": ("Add or remove songs on a playlist.",
                        ["add this song to my {genre} playlist", "put {artist} on my playlist",
                         "remove this track from {genre} playlist", "update my playlist with {artist}"]),
    "shopping_list": ("Read the shopping list.",
                      ["what is on my shopping list", "read my shopping list",
                       "do i have {item} on the shopping list", "tell me my shopping list"]),
    "calendar": ("Tell what is on the calendar.",
                 ["what is on my calendar {day}", "do i have anything {day}",
                  "read my calendar for {day}", "when is {event}"]),
    "next_song": ("Skip to the next song.",
                  ["next song", "skip this track", "play the next song please", "skip to the next one"]),
    "order": ("Place an order for an item.",
              ["order {item}", "buy me {item}", "i want to order {item} online", "place an order for {item}"]),
    "todo_list": ("Read the to-do list.",
                  ["what is on my to do list", "read my todo list", "is {task} on my to do list",
                   "tell me my to do list for {day}"]),
    "shopping_list_update": ("Add or remove items on the shopping list.",
                             ["add {item} to my shopping list", "remove {item} from the shopping list",
                              "put {item} on the shopping list", "take {item} off my shopping list"]),
    "smart_home": ("Control a smart home device.",
                   ["turn off the {device}", "switch on the {device}", "dim the {device}",
                    "set the {device} to {n} percent"]),
}

TRAVEL = {
    "book_flight": ("Book a flight.", ["book a flight to {city}", "get me a plane ticket to {city}"]),
    "book_hotel": ("Book a hotel room.", ["book a hotel in {city}", "find me a room in {city}"]),
    "travel_alert": ("Tell travel alerts for a place.", ["any travel alerts for {city}",
                                                         "is it safe to travel to {city}"]),
}

FILLERS = {
    "amt": ["$50", "$200", "100 dollars", "$75", "20 euros", "$1000"],
    "who": ["mom", "my landlord", "alex", "sam", "my brother", "jordan"],
    "n": ["3", "5", "10", "two", "four"],
    "acct": ["checking", "savings", "joint", "business", "travel"],
    "bill": ["electric", "water", "phone", "internet", "gas", "cable"],
    "card": ["visa", "mastercard", "amex", "debit", "credit"],
    "thing": ["groceries", "restaurants", "gas", "clothes", "travel"],
    "genre": ["jazz", "rock", "classical", "hip hop", "country"],
    "artist": ["adele", "the beatles", "miles davis", "taylor swift", "queen"],
    "task": ["laundry", "call the dentist", "buy milk", "clean the garage", "pay rent"],
    "day": ["today", "tomorrow", "on friday", "next monday", "this weekend"],
    "event": ["the team meeting", "lunch with sam", "a dentist visit", "yoga class"],
    "item": ["paper towels", "batteries", "a phone charger", "coffee beans", "socks"],
    "device": ["kitchen lights", "thermostat", "porch light", "tv", "fan"],
    "city": ["paris", "tokyo", "denver", "rome"],
}


def fill(rng, template):
    out = template
    for key, values in FILLERS.items():
        token = "{" + key + "}"
        while token in out:
            out = out.replace(token, rng.choice(values), 1)
    return out


def intents_block(table):
    return [{"name": name, "description": desc.rstrip(".")} for name, (desc, _) in table.items()]


SLOTS = {
    "hotel": [
        ("area", "area or place of the hotel", "categorical", ["north", "south", "east", "west", "centre"]),
        ("pricerange", "price budget of the hotel", "categorical", ["cheap", "moderate", "expensive"]),
        ("stars", "star rating of the hotel", "categorical", ["1", "2", "3", "4", "5"]),
        ("parking", "whether the hotel has parking", "boolean", []),
        ("internet", "whether the hotel has internet", "boolean", []),
        ("name", "name of the hotel", "open", []),
        ("day", "day of the hotel booking", "categorical",
         ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]),
    ],
    "restaurant": [
        ("area", "area or place of the restaurant", "categorical", ["north", "south", "east", "west", "centre"]),
        ("pricerange", "price budget for the restaurant", "categorical", ["cheap", "moderate", "expensive"]),
        ("food", "the cuisine of the restaurant", "open", []),
        ("name", "name of the restaurant", "open", []),
        ("time", "time of the restaurant booking", "open", []),
    ],
    "train": [
        ("departure", "departure location of the train", "open", []),
        ("destination", "destination of the train", "open", []),
        ("day", "day of the train", "categorical",
         ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]),
        ("leaveat", "leaving time of the train", "open", []),
    ],
    "attraction": [
        ("area", "area to search for attractions", "categorical", ["north", "south", "east", "west", "centre"]),
        ("type", "type of the attraction", "open", []),
        ("name", "name of the attraction", "open", []),
    ],
    "taxi": [
        ("departure", "departure location of the taxi", "open", []),
        ("destination", "destination of the taxi", "open", []),
        ("arriveby", "arrival time of the taxi", "open", []),
    ],
}

OPEN_VALUES = {
    ("hotel", "name"): ["rosewood", "acorn guest house", "the lensfield", "alpha milton", "city centre north"],
    ("restaurant", "food"): ["italian", "chinese", "indian", "british", "thai"],
    ("restaurant", "name"): ["golden wok", "pizza hut city", "the nirala", "curry garden"],
    ("restaurant", "time"): ["12:30", "18:00", "19:45", "20:15"],
    ("train", "departure"): ["cambridge", "london kings cross", "ely", "norwich"],
    ("train", "destination"): ["stansted airport", "peterborough", "leicester", "cambridge"],
    ("train", "leaveat"): ["08:15", "09:30", "13:00", "17:45"],
    ("attraction", "type"): ["museum", "college", "park", "theatre"],
    ("attraction", "name"): ["kings college", "the fitzwilliam museum", "botanic garden"],
    ("taxi", "departure"): ["the station", "kings college", "rosewood", "golden wok"],
    ("taxi", "destination"): ["the airport", "the nirala", "acorn guest house", "the station"],
    ("taxi", "arriveby"): ["10:00", "14:30", "19:00"],
}

BOOLEAN_PHRASES = {"parking": "free parking", "internet": "wifi"}


def slot_value(rng, domain, slot, kind, candidates):
    if kind == "categorical":
        return rng.choice(candidates)
    if kind == "boolean":
        return rng.choice(["yes", "no"])
    return rng.choice(OPEN_VALUES[(domain, slot)])


def mention(domain, slot, kind, value):
    if kind == "boolean":
        phrase = BOOLEAN_PHRASES[slot]
        return f"with {phrase}" if value == "yes" else f"without {phrase}"
    return f"{slot} {value}"


def make_dialog(rng, ident):
    domains = rng.sample(sorted(SLOTS), rng.choice([1, 1, 2]))
    turns = []
    state = {}
    for t in range(rng.randint(2, 4)):
        if t > 0:
            turns.append({"speaker": "system", "utterance": rng.choice(
                ["sure , anything else ?", "i can help with that .", "what else do you need ?",
                 "ok , noted ."])})
        domain = domains[min(t, len(domains) - 1) if t < len(domains) else rng.randrange(len(domains))]
        picks = rng.sample(SLOTS[domain], rng.randint(1, 2))
        parts = []
        for slot, _, kind, candidates in picks:
            value = slot_value(rng, domain, slot, kind, candidates)
            state[(domain, slot)] = value
            parts.append(mention(domain, slot, kind, value))
        turns.append({"speaker": "user",
                      "utterance": f"i need a {domain} " + " and ".join(parts),
                      "state": [{"domain": d, "slot": s, "value": v}
                                for (d, s), v in sorted(state.items())]})
    if rng.random() < 0.5:
        turns.append({"speaker": "system", "utterance": "have a nice day ."})
    return {"id": ident, "turns": turns}


T2G2 = [
    ("Inform", "name", "The hotel is called {value}."),
    ("Inform", "star", "It is {value} star."),
    ("Inform", "area", "It is in the {value}."),
    ("Inform", "pricerange", "It is in the {value} price range."),
    ("Inform", "food", "It serves {value} food."),
    ("Inform", "type", "It is a {value}."),
    ("Inform", "phone", "The phone number is {value}."),
    ("Inform", "trainid", "The train is {value}."),
    ("Inform", "leaveat", "It leaves at {value}."),
    ("Inform", "price", "It costs {value}."),
    ("Inform", "car", "The car is a {value}."),
    ("Recommend", "name", "I recommend {value}."),
    ("Request", "area", "Which {value} would you like?"),
    ("Request", "day", "Which {value} do you want?"),
    ("Book", "ref", "I booked it, the reference is {value}."),
    ("Goodbye", None, "Goodbye."),
    ("Reqmore", None, "Anything else?"),
]

REFERENCE_PHRASES = {
    ("Inform", "name"): "{value} is the place",
    ("Inform", "star"): "it has {value} stars",
    ("Inform", "area"): "it is located in the {value}",
    ("Inform", "pricerange"): "prices are {value}",
    ("Inform", "food"): "they serve {value} food",
    ("Inform", "type"): "it is a {value}",
    ("Inform", "phone"): "you can call them on {value}",
    ("Inform", "trainid"): "{value} is your train",
    ("Inform", "leaveat"): "it departs at {value}",
    ("Inform", "price"): "a ticket is {value}",
    ("Inform", "car"): "a {value} will pick you up",
    ("Recommend", "name"): "how about {value}",
    ("Request", "area"): "what area do you prefer",
    ("Request", "day"): "what day works for you",
    ("Book", "ref"): "your booking reference is {value}",
    ("Goodbye", None): "goodbye",
    ("Reqmore", None): "can i help with anything else",
}

NLG_ACTS = {
    "hotel": [[("Inform", "name"), ("Inform", "star")], [("Inform", "area"), ("Inform", "pricerange")],
              [("Request", "area")], [("Book", "ref"), ("Reqmore", None)]],
    "restaurant": [[("Recommend", "name"), ("Inform", "food")], [("Inform", "pricerange"), ("Inform", "phone")],
                   [("Request", "area")], [("Book", "ref")]],
    "train": [[("Inform", "trainid"), ("Inform", "leaveat")], [("Inform", "price")], [("Request", "day")]],
    "attraction": [[("Recommend", "name"), ("Inform", "type")], [("Inform", "area"), ("Inform", "phone")],
                   [("Goodbye", None)]],
    "taxi": [[("Inform", "car"), ("Inform", "phone")], [("Book", "ref"), ("Reqmore", None)]],
}

NLG_VALUES = {
    "name": ["Rosewood", "Golden Wok", "Acorn Guest House", "Kings College", "The Nirala"],
    "star": ["2", "3", "4", "5"],
    "area": ["north", "south", "east", "west", "centre"],
    "pricerange": ["cheap", "moderate", "expensive"],
    "food": ["italian", "chinese", "indian", "thai"],
    "type": ["museum", "college", "park"],
    "phone": ["01223 351880", "01223 302010", "01223 356555"],
    "trainid": ["TR1234", "TR5512", "TR0821"],
    "leaveat": ["08:15", "13:00", "17:45"],
    "price": ["10.10 pounds", "23.60 pounds", "4.40 pounds"],
    "car": ["red toyota", "black audi", "white ford"],
    "ref": ["A1B2C3D4", "QX7TR2LM", "ZZ81KP09"],
}


def render_acts(frames):
    parts = []
    for act, slots in frames:
        inner = ", ".join(s if v is None else f"{s}={v}" for s, v in slots)
        parts.append(f"{act}({inner})")
    return ", ".join(parts)


def make_nlg_item(rng, ident, dialog_id, domain):
    pattern = rng.choice(NLG_ACTS[domain])
    frames = []
    phrases = []
    for act, slot in pattern:
        if slot is None:
            frames.append((act, []))
            phrases.append(REFERENCE_PHRASES[(act, None)])
            continue
        value = None if act == "Request" else rng.choice(NLG_VALUES[slot])
        if frames and frames[-1][0] == act:
            frames[-1][1].append((slot, value))
        else:
            frames.append((act, [(slot, value)]))
        phrases.append(REFERENCE_PHRASES[(act, slot)].replace("{value}", value or ""))
    reference = " , ".join(phrases) + " ."
    return {"id": ident, "dialog_id": dialog_id, "domain": domain,
            "acts": render_acts(frames), "reference": reference}


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


def main():
    rng = random.Random(20221007)

    ontology = {"name": "fixture", "version": "1", "domains": [
        {"name": "banking", "intents": intents_block(BANKING)},
        {"name": "home", "intents": intents_block(HOME)},
        {"name": "travel", "intents": intents_block(TRAVEL)},
    ]}
    for domain, slots in SLOTS.items():
        ontology["domains"].append({"name": domain, "slots": [
            {"name": n, "description": d, "kind": k, "candidate_values": c} for n, d, k, c in slots]})
    write_json(HERE / "ontology.json", ontology)

    sizes = {"train": 8, "val": 6, "test": 3}
    oos = {}
    for split, per_label in sizes.items():
        rows = []
        for table in (BANKING, HOME, TRAVEL):
            for name, (_, templates) in table.items():
                for _ in range(per_label):
                    rows.append([fill(rng, rng.choice(templates)), name])
        for _ in range(2):
            rows.append([rng.choice(["what is the meaning of life", "tell me a joke about cats",
                                     "how tall is mount everest"]), "oos"])
        rng.shuffle(rows)
        oos[split] = rows
        oos["oos_" + split] = [["how do i bake bread", "oos"]]
    write_json(HERE / "intents_oos.json", oos)

    for split, count in {"train": 40, "val": 20, "test": 10}.items():
        dialogs = [make_dialog(rng, f"{split}-d{i:03d}") for i in range(count)]
        write_json(HERE / f"dst_{split}.json", {"dialogs": dialogs})

    write_json(HERE / "t2g2_templates.json",
               {"templates": [{"act": a, "slot": s, "template": t} for a, s, t in T2G2]})
    for split, per_domain in {"train": 6, "val": 4, "test": 2}.items():
        items = []
        for domain in NLG_ACTS:
            for d in range(per_domain):
                dialog_id = f"{split}-{domain}-{d}"
                for t in range(2):
                    items.append(make_nlg_item(rng, f"{dialog_id}-t{t}", dialog_id, domain))
        write_jsonl(HERE / f"nlg_{split}.jsonl", items)


if __name__ == "__main__":
    main()
