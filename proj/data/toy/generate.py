# Copyright 2026 The E-BERT Tools Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the toy fixtures in this directory.

Dimensions 0..8 are one-hot answer directions; 9..15 carry context noise.
The word/entity space is the wordpiece space pulled back through
W* = 2 P (P a cyclic shift), so every value is an integer or a half and the
fitted alignment is exact up to rounding.
"""

import json
import os
import random

DIM = 16
ANSWERS = ["Australia", "Christmas", "English", "Fiat", "French", "Italian",
           "London", "Paris", "Rome"]
A = {name: i for i, name in enumerate(ANSWERS)}
NOISE = range(9, DIM)
SPECIALS = ["[CLS]", "[SEP]", "[MASK]", "[UNK]", "/", "#", "$", "*"]
WORDS = ["The", "native", "language", "of", "is", "was", "born", "in",
         "produced", "by", "named", "after", "a", "legal", "term", "common",
         "name", "the", "following", "city", "country", "and", "lived",
         "borders", "China", ".", ":", "Jean", "Sophia", "Loren", "Marcel",
         "Pro", "Charlie", "Chaplin", "Multi", "Island", "Australian",
         "Senate", "Burma"]
CONTINUATIONS = ["##is", "##ust", "##pla"]

# Answer-direction components on top of the noise.
BOOSTS = {
    "language": {"French": 1, "Italian": 1, "English": 1},
    "born": {"Paris": 1, "Rome": 1, "London": 1},
    "common": {"Australia": 2, "Christmas": 2, "Fiat": 2},
    "Jean": {"French": 3},
}
ENTITIES = {
    "Jean_Marais": {"French": 4},
    "Sophia_Loren": {"Italian": 4, "Rome": 4},
    "Marcel_Proust": {"Paris": 4, "French": 4},
    "Charlie_Chaplin": {"English": 4, "London": 4},
    "Fiat_Multipla": {"Fiat": 4},
    "Christmas_Island": {"Christmas": 4},
    "Australian_Senate": {"Australia": 4},
    "Paris": {"Paris": 2},
    "Paris_Hilton": {},
    "Rome": {"Rome": 2},
    "Rome,_Georgia": {},
    "London": {"London": 2},
    "Myanmar": {},
}

rng = random.Random(20260101)


def noise_vector(boosts=None):
    v = [0] * DIM
    for j in NOISE:
        v[j] = rng.randint(-3, 3)
    for name, value in (boosts or {}).items():
        v[A[name]] = value
    return v


def pull_back(y):
    # x = P^T y / 2 with (P x)_i = x_{(i + 1) % DIM}.
    x = [0.0] * DIM
    for i in range(DIM):
        x[(i + 1) % DIM] = y[i] / 2
    return x


def fmt(value):
    return str(int(value)) if float(value).is_integer() else repr(value)


def write_space(path, rows):
    with open(path, "w") as f:
        f.write(f"{len(rows)} {DIM}\n")
        for symbol, v in rows:
            f.write(symbol + " " + " ".join(fmt(x) for x in v) + "\n")


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    wp = [(s, noise_vector()) for s in SPECIALS]
    for name in ANSWERS:
        v = [0] * DIM
        v[A[name]] = 1
        wp.append((name, v))
    wp += [(w, noise_vector(BOOSTS.get(w))) for w in WORDS]
    wp += [(w, noise_vector()) for w in CONTINUATIONS]
    write_space(os.path.join(here, "wordpieces.txt"), wp)

    wiki = [(s, pull_back(v)) for s, v in wp
            if not s.startswith("[") and not s.startswith("##")
            and s not in ("/", "#", "$", "*")]
    wiki.append(("Marais", pull_back(noise_vector())))
    for name, boosts in ENTITIES.items():
        wiki.append(("ENTITY/" + name, pull_back(noise_vector(boosts))))
    write_space(os.path.join(here, "wiki.txt"), wiki)

    lama = {
        "P103": [("Jean Marais", "French"), ("Sophia Loren", "Italian"),
                 ("Charlie Chaplin", "English")],
        "P19": [("Sophia Loren", "Rome"), ("Marcel Proust", "Paris"),
                ("Charlie Chaplin", "London")],
        "P176": [("Fiat Multipla", "Fiat")],
        "P138": [("Christmas Island", "Christmas")],
        "P1001": [("Australian Senate", "Australia")],
    }
    os.makedirs(os.path.join(here, "lama"), exist_ok=True)
    for relation, rows in lama.items():
        with open(os.path.join(here, "lama", relation + ".jsonl"), "w") as f:
            for sub, obj in rows:
                f.write(json.dumps({"sub_label": sub, "obj_label": obj,
                                    "sub_uri": "Q0"}) + "\n")
    templates = [
        {"relation": "P103", "template": "The native language of [X] is [Y] .",
         "name_noun": "language"},
        {"relation": "P19", "template": "[X] was born in [Y] .",
         "name_noun": "city"},
        {"relation": "P176", "template": "[X] is produced by [Y] .",
         "name_noun": "none"},
        {"relation": "P138", "template": "[X] is named after [Y] .",
         "name_noun": "none"},
        {"relation": "P1001", "template": "[X] is a legal term in [Y] .",
         "name_noun": "none"},
    ]
    with open(os.path.join(here, "templates.json"), "w") as f:
        json.dump(templates, f, indent=1)
        f.write("\n")

    subjects = sorted({sub for rows in lama.values() for sub, _ in rows})
    qids = {"Jean Marais": "Q168359"}
    with open(os.path.join(here, "resolutions.tsv"), "w") as f:
        for i, sub in enumerate(subjects):
            title = sub.replace(" ", "_")
            qid = qids.get(sub, f"Q{1000 + i}")
            f.write(f"{sub}\t{qid}\thttps://en.wikipedia.org/wiki/{title}\n")

    wikidata = {
        "labels": {"Jean Marais": ["Q168359"], "Paris": ["Q167646", "Q90"]},
        "sitelinks": {
            "Q168359": "https://en.wikipedia.org/wiki/Jean_Marais",
            "Q90": "https://en.wikipedia.org/wiki/Paris",
        },
    }
    with open(os.path.join(here, "wikidata_fixture.json"), "w") as f:
        json.dump(wikidata, f, indent=1)
        f.write("\n")
    with open(os.path.join(here, "surfaces.txt"), "w") as f:
        f.write("Jean Marais\nParis\nAtlantis Prime\n")

    wiki_url = "https://en.wikipedia.org/wiki/"
    table = [
        ("Marcel Proust", "Marcel_Proust", 1.0),
        ("Sophia Loren", "Sophia_Loren", 1.0),
        ("Paris", "Paris", 0.9),
        ("Paris", "Paris_Hilton", 0.1),
        ("Rome", "Rome", 0.8),
        ("Rome", "Rome,_Georgia", 0.2),
        ("London", "London", 0.95),
        ("Burma", "Myanmar", 1.0),
    ]
    with open(os.path.join(here, "el_table.tsv"), "w") as f:
        for surface, entity, prior in table:
            f.write(f"{surface}\t{wiki_url}{entity}\t{prior}\n")
    docs = [
        {"doc_id": "d1", "tokens": "Marcel Proust was born in Paris .".split(),
         "golds": [{"start": 0, "end": 2, "entity": wiki_url + "Marcel_Proust"},
                   {"start": 5, "end": 6, "entity": wiki_url + "Paris"}]},
        {"doc_id": "d2",
         "tokens": "Sophia Loren was born in Rome . She lived in London ."
                   .split(),
         "sentence_lengths": [7, 5],
         "golds": [{"start": 0, "end": 2, "entity": wiki_url + "Sophia_Loren"},
                   {"start": 5, "end": 6, "entity": wiki_url + "Rome"},
                   {"start": 10, "end": 11, "entity": wiki_url + "London"}]},
        {"doc_id": "d3", "tokens": "Burma borders China .".split(),
         "golds": [{"start": 0, "end": 1, "entity": wiki_url + "Burma"}]},
    ]
    with open(os.path.join(here, "el_docs.jsonl"), "w") as f:
        for doc in docs:
            f.write(json.dumps(doc) + "\n")
    with open(os.path.join(here, "redirects.tsv"), "w") as f:
        f.write(f"{wiki_url}Burma\t{wiki_url}Myanmar\n")


if __name__ == "__main__":
    main()
