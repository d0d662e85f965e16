#!/usr/bin/env python3
"""Regenerate toy_transe.tsv: a small structured graph with learnable
relation patterns (people work at orgs, live in cities, cities sit in
countries, citizenship follows residence)."""

import pathlib

import numpy as np

PEOPLE = 30
ORGS = 10
CITIES = 8
COUNTRIES = 4

OUT = pathlib.Path(__file__).resolve().parent / "toy_transe.tsv"


def main():
    rng = np.random.default_rng(2024)
    rows = []

    people = [f"toy:person_{i:02d}" for i in range(PEOPLE)]
    orgs = [f"toy:org_{i:02d}" for i in range(ORGS)]
    cities = [f"toy:city_{i}" for i in range(CITIES)]
    countries = [f"toy:country_{i}" for i in range(COUNTRIES)]

    for p in people:
        rows.append((p, "rdf:type", "toy:Person"))
    for o in orgs:
        rows.append((o, "rdf:type", "toy:Organization"))
    for c in cities:
        rows.append((c, "rdf:type", "toy:City"))
    for c in countries:
        rows.append((c, "rdf:type", "toy:Country"))

    city_country = {c: countries[i % COUNTRIES] for i, c in enumerate(cities)}
    for c in cities:
        rows.append((c, "toy:inCountry", city_country[c]))

    org_city = {o: cities[int(rng.integers(0, CITIES))] for o in orgs}
    for o in orgs:
        rows.append((o, "toy:basedIn", org_city[o]))

    for p in people:
        org = orgs[int(rng.integers(0, ORGS))]
        city = cities[int(rng.integers(0, CITIES))]
        rows.append((p, "toy:worksFor", org))
        rows.append((p, "toy:livesIn", city))
        rows.append((p, "toy:citizenOf", city_country[city]))

    for _ in range(40):
        a, b = rng.choice(PEOPLE, size=2, replace=False)
        rows.append((people[a], "toy:knows", people[b]))

    seen = set()
    with open(OUT, "w", encoding="utf-8") as fh:
        fh.write("# synthetic toy graph for embedding sanity checks\n")
        for s, p, o in rows:
            if (s, p, o) in seen:
                continue
            seen.add((s, p, o))
            fh.write(f"{s}\t{p}\t{o}\n")
    print(f"wrote {len(seen)} triples to {OUT}")


if __name__ == "__main__":
    main()
