"""Regenerates the checked-in CSV fixtures. Deterministic: a fixed seed
drives every draw, so reruns reproduce the same bytes."""

from __future__ import annotations

import csv
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def write_csv(name: str, header: list, rows: list) -> None:
    path = os.path.join(HERE, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print("wrote %s (%d rows)" % (path, len(rows)))


def make_cars() -> None:
    rng = random.Random(42)
    rows = []
    origins = ["USA", "Europe", "Japan"]
    brands = [
        "falcon", "comet", "torino", "rebel", "monarch", "swift", "vista",
        "pioneer", "summit", "aurora", "ridge", "breeze",
    ]
    missing_hp = {17, 55, 128, 203, 287, 350}
    for i in range(406):
        origin = origins[rng.randrange(3)]
        cylinders = rng.choice([3, 4, 4, 4, 5, 6, 6, 8, 8])
        mpg = round(rng.uniform(9.0, 46.6), 1)
        displacement = rng.randrange(68, 456)
        horsepower = "NA" if i in missing_hp else rng.randrange(46, 231)
        weight = rng.randrange(1613, 5141)
        acceleration = round(rng.uniform(8.0, 24.8), 1)
        year = "19%d-01-01" % rng.randrange(70, 83)
        model = "%s %d" % (brands[rng.randrange(len(brands))], i + 1)
        rows.append(
            [model, mpg, cylinders, displacement, horsepower, weight, acceleration, year, origin]
        )
    write_csv(
        "cars.csv",
        [
            "Model",
            "Miles_per_Gallon",
            "Cylinders",
            "Displacement",
            "Horsepower",
            "Weight_in_lbs",
            "Acceleration",
            "Year",
            "Origin",
        ],
        rows,
    )


def make_covid() -> None:
    rng = random.Random(7)
    states = {
        "Washington": ("West", 47.4, -120.7),
        "Oregon": ("West", 43.9, -120.6),
        "California": ("West", 37.2, -119.3),
        "Nevada": ("West", 39.3, -116.6),
        "Idaho": ("West", 44.4, -114.6),
        "Arizona": ("West", 34.3, -111.7),
        "Utah": ("West", 39.3, -111.7),
        "Montana": ("West", 47.0, -109.6),
        "Colorado": ("West", 39.0, -105.5),
        "Texas": ("South", 31.5, -99.3),
        "New York": ("Northeast", 42.9, -75.5),
        "Florida": ("South", 28.6, -82.4),
    }
    dates = ["2020-03-%02d" % d for d in range(1, 21)]
    rows = []
    totals = {name: rng.randrange(20, 400) for name in states}
    deaths = {name: rng.randrange(0, 8) for name in states}
    for date in dates:
        for name in states:
            region, lat, lon = states[name]
            totals[name] += rng.randrange(10, 2500)
            deaths[name] += rng.randrange(0, 120)
            rows.append([date, name, region, lat, lon, totals[name], deaths[name]])
    write_csv(
        "covid.csv",
        ["date", "state", "region", "latitude", "longitude", "confirmed", "deaths"],
        rows,
    )


def make_hollywood() -> None:
    rng = random.Random(11)
    genres = ["Comedy", "Drama", "Action", "Animation", "Romance"]
    studios = ["Independent", "Fox", "Universal", "Warner", "Paramount", "Disney"]
    words = [
        "midnight", "summer", "broken", "golden", "silent", "crimson", "last",
        "first", "hidden", "distant", "burning", "frozen",
    ]
    nouns = ["river", "city", "promise", "letters", "garden", "station", "echo", "harbor"]
    rows = []
    for i in range(74):
        film = "%s %s %d" % (
            words[rng.randrange(len(words))].title(),
            nouns[rng.randrange(len(nouns))].title(),
            i + 1,
        )
        genre = genres[rng.randrange(len(genres))]
        studio = studios[rng.randrange(len(studios))]
        audience = rng.randrange(35, 97)
        profitability = round(rng.uniform(0.2, 12.5), 2)
        tomatoes = rng.randrange(15, 100)
        gross = round(rng.uniform(5.0, 720.0), 2)
        year = rng.randrange(2007, 2012)
        rows.append([film, genre, studio, audience, profitability, tomatoes, gross, year])
    write_csv(
        "hollywood.csv",
        [
            "Film",
            "Genre",
            "Lead_Studio",
            "Audience_Score",
            "Profitability",
            "Rotten_Tomatoes",
            "Worldwide_Gross",
            "Year",
        ],
        rows,
    )


if __name__ == "__main__":
    make_cars()
    make_covid()
    make_hollywood()
