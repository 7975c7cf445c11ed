# Regenerates landmarks100.csv: 100 distinct names on a jittered global grid.
import csv
import random

rng = random.Random(20240123)
first = ["Amber", "Basalt", "Cobalt", "Driftwood", "Ember", "Fjord", "Granite", "Heron", "Indigo", "Juniper"]
second = ["Harbor", "Lantern", "Meadow", "Orchard", "Quarry", "Ridge", "Sparrow", "Thistle", "Willow", "Zephyr"]
kinds = [("museum", "Museum"), ("tower", "Tower"), ("park", "Gardens"), ("bridge", "Bridge"), ("market", "Market")]

rows = []
for i, a in enumerate(first):
    for j, b in enumerate(second):
        cat, suffix = kinds[(i + 2 * j) % len(kinds)]
        lat = -55 + i * 12 + rng.uniform(-2, 2)
        lon = -170 + j * 35 + rng.uniform(-5, 5)
        name = f"{a} {b} {suffix}"
        rows.append([f"lm{i}{j}", name, f"{lat:.5f}", f"{lon:.5f}", cat,
                     f"The {name} is a {cat} landmark.", "synthetic registry",
                     f"{rng.uniform(0.5, 1.0):.2f}", ""])

with open("landmarks100.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["id", "name", "lat", "lon", "category", "description", "source", "credibility", "admin_path"])
    w.writerows(rows)
