#!/usr/bin/env python3
"""Writes the synthetic sample datasets and the demo geo fixtures.

The samples follow the real schemas (column names, codes, missing markers)
but every value is generated. Output is deterministic.
"""
import csv
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

CERVICAL_COLUMNS = [
    "Age", "Number of sexual partners", "First sexual intercourse", "Num of pregnancies",
    "Smokes", "Smokes (years)", "Smokes (packs/year)", "Hormonal Contraceptives",
    "Hormonal Contraceptives (years)", "IUD", "IUD (years)", "STDs", "STDs (number)",
    "STDs:condylomatosis", "STDs:cervical condylomatosis", "STDs:vaginal condylomatosis",
    "STDs:vulvo-perineal condylomatosis", "STDs:syphilis", "STDs:pelvic inflammatory disease",
    "STDs:genital herpes", "STDs:molluscum contagiosum", "STDs:AIDS", "STDs:HIV",
    "STDs:Hepatitis B", "STDs:HPV", "STDs: Number of diagnosis",
    "STDs: Time since first diagnosis", "STDs: Time since last diagnosis",
    "Dx:Cancer", "Dx:CIN", "Dx:HPV", "Dx", "Hinselmann", "Schiller", "Citology", "Biopsy",
]

BREAST_COLUMNS = [
    "menopaus", "agegrp", "density", "race", "Hispanic", "bmi", "agefirst", "nrelbc",
    "brstproc", "lastmamm", "surgmeno", "hrt", "invasive", "cancer", "training", "count",
]

# name, lat, lon (approximate district headquarters)
DISTRICTS = [
    ("Adilabad", 19.6641, 78.5320), ("Bhadradri Kothagudem", 17.5546, 80.6197),
    ("Hanumakonda", 18.0072, 79.5583), ("Hyderabad", 17.3850, 78.4867),
    ("Jagtial", 18.7895, 78.9120), ("Jangaon", 17.7244, 79.1522),
    ("Jayashankar Bhupalpally", 18.4300, 79.8600), ("Jogulamba Gadwal", 16.2340, 77.7956),
    ("Kamareddy", 18.3220, 78.3370), ("Karimnagar", 18.4386, 79.1288),
    ("Khammam", 17.2473, 80.1514), ("Kumuram Bheem Asifabad", 19.3600, 79.2800),
    ("Mahabubabad", 17.5980, 80.0021), ("Mahabubnagar", 16.7488, 77.9856),
    ("Mancherial", 18.8714, 79.4443), ("Medak", 18.0453, 78.2608),
    ("Medchal-Malkajgiri", 17.6290, 78.4810), ("Mulugu", 18.1910, 79.9430),
    ("Nagarkurnool", 16.4820, 78.3130), ("Nalgonda", 17.0575, 79.2684),
    ("Narayanpet", 16.7445, 77.4960), ("Nirmal", 19.0964, 78.3440),
    ("Nizamabad", 18.6725, 78.0941), ("Peddapalli", 18.6140, 79.3740),
    ("Rajanna Sircilla", 18.3880, 78.8100), ("Rangareddy", 17.2290, 78.2700),
    ("Sangareddy", 17.6190, 78.0820), ("Siddipet", 18.1018, 78.8520),
    ("Suryapet", 17.1405, 79.6236), ("Vikarabad", 17.3380, 77.9040),
    ("Wanaparthy", 16.3620, 78.0620), ("Warangal", 17.9689, 79.5941),
    ("Yadadri Bhuvanagiri", 17.5120, 78.8890),
]

TOWNS = [
    ("Secunderabad", 17.4399, 78.4983, "Hyderabad"), ("Gachibowli", 17.4401, 78.3489, "Rangareddy"),
    ("Kazipet", 17.9784, 79.5047, "Hanumakonda"), ("Ramagundam", 18.7550, 79.4740, "Peddapalli"),
    ("Bodhan", 18.6620, 77.8870, "Nizamabad"), ("Kothagudem", 17.5500, 80.6190, "Bhadradri Kothagudem"),
    ("Miryalaguda", 16.8722, 79.5625, "Nalgonda"), ("Bellampalli", 19.0550, 79.4930, "Mancherial"),
    ("Tandur", 17.2576, 77.5875, "Vikarabad"), ("Zaheerabad", 17.6810, 77.6070, "Sangareddy"),
    ("Kodad", 16.9978, 79.9653, "Suryapet"), ("Bhongir", 17.5150, 78.8880, "Yadadri Bhuvanagiri"),
]


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cervical(rng, n=240):
    rows = []
    for _ in range(n):
        cancer = 1 if rng.random() < 0.04 else 0
        age = rng.randint(15, 60)
        partners = rng.randint(1, 6)
        first = rng.randint(13, min(age, 28))
        preg = rng.randint(0, 5)
        smokes = 1 if rng.random() < 0.15 else 0
        hc = 1 if rng.random() < 0.6 else 0
        iud = 1 if rng.random() < 0.1 else 0
        stds = 1 if rng.random() < 0.1 else 0
        std_flags = [0] * 12
        if stds:
            std_flags[rng.choice([0, 2, 3, 4, 5, 6, 9, 10])] = 1
        # two of the flags never fire, as in the real data
        std_flags[1] = 0
        std_flags[8] = 0
        cin = 1 if (not cancer and rng.random() < 0.02) else 0
        hpv = cancer if rng.random() < 0.9 else 1 - cancer
        dx = 1 if (cancer or cin or hpv) else 0
        tests = [1 if rng.random() < (0.5 if cancer else 0.05) else 0 for _ in range(4)]
        row = [
            age, partners, first, preg,
            smokes, round(smokes * rng.uniform(1, 20), 1), round(smokes * rng.uniform(0.1, 5), 2),
            hc, round(hc * rng.uniform(0.25, 10), 2), iud, round(iud * rng.uniform(1, 8), 1),
            stds, sum(std_flags), *std_flags, sum(std_flags),
            rng.randint(1, 20) if stds else "?", rng.randint(1, 20) if stds else "?",
            cancer, cin, hpv, dx, *tests,
        ]
        if rng.random() < 0.08:
            for c in (5, 6, 8, 10, 11, 12):
                row[c] = "?"
        if rng.random() < 0.03:
            row[1] = "?"
        rows.append(row)
    for i in rng.sample(range(n), 6):
        rows.append(list(rows[i]))
    rng.shuffle(rows)
    return rows


def breast(rng, n=900):
    def coded(values, p9=0.03):
        return 9 if rng.random() < p9 else rng.choice(values)

    rows = []
    for _ in range(n):
        agegrp = rng.randint(1, 10)
        meno = coded([0, 1]) if agegrp > 3 else 0
        density = coded([1, 2, 3, 4])
        cancer = 1 if rng.random() < 0.02 + 0.02 * (density if density != 9 else 2) else 0
        invasive = cancer if rng.random() < 0.8 else 0
        row = [
            meno, agegrp, density, coded([1, 2, 3, 4, 5]), coded([0, 1]), coded([1, 2, 3, 4]),
            coded([0, 1, 2]), coded([0, 1, 2]), coded([0, 1]), coded([0, 1]), coded([0, 1]), coded([0, 1]),
            invasive, cancer, 1 if rng.random() < 0.5 else 0, rng.randint(1, 120),
        ]
        rows.append(row)
    for i in rng.sample(range(n), 40):
        dup = list(rows[i])
        dup[14] = 1 - dup[14]  # differs only in the excluded column
        rows.append(dup)
    rng.shuffle(rows)
    return rows


def districts(rng):
    def series(mean, spread):
        # tenths, so the statewide mean comes out exact to one decimal
        tenths = [max(0, round((mean + rng.uniform(-spread, spread)) * 10)) for _ in DISTRICTS]
        diff = round(mean * 10) * len(tenths) - sum(tenths)
        i = 0
        while diff:
            step = 1 if diff > 0 else -1
            if tenths[i % len(tenths)] + step >= 0:
                tenths[i % len(tenths)] += step
                diff -= step
            i += 1
        return [t / 10 for t in tenths]

    cerv = series(3.3, 2.6)
    brst = series(0.3, 0.3)
    oral = series(2.3, 1.8)
    return [(d, c, b, o, lat, lon) for (d, lat, lon), c, b, o in zip(DISTRICTS, cerv, brst, oral)]


def facilities(rng):
    out = []
    n = 0
    for name, lat, lon in DISTRICTS:
        n += 1
        out.append((f"F{n:03d}", f"District Hospital {name}", "hospital",
                    round(lat + rng.uniform(-0.03, 0.03), 4), round(lon + rng.uniform(-0.03, 0.03), 4), name))
    for name in ("Hyderabad", "Warangal", "Karimnagar", "Khammam", "Nizamabad", "Mahabubnagar"):
        lat, lon = next((a, b) for d, a, b in DISTRICTS if d == name)
        n += 1
        out.append((f"F{n:03d}", f"Regional Cancer Centre {name}", "cancer_centre",
                    round(lat + rng.uniform(-0.05, 0.05), 4), round(lon + rng.uniform(-0.05, 0.05), 4), name))
    for name, lat, lon in rng.sample(DISTRICTS, 16):
        n += 1
        out.append((f"F{n:03d}", f"Screening Camp {name}", "screening_camp",
                    round(lat + rng.uniform(-0.2, 0.2), 4), round(lon + rng.uniform(-0.2, 0.2), 4), name))
    return out


def main():
    rng = random.Random(20240607)
    write_csv(ROOT / "data/samples/cervical_sample.csv", CERVICAL_COLUMNS, cervical(rng))
    write_csv(ROOT / "data/samples/breast_sample.csv", BREAST_COLUMNS, breast(rng))
    write_csv(ROOT / "data/demo/districts.csv", ["district", "cervical_pct", "breast_pct", "oral_pct", "lat", "lon"],
              districts(rng))
    write_csv(ROOT / "data/demo/facilities.csv", ["id", "name", "kind", "lat", "lon", "district"], facilities(rng))
    gaz = [(d, lat, lon, d) for d, lat, lon in DISTRICTS] + list(TOWNS)
    write_csv(ROOT / "data/demo/gazetteer.csv", ["name", "lat", "lon", "district"], sorted(gaz))


if __name__ == "__main__":
    main()
