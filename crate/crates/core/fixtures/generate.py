#!/usr/bin/env python3
"""Regenerates the checked-in fixture files.

Every fixture is deterministic (fixed seeds, closed-form counts). The
arithmetic behind each published value is documented in README.md; this
script also prints an independent recomputation of those values so the
README numbers can be re-checked after any edit.

    python3 fixtures/generate.py
"""

import csv
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

GENDERS = ["Men", "Women"]
RACES = [
    "American Indian or Alaska Native",
    "Asian",
    "Black or African American",
    "Hispanic or Latino",
    "Native Hawaiian or Other Pacific Islander",
    "White",
    "Two or more races",
]
AIAN, ASIAN, BLACK, HISP, NHPI, WHITE, TWO = RACES
HEADER = ["institution_id", "year", "cip_family", "award_level", "gender", "race", "count"]


def write_canonical(name, rows):
    rows = [r for r in rows if r[6] > 0]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], GENDERS.index(r[4]), RACES.index(r[5])))
    with open(os.path.join(HERE, name), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in rows:
            w.writerow(r)


def entropy(counts):
    n = sum(counts)
    return -sum(c / n * math.log(c / n) for c in counts if c > 0)


def evenness(counts, k):
    return 100.0 * entropy(counts) / math.log(k)


def jsd(p, q):
    m = [(a + b) / 2 for a, b in zip(p, q)]
    return entropy_p(m) - 0.5 * (entropy_p(p) + entropy_p(q))


def entropy_p(p):
    return -sum(x * math.log(x) for x in p if x > 0)


def norm(counts):
    n = sum(counts)
    return [c / n for c in counts]


def cells():
    return [(g, r) for g in GENDERS for r in RACES]


def rows_from(inst, year, cip, table):
    """table: dict (gender, race) -> count."""
    return [[inst, year, cip, "bachelors", g, r, table.get((g, r), 0)] for g, r in cells()]


# ---------------------------------------------------------------- two institutions
def two_institutions():
    # CIP-11 counts. Institution 1: 112 total, 101 Hispanic (16 women, 85 men).
    # Institution 2: 580 total, 23 Hispanic (10 women, 13 men).
    cs1 = {("Men", HISP): 85, ("Women", HISP): 16, ("Men", WHITE): 4, ("Women", WHITE): 1,
           ("Men", ASIAN): 4, ("Women", ASIAN): 1, ("Men", BLACK): 1}
    cs2 = {("Men", HISP): 13, ("Women", HISP): 10, ("Men", WHITE): 300, ("Women", WHITE): 80,
           ("Men", ASIAN): 90, ("Women", ASIAN): 35, ("Men", BLACK): 20, ("Women", BLACK): 8,
           ("Men", TWO): 14, ("Women", TWO): 5, ("Men", AIAN): 3, ("Men", NHPI): 2}
    # All-degree totals per cell (CIP-11 included).
    all1 = {("Men", HISP): 1328, ("Women", HISP): 1800, ("Men", WHITE): 180, ("Women", WHITE): 260,
            ("Men", ASIAN): 120, ("Women", ASIAN): 150, ("Men", BLACK): 40, ("Women", BLACK): 70,
            ("Men", TWO): 30, ("Women", TWO): 45, ("Men", AIAN): 6, ("Women", AIAN): 9,
            ("Men", NHPI): 4, ("Women", NHPI): 5}
    all2 = {("Men", HISP): 302, ("Women", HISP): 370, ("Men", WHITE): 3100, ("Women", WHITE): 3600,
            ("Men", ASIAN): 900, ("Women", ASIAN): 1000, ("Men", BLACK): 420, ("Women", BLACK): 560,
            ("Men", TWO): 260, ("Women", TWO): 330, ("Men", AIAN): 30, ("Women", AIAN): 35,
            ("Men", NHPI): 12, ("Women", NHPI): 14}
    rows = []
    for inst, cs, al in (("INST1", cs1, all1), ("INST2", cs2, all2)):
        other = {c: al.get(c, 0) - cs.get(c, 0) for c in cells()}
        assert all(v >= 0 for v in other.values())
        rows += rows_from(inst, 2020, "11", cs)
        rows += rows_from(inst, 2020, "24", other)
        tot = sum(cs.values())
        h = cs[("Men", HISP)] + cs[("Women", HISP)]
        print(f"{inst}: CS total {tot}, Hispanic {100*h/tot:.3f}%, Hispanic women {100*cs[('Women', HISP)]/tot:.3f}%")
        ah = al[("Men", HISP)] + al[("Women", HISP)]
        print(f"  cohort Hispanic {100*h/ah:.3f}, women {100*cs[('Women', HISP)]/al[('Women', HISP)]:.3f}, "
              f"men {100*cs[('Men', HISP)]/al[('Men', HISP)]:.3f}")
    write_canonical("two_institutions.csv", rows)


# ---------------------------------------------------------------- national
# 2021 intersectional shares in percent: (CIP-11, all degrees).
NATIONAL_2021 = {
    ("Men", AIAN): (0.3, 0.3), ("Women", AIAN): (0.1, 0.5),
    ("Men", ASIAN): (10.0, 4.0), ("Women", ASIAN): (4.0, 5.0),
    ("Men", BLACK): (6.0, 4.0), ("Women", BLACK): (3.0, 7.0),
    ("Men", HISP): (8.0, 6.0), ("Women", HISP): (2.0, 9.0),
    ("Men", NHPI): (0.2, 0.1), ("Women", NHPI): (0.1, 0.2),
    ("Men", WHITE): (50.0, 26.0), ("Women", WHITE): (11.3, 31.9),
    ("Men", TWO): (3.0, 2.5), ("Women", TWO): (2.0, 3.5),
}


def national():
    cs21 = {c: round(v[0] * 1000) for c, v in NATIONAL_2021.items()}
    all21 = {c: round(v[1] * 20000) for c, v in NATIONAL_2021.items()}
    rows = []
    series = {}
    for year in range(2010, 2022):
        t = (year - 2010) / 11.0
        # All-degree population grows 1%/yr; Hispanic cohort grows faster.
        al = {}
        for (g, r), n in all21.items():
            growth = 1.01 ** (year - 2021)
            if r == HISP:
                growth *= 1.04 ** (year - 2021)
            al[(g, r)] = round(n * growth)
        cs = {}
        for c, n in cs21.items():
            base_rate = n / all21[c]
            g, r = c
            if c == ("Women", BLACK):
                rate = base_rate  # flat cohort share
            elif c == ("Men", BLACK):
                rate = base_rate * (0.55 + 0.45 * t)
            elif g == "Women":
                rate = base_rate * (0.70 + 0.30 * t)
            else:
                rate = base_rate * (0.60 + 0.40 * t)
            if year == 2020 and g == "Women" and c != ("Women", BLACK):
                rate *= 0.905
            cs[c] = round(al[c] * rate)
        math_ = {c: round(al[c] * (0.011 if c[0] == "Women" else 0.013)) for c in cells()}
        other = {c: al[c] - cs[c] - math_[c] for c in cells()}
        assert all(v >= 0 for v in other.values())
        rows += rows_from("US", year, "11", cs)
        rows += rows_from("US", year, "27", math_)
        rows += rows_from("US", year, "24", other)
        series[year] = (cs, al)
    write_canonical("national.csv", rows)
    cs, al = series[2020]
    women = sum(v for (g, _), v in cs.items() if g == "Women")
    print(f"national 2020 women share of CS: {100*women/sum(cs.values()):.3f}")
    cs, al = series[2021]
    for c in (("Men", HISP), ("Women", HISP)):
        p = 100 * cs[c] / sum(cs.values())
        u = 100 * al[c] / sum(al.values())
        print(f"national 2021 {c}: program {p:.3f} university {u:.3f} gap {p-u:+.3f}")
    for year in (2010, 2015, 2020):
        cs, al = series[year]
        bw = 100 * cs[("Women", BLACK)] / al[("Women", BLACK)]
        bm = 100 * cs[("Men", BLACK)] / al[("Men", BLACK)]
        print(f"national {year} cohort Black women {bw:.3f} Black men {bm:.3f}")


# ---------------------------------------------------------------- HSI
def hsi():
    cs = {("Men", HISP): 120, ("Women", HISP): 5, ("Men", ASIAN): 22, ("Women", ASIAN): 15,
          ("Men", WHITE): 12, ("Women", WHITE): 10, ("Men", BLACK): 4, ("Women", BLACK): 4,
          ("Men", TWO): 4, ("Women", TWO): 4}
    al = {("Men", HISP): 1530, ("Women", HISP): 2340, ("Men", ASIAN): 300, ("Women", ASIAN): 420,
          ("Men", WHITE): 420, ("Women", WHITE): 520, ("Men", BLACK): 120, ("Women", BLACK): 170,
          ("Men", TWO): 75, ("Women", TWO): 80, ("Men", AIAN): 10, ("Women", AIAN): 6,
          ("Men", NHPI): 5, ("Women", NHPI): 4}
    other = {c: al.get(c, 0) - cs.get(c, 0) for c in cells()}
    rows = rows_from("HSI-CA", 2021, "11", cs) + rows_from("HSI-CA", 2021, "52", other)
    write_canonical("hsi_2021.csv", rows)
    tw = sum(v for (g, _), v in al.items() if g == "Women")
    cw = sum(v for (g, _), v in cs.items() if g == "Women")
    print(f"HSI: all {sum(al.values())} women {100*tw/sum(al.values()):.2f}%, "
          f"CS {sum(cs.values())} women {100*cw/sum(cs.values()):.2f}%")


# ---------------------------------------------------------------- North Carolina
def solve_binary(target):
    """Women share w in (0, 0.5] such that H(w)/ln 2 = target."""
    lo, hi = 1e-9, 0.5
    for _ in range(200):
        mid = (lo + hi) / 2
        if entropy_p([mid, 1 - mid]) / math.log(2) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


RACE_SHAPE = [0.02, 0.30, 0.30, 0.18, 0.01, 0.0, 0.19]  # non-White mix, White handled separately


def race_shares(white):
    rest = 1 - white
    return [s * rest if i != 5 else white for i, s in enumerate(RACE_SHAPE)]


def solve_white(target):
    lo, hi = 0.0, 1.0  # higher white share -> lower evenness for the range we use
    for _ in range(200):
        mid = (lo + hi) / 2
        e = entropy_p(race_shares(mid)) / math.log(7)
        if e > target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def univ11_year(year, rng):
    t = (year - 2010) / 9.0
    g_target = 65.0 + (67.2 - 65.0) * t
    r_target = 36.5 + (67.3 - 36.5) * t
    n = 260 + 15 * (year - 2010)
    w = solve_binary(g_target / 100)
    shares = race_shares(solve_white(r_target / 100))
    table = {}
    for i, r in enumerate(RACES):
        table[("Women", r)] = max(0, round(n * shares[i] * w))
        table[("Men", r)] = max(0, round(n * shares[i] * (1 - w)))

    def err(tb):
        g = [sum(tb[(gg, r)] for r in RACES) for gg in GENDERS]
        rc = [tb[("Men", r)] + tb[("Women", r)] for r in RACES]
        return abs(evenness(g, 2) - g_target) + abs(evenness(rc, 7) - r_target)

    best = err(table)
    for _ in range(20000):
        if best < 0.004:
            break
        c = rng.choice(cells())
        d = rng.choice([-1, 1])
        if table[c] + d < 0:
            continue
        table[c] += d
        e = err(table)
        if e < best:
            best = e
        else:
            table[c] -= d
    return table


def north_carolina():
    rng = random.Random(11)
    rows = []
    # Univ-11 CIP-11 program series 2010-2019 plus an all-degree reference.
    for year in range(2010, 2020):
        cs = univ11_year(year, rng)
        al = {c: cs[c] * 12 + 40 + (7 * RACES.index(c[1]) + year) % 30 for c in cells()}
        other = {c: al[c] - cs[c] for c in cells()}
        rows += rows_from("Univ-11", year, "11", cs)
        rows += rows_from("Univ-11", year, "24", other)
        g = [sum(cs[(gg, r)] for r in RACES) for gg in GENDERS]
        rc = [cs[("Men", r)] + cs[("Women", r)] for r in RACES]
        print(f"Univ-11 {year}: gender E_H {evenness(g, 2):.3f} race E_H {evenness(rc, 7):.3f} "
              f"intersectional {evenness(list(cs.values()), 14):.3f}")

    # 2020 snapshot of all twelve institutions: (all-degree shares, CIP-11 shares, totals).
    def mk(black_w, black_m, white_w, white_m, hisp_w, hisp_m, asian_w, asian_m, two_w, two_m,
           aian_w=0.4, aian_m=0.3, nhpi_w=0.1, nhpi_m=0.1):
        return {("Women", BLACK): black_w, ("Men", BLACK): black_m, ("Women", WHITE): white_w,
                ("Men", WHITE): white_m, ("Women", HISP): hisp_w, ("Men", HISP): hisp_m,
                ("Women", ASIAN): asian_w, ("Men", ASIAN): asian_m, ("Women", TWO): two_w,
                ("Men", TWO): two_m, ("Women", AIAN): aian_w, ("Men", AIAN): aian_m,
                ("Women", NHPI): nhpi_w, ("Men", NHPI): nhpi_m}

    spec = {
        "Univ-1": (mk(8, 5, 34, 33, 4, 3, 2, 2, 3, 2), mk(2, 6, 10, 60, 1, 6, 1, 5, 2, 4), 3800, 120),
        "Univ-2": (mk(6, 4, 36, 30, 5, 4, 4, 4, 3, 2), mk(3, 6, 14, 44, 3, 6, 6, 10, 2, 4), 1500, 60),
        "Univ-3": (mk(5, 4, 30, 28, 5, 4, 8, 8, 3, 3), mk(4, 5, 12, 30, 3, 7, 12, 18, 3, 4), 4500, 300),
        "Univ-4": (mk(11, 7, 32, 27, 5, 4, 4, 3, 3, 2), mk(4, 14, 8, 40, 2, 9, 3, 10, 2, 5), 5000, 260),
        "Univ-5": (mk(62, 28.4, 0.6, 0.4, 2.2, 1.4, 0.3, 0.3, 2.2, 1.6, 0.3, 0.1, 0.1, 0.1),
                   mk(0, 58, 0, 6, 8, 16, 0, 4, 2, 6, 0, 0, 0, 0), 1100, 50),
        "Univ-6": (mk(58, 26, 3, 2, 2, 1.5, 0.5, 0.5, 2.5, 1.7), mk(15, 55, 1, 6, 2, 6, 1, 4, 3, 5), 2600, 140),
        "Univ-7": (mk(55, 28, 3, 3, 3, 1.9, 0.3, 0.3, 2.5, 1.8), mk(14, 50, 2, 8, 3, 8, 1, 3, 4, 5), 3200, 180),
        "Univ-8": (mk(5, 4, 32, 28, 5, 4, 7, 7, 3, 3), mk(3, 5, 10, 38, 3, 6, 10, 18, 2, 3), 7000, 420),
        "Univ-9": (mk(5, 3, 38, 34, 5, 4, 2, 2, 3, 2), mk(2, 4, 12, 58, 2, 6, 2, 6, 2, 4), 1200, 40),
        "Univ-10": (mk(6, 5, 32, 28, 6, 5, 5, 5, 3, 3), mk(3, 7, 10, 40, 3, 8, 8, 12, 3, 4), 6500, 380),
        "Univ-11": (mk(12, 8, 30, 26, 5, 4, 4, 3, 3, 3), mk(4, 10, 8, 38, 3, 8, 6, 12, 3, 6), 4000, 330),
        "Univ-12": (mk(10, 7, 30, 26, 6, 5, 4, 4, 3, 3), mk(3, 9, 9, 45, 3, 8, 4, 11, 2, 5), 4200, 200),
    }
    print("NC 2020 (all degrees): gender E_H / race E_H / intersectional E_H / JS distance")
    for inst, (all_s, cs_s, n_all, n_cs) in spec.items():
        def scale(s, n):
            z = sum(s.values())
            return {c: round(n * s.get(c, 0) / z) for c in cells()}
        cs = scale(cs_s, n_cs)
        al = scale(all_s, n_all)
        al = {c: max(al[c], cs[c] + (1 if cs[c] else 0)) for c in cells()}
        other = {c: al[c] - cs[c] for c in cells()}
        rows += rows_from(inst, 2020, "11", cs)
        rows += rows_from(inst, 2020, "24", other)
        vec_a = [al[c] for c in cells()]
        vec_c = [cs[c] for c in cells()]
        g = [sum(al[(gg, r)] for r in RACES) for gg in GENDERS]
        rc = [al[("Men", r)] + al[("Women", r)] for r in RACES]
        d = math.sqrt(max(0.0, jsd(norm(vec_c), norm(vec_a))))
        bw = 100 * al[("Women", BLACK)] / sum(vec_a)
        print(f"  {inst:8} {evenness(g, 2):6.2f} {evenness(rc, 7):6.2f} {evenness(vec_a, 14):6.2f} "
              f"{d:.4f}  black women {bw:.1f}% women {100*g[1]/sum(g):.1f}%")
    write_canonical("north_carolina.csv", rows)


# ---------------------------------------------------------------- raw IPEDS sample
RAW_RACE_CODES = [("AIAN", AIAN), ("ASIA", ASIAN), ("BKAA", BLACK), ("HISP", HISP),
                  ("NHPI", NHPI), ("WHIT", WHITE), ("2MOR", TWO), ("UNKN", None), ("NRAL", None)]


def raw_sample():
    rng = random.Random(2021)
    unitids = ["100654", "110635", "133951", "199120", "199193", "228778"]
    cips = ["11.0101", "11.0701", "11.1003", "27.0101", "52.0201", "26.0101", "24.0101"]
    header = ["UNITID", "CIPCODE", "MAJORNUM", "AWLEVEL", "XCTOTALT", "CTOTALT",
              "XCTOTALM", "CTOTALM", "XCTOTALW", "CTOTALW"]
    for code, _ in RAW_RACE_CODES:
        for suf in "TMW":
            header += [f"XC{code}{suf}", f"C{code}{suf}"]
    out = []
    for uid in unitids:
        for majornum in (1, 2):
            for awlevel in (3, 5, 7):
                grand = {}
                for cip in cips:
                    if majornum == 2 and rng.random() < 0.5:
                        continue
                    if awlevel != 5 and rng.random() < 0.4:
                        continue
                    scale = 1 if majornum == 2 else 6
                    counts = {}
                    for code, _ in RAW_RACE_CODES:
                        for g in "MW":
                            counts[code + g] = rng.randint(0, 12) * scale // (3 if awlevel != 5 else 1)
                    for k, v in counts.items():
                        grand[k] = grand.get(k, 0) + v
                    out.append(raw_row(uid, cip, majornum, awlevel, counts))
                if grand:
                    out.append(raw_row(uid, "99", majornum, awlevel, grand))
    with open(os.path.join(HERE, "ipeds_c2021_a_sample.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in out:
            w.writerow(r)
    kept = [r for r in out if r[2] == 1 and r[3] == 5 and r[1] != "99"]
    print(f"raw sample: {len(out)} rows, {len(kept)} first-major bachelor rows")


def raw_row(uid, cip, majornum, awlevel, counts):
    tm = sum(v for k, v in counts.items() if k.endswith("M"))
    tw = sum(v for k, v in counts.items() if k.endswith("W"))
    row = [uid, cip, majornum, awlevel, "R", tm + tw, "R", tm, "R", tw]
    for code, _ in RAW_RACE_CODES:
        m, w = counts[code + "M"], counts[code + "W"]
        row += ["R", m + w, "R", m, "R", w]
    return row


if __name__ == "__main__":
    two_institutions()
    national()
    hsi()
    north_carolina()
    raw_sample()
