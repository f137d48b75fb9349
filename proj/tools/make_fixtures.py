#!/usr/bin/env python3
"""Regenerate the fixture snapshots under fixtures/.

The build sandbox had no route to the public data sources, so each fixture is
a deterministic synthetic stand-in shaped after the public series it replaces
(same entities, time span, sampling rate and rough magnitude). The manifest
marks every file as synthetic and records the source it imitates.

Usage: python3 tools/make_fixtures.py [--out fixtures]
"""

import argparse
import datetime as dt
import json
from pathlib import Path

import numpy as np

SEED = 20220217
COUNTRIES = [
    "United States", "India", "Brazil", "Russia", "United Kingdom",
    "France", "Spain", "Italy", "Turkey", "Germany",
]
# EPA state codes 1 through 10; codes 3 and 7 are unassigned.
CO_STATES = ["Alabama", "Alaska", "Arizona", "Arkansas", "California",
             "Colorado", "Connecticut", "Delaware"]


def daily(start, n):
    d0 = dt.date.fromisoformat(start)
    return [(d0 + dt.timedelta(days=i)).isoformat() for i in range(n)]


def monthly(year, month, n):
    out = []
    for i in range(n):
        y, m = divmod(month - 1 + i, 12)
        out.append(f"{year + y:04d}-{m + 1:02d}")
    return out


def interp_anchors(n, anchors):
    """Piecewise-linear curve through (index, level) anchors."""
    xs, ys = zip(*anchors)
    return np.interp(np.arange(n), xs, ys)


def write_csv(path, rows):
    with open(path, "w", newline="\n") as f:
        f.write("date,entity,value\n")
        for date, entity, value in rows:
            name = f'"{entity}"' if "," in entity else entity
            f.write(f"{date},{name},{value}\n")


# --- COVID19 daily new cases, 2020-01-22 .. 2021-01-06 (351 days) ---------

WEEKDAY = np.array([0.80, 1.02, 1.08, 1.10, 1.10, 0.95, 0.75])  # Mon..Sun


def covid_us(rng, dates):
    n = len(dates)
    day = {d: i for i, d in enumerate(dates)}
    # log(1 + cases) anchors following the U.S. curve's turning points.
    anchors = [
        (day["2020-02-29"], 0.0),
        (day["2020-03-15"], np.log1p(700)),
        (day["2020-04-08"], np.log1p(32000)),
        (day["2020-06-08"], np.log1p(19500)),
        (day["2020-07-20"], np.log1p(67000)),
        (day["2020-09-12"], np.log1p(34000)),
        (day["2020-11-30"], np.log1p(165000)),
        (day["2021-01-06"], np.log1p(235000)),
    ]
    level = interp_anchors(n, anchors)
    out = np.zeros(n)
    start = day["2020-02-29"]
    # Sporadic imported cases before community spread.
    sporadic = rng.random(start) < 0.12
    out[:start] = sporadic.astype(float)
    for i in range(start, n):
        wd = dt.date.fromisoformat(dates[i]).weekday()
        x = np.expm1(level[i]) * WEEKDAY[wd] * np.exp(rng.normal(0.0, 0.08))
        out[i] = max(0.0, round(x))
    return out


def covid_generic(rng, dates, peak_scale):
    """Sum of two or three epidemic waves in log space."""
    n = len(dates)
    t = np.arange(n)
    onset = rng.integers(35, 70)
    waves = np.zeros(n)
    centers = sorted(rng.choice(np.arange(onset + 20, n - 10), size=rng.integers(2, 4), replace=False))
    for c in centers:
        width = rng.uniform(18, 45)
        height = peak_scale * rng.uniform(0.25, 1.0)
        waves += height * np.exp(-0.5 * ((t - c) / width) ** 2)
    waves[:onset] = 0.0
    out = np.zeros(n)
    for i in range(n):
        wd = dt.date.fromisoformat(dates[i]).weekday()
        x = waves[i] * WEEKDAY[wd] * np.exp(rng.normal(0.0, 0.1))
        out[i] = max(0.0, round(x))
    out[:onset] = (rng.random(onset) < 0.05).astype(float)
    return out


def make_covid(rng):
    dates = daily("2020-01-22", 351)
    scales = [0, 90000, 50000, 28000, 45000, 50000, 25000, 30000, 30000, 30000]
    rows = []
    for country, scale in zip(COUNTRIES, scales):
        values = covid_us(rng, dates) if country == "United States" else covid_generic(rng, dates, scale)
        rows += [(d, country, int(v)) for d, v in zip(dates, values)]
    return rows


# --- DOTS merchandise exports, monthly, millions USD (254 months) ----------

def make_exports(rng):
    dates = monthly(2000, 1, 254)
    base = [65000, 3500, 4500, 8000, 23000, 26000, 10000, 20000, 2300, 47000]
    growth = [0.0025, 0.011, 0.0065, 0.008, 0.002, 0.0015, 0.003, 0.002, 0.009, 0.004]
    rows = []
    for country, b, g in zip(COUNTRIES, base, growth):
        t = np.arange(254)
        level = np.log(b) + g * t
        # Trade collapse in 2009 and the 2020 pandemic shock.
        level -= 0.30 * np.exp(-0.5 * ((t - 110) / 5.0) ** 2)
        level -= 0.25 * np.exp(-0.5 * ((t - 244) / 2.0) ** 2)
        season = 0.04 * np.sin(2 * np.pi * (t % 12) / 12.0 + rng.uniform(0, 2 * np.pi))
        noise = np.cumsum(rng.normal(0, 0.012, 254)) + rng.normal(0, 0.03, 254)
        values = np.exp(level + season + noise)
        rows += [(d, country, f"{v:.2f}") for d, v in zip(dates, values)]
    return rows


# --- U.S. CO pollution, daily mean ppm (4722 days) --------------------------

def make_co(rng):
    dates = daily("2000-01-01", 4722)
    rows = []
    t = np.arange(4722)
    for state in CO_STATES:
        start = rng.uniform(0.45, 0.9)
        decline = rng.uniform(0.35, 0.6)  # fraction lost over the span
        trend = start * (1.0 - decline * t / 4722)
        doy = np.array([dt.date.fromisoformat(d).timetuple().tm_yday for d in dates])
        season = 1.0 + 0.35 * np.cos(2 * np.pi * (doy - 15) / 365.25)
        noise = np.exp(rng.normal(0, 0.28, 4722))
        values = np.maximum(0.005, trend * season * noise)
        rows += [(d, state, f"{v:.4f}") for d, v in zip(dates, values)]
    return rows


# --- World population, yearly (22 years) ------------------------------------

def make_population(rng):
    years = [f"{y}" for y in range(2000, 2022)]
    # (population in 2000, 2021) in millions, plus optional turning year.
    spec = {
        "United States": (282.2, 332.0, None),
        "India": (1056.6, 1393.4, None),
        "Brazil": (174.8, 213.9, None),
        "Russia": (146.6, 145.9, (2009, 142.8)),
        "United Kingdom": (58.9, 67.3, None),
        "France": (60.9, 65.4, None),
        "Spain": (40.6, 47.3, (2012, 46.8)),
        "Italy": (56.9, 59.1, (2014, 60.8)),
        "Turkey": (64.1, 84.8, None),
        "Germany": (81.6, 83.2, (2011, 80.3)),
    }
    rows = []
    for country in COUNTRIES:
        a, b, turn = spec[country]
        xs = np.arange(22)
        if turn is None:
            curve = a * (b / a) ** (xs / 21.0)
        else:
            ty, tv = turn
            curve = np.interp(xs, [0, ty - 2000, 21], [a, tv, b])
        values = curve * 1e6 * (1.0 + rng.normal(0, 0.0008, 22))
        rows += [(y, country, int(round(v))) for y, v in zip(years, values)]
    return rows


# --- Average land temperature, monthly from 1750 (3166 months) --------------

def make_temperature(rng):
    dates = monthly(1750, 1, 3166)
    # (annual mean, seasonal half-amplitude) in degrees Celsius.
    climate = {
        "United States": (8.5, 11.5), "India": (23.8, 4.5), "Brazil": (24.8, 1.2),
        "Russia": (-5.6, 18.5), "United Kingdom": (8.6, 5.2), "France": (10.6, 7.2),
        "Spain": (13.4, 7.5), "Italy": (12.2, 8.0), "Turkey": (11.0, 10.0),
        "Germany": (8.2, 8.5),
    }
    rows = []
    t = np.arange(3166)
    for country in COUNTRIES:
        mean, amp = climate[country]
        warming = 1.3 * np.clip((t - 1560) / (3166 - 1560), 0, None) ** 2
        season = -amp * np.cos(2 * np.pi * (t % 12) / 12.0)
        # Early records are noisier.
        sd = np.where(t < 1200, 1.4, 0.7)
        values = mean + season + warming + rng.normal(0, 1, 3166) * sd
        rows += [(d, country, f"{v:.3f}") for d, v in zip(dates, values)]
    return rows


DATASETS = [
    {
        "name": "covid19", "file": "covid19.csv", "maker": make_covid,
        "measure": "daily new cases", "unit": "cases", "n_regimes": 3,
        "source": "https://ourworldindata.org/ (owid-covid-data, new_cases)",
        "entities": COUNTRIES,
    },
    {
        "name": "dots_exports", "file": "dots_exports.csv", "maker": make_exports,
        "measure": "merchandise exports", "unit": "million USD", "n_regimes": 3,
        "source": "https://data.imf.org/ (Direction of Trade Statistics)",
        "entities": COUNTRIES,
    },
    {
        "name": "co_pollution", "file": "co_pollution.csv", "maker": make_co,
        "measure": "CO concentration", "unit": "ppm", "n_regimes": 3,
        "source": "https://data.world/data-society/ (U.S. pollution 2000-2016)",
        "entities": CO_STATES,
    },
    {
        "name": "world_population", "file": "world_population.csv", "maker": make_population,
        "measure": "population", "unit": "", "n_regimes": 2,
        "source": "https://ourworldindata.org/ (population)",
        "entities": COUNTRIES,
    },
    {
        "name": "global_temperature", "file": "global_temperature.csv", "maker": make_temperature,
        "measure": "average land temperature", "unit": "degrees Celsius", "n_regimes": 3,
        "source": "https://ourworldindata.org/ (Berkeley Earth land temperature by country)",
        "entities": COUNTRIES,
    },
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema_version": "t3.fixtures/1",
        "generator": "tools/make_fixtures.py",
        "seed": SEED,
        "note": "Synthetic stand-ins: the public sources were unreachable when the snapshots were built. "
                "Published benchmark values are not expected to reproduce on these files.",
        "datasets": [],
    }
    for i, ds in enumerate(DATASETS):
        rng = np.random.default_rng(SEED + i)
        rows = ds["maker"](rng)
        write_csv(out / ds["file"], rows)
        manifest["datasets"].append({
            "name": ds["name"],
            "file": ds["file"],
            "time_col": "date",
            "value_col": "value",
            "entity_col": "entity",
            "measure": ds["measure"],
            "unit": ds["unit"],
            "entities": ds["entities"],
            "n_regimes": ds["n_regimes"],
            "rows": len(rows),
            "source_url": ds["source"],
            "retrieved": "not retrieved",
            "synthetic": True,
        })
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
