#!/usr/bin/env python3
# Copyright 2026 The Greenloop Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the uncalibrated scenario fixtures.

Battery fixtures still need `greenloop calibrate` afterwards; see README.
"""

import argparse
import json
import math
import random
from pathlib import Path

BATTERIES = 1000
TOTAL_INPUT_KG = 15000.0
BINS = 50


def battery_materials(rng):
    raw = [rng.uniform(10.0, 20.0) for _ in range(BATTERIES)]
    scale = TOTAL_INPUT_KG / sum(raw)
    mats = []
    for i, m in enumerate(raw):
        mats.append({
            "id": f"battery-{i + 1:04d}",
            "category": "battery-cell",
            "mass_kg": round(m * scale, 6),
            "composition": {
                "cobalt": round(rng.uniform(0.03, 0.08), 4),
                "nickel": round(rng.uniform(0.08, 0.18), 4),
                "lithium": round(rng.uniform(0.015, 0.025), 4),
            },
            "lifecycle_stage": "collected",
        })
    # Mass rounding above can leave the total a hair off 15 t.
    drift = TOTAL_INPUT_KG - sum(m["mass_kg"] for m in mats)
    mats[-1]["mass_kg"] = round(mats[-1]["mass_kg"] + drift, 6)
    return mats


def stations_block(stations):
    processes, factors, limits_use = [], [], {}
    for st in stations:
        processes.append({
            "id": st["id"],
            "unit_cost": st["unit_cost"],
            "energy_per_unit": st["energy_kwh_per_kg"],
            "emission_factor_id": "ef-" + st["id"],
        })
        factors.append({"id": "ef-" + st["id"], "process_id": st["id"], "e": st["e"], "stage": st["stage"]})
        limits_use[st["id"]] = st["hours_per_batch"]
    facility = {
        "throughput_kg_per_step": 500.0,
        "composition_jitter": 0.01,
        "stations": [{
            "id": st["id"],
            "recovery_efficiency": st["eff"],
            "energy_kwh_per_kg": st["energy_kwh_per_kg"],
            "loss_fraction": st["loss"],
        } for st in stations],
    }
    limits = [
        {"resource_id": "line_hours", "availability": 2000.0, "consumption": limits_use},
        {"resource_id": "input_batches", "availability": 40.0,
         "consumption": {st["id"]: 1.0 for st in stations}},
    ]
    return processes, factors, limits, facility


BATTERY_EXPECTATIONS = {
    "recovery.cobalt": {"form": "points", "value": 17},
    "recovery.nickel": {"form": "points", "value": 20},
    "recovery.lithium": {"form": "points", "value": 16},
    "recovery.mean": {"form": "points", "value": 18},
    "process_energy_kwh": {"form": "relative", "value": -25},
    "co2_kg": {"form": "relative", "value": -28},
}


def battery(mode, seed):
    rng = random.Random(seed)
    if mode == "baseline":
        stations = [
            {"id": "manual_dismantle", "eff": {"other": 0.3}, "loss": 0.01, "energy_kwh_per_kg": 0.2, "e": 0.4,
             "stage": "processing", "unit_cost": -40.0, "hours_per_batch": 10.0},
            {"id": "shred", "eff": {}, "loss": 0.03, "energy_kwh_per_kg": 0.3, "e": 0.6,
             "stage": "processing", "unit_cost": -25.0, "hours_per_batch": 6.0},
            {"id": "pyro_smelt", "eff": {"cobalt": 0.7, "nickel": 0.7, "lithium": 0.7}, "loss": 0.05,
             "energy_kwh_per_kg": 1.0, "e": 1.2, "stage": "recovery", "unit_cost": -90.0,
             "hours_per_batch": 20.0},
        ]
        targets = {"recovery": {"cobalt": 0.68, "nickel": 0.70, "lithium": 0.72},
                   "process_energy_kwh": 20000.0, "co2_kg": 30000.0}
        costs = {"preprocess": [0.5, 1.0], "simulate": [40.0, 8.0], "optimize": [0.2, 0.1],
                 "route": [0.0, 0.0], "carbon": [0.1, 0.1], "metrics": [0.05, 0.01]}
    else:
        stations = [
            {"id": "vision_sort", "eff": {"other": 0.35}, "loss": 0.005, "energy_kwh_per_kg": 0.1, "e": 0.3,
             "stage": "processing", "unit_cost": -35.0, "hours_per_batch": 4.0},
            {"id": "shred", "eff": {}, "loss": 0.01, "energy_kwh_per_kg": 0.3, "e": 0.6,
             "stage": "processing", "unit_cost": -25.0, "hours_per_batch": 6.0},
            {"id": "hydromet_leach", "eff": {"cobalt": 0.8, "nickel": 0.8, "lithium": 0.8, "other": 0.2}, "loss": 0.01,
             "energy_kwh_per_kg": 0.8, "e": 0.9, "stage": "recovery", "unit_cost": -120.0,
             "hours_per_batch": 18.0},
            {"id": "direct_regen", "eff": {"cobalt": 0.3, "nickel": 0.3, "lithium": 0.3}, "loss": 0.01,
             "energy_kwh_per_kg": 0.4, "e": 0.5, "stage": "recovery", "unit_cost": -60.0,
             "hours_per_batch": 8.0},
        ]
        targets = {"recovery": {"cobalt": 0.85, "nickel": 0.90, "lithium": 0.88},
                   "process_energy_kwh": 15000.0, "co2_kg": 22000.0}
        costs = {"preprocess": [2.0, 4.0], "simulate": [40.0, 8.0], "optimize": [3.0, 0.5],
                 "route": [0.0, 0.0], "carbon": [0.1, 0.1], "metrics": [0.05, 0.01]}
    processes, factors, limits, facility = stations_block(stations)
    return {
        "name": f"battery_{mode}",
        "family": "battery",
        "notes": "1,000 end-of-life lithium-ion batteries, 15 t total; facility parameters fitted by greenloop calibrate.",
        "rng_seed": 42,
        "materials": battery_materials(rng),
        "processes": processes,
        "limits": limits,
        "emission_factors": factors,
        "integrality": [p["id"] for p in processes],
        "facility": facility,
        "classifier": {},
        "energy": {
            "alpha": 0.00005,
            "beta": 0.00001,
            "stage_costs": {k: {"compute_seconds": v[0], "transferred_mb": v[1]} for k, v in costs.items()},
        },
        "expectations": BATTERY_EXPECTATIONS,
        "calibration": targets,
    }


# Five waste streams. Item weight separates them only partly (means about
# two standard deviations apart); each non-plastic stream also has one sensor
# channel of its own shifted by `signature` standard deviations.
WASTE_CATEGORIES = [
    ("plastic", 0.30, None),
    ("metal", 0.15, 1),
    ("glass", 0.15, 2),
    ("organic", 0.25, 3),
    ("other", 0.15, 4),
]


def waste_categories(signature, weight_gap):
    base = [0.0, 0.2, 0.3, 0.4, 0.5, 1.0]
    sd = [0.15, 0.1, 0.1, 0.1, 0.1, 0.3]
    out = []
    for k, (label, share, channel) in enumerate(WASTE_CATEGORIES):
        mean = list(base)
        mean[0] = 0.30 + weight_gap * k
        if channel is not None:
            mean[channel] += signature * sd[channel]
        out.append({"label": label, "share": share, "mean": [round(v, 6) for v in mean], "stddev": sd})
    return out


def waste_graph(seed, id_noise):
    rng = random.Random(seed)
    pts = []
    for _ in range(BINS):
        r = 5.0 * math.sqrt(rng.random())
        a = rng.uniform(0.0, 2.0 * math.pi)
        pts.append((r * math.cos(a), r * math.sin(a)))
    # Bin ids follow the order a crew would number them walking around the
    # city, with `id_noise` radians of slop.
    keyed = sorted(pts, key=lambda p: math.atan2(p[1], p[0]) + rng.gauss(0.0, id_noise))
    coords = {0: (0.0, 0.0)}
    for i, p in enumerate(keyed):
        coords[i + 1] = p
    nodes = [{"id": 0, "fill_level": 0.0, "is_depot": True}]
    nodes += [{"id": i, "fill_level": round(rng.uniform(0.1, 0.5), 4), "is_depot": False}
              for i in range(1, BINS + 1)]
    edges = []
    for a in range(BINS + 1):
        for b in range(a + 1, BINS + 1):
            d = 1.3 * math.dist(coords[a], coords[b])
            edges.append({"from": a, "to": b, "distance_km": round(d, 4),
                          "emission_rate_kg_per_km": round(rng.uniform(1.0, 1.3), 4)})
    return {"service_threshold": 0.0, "nodes": nodes, "edges": edges}


WASTE_EXPECTATIONS = {
    "classification_accuracy": {"form": "relative", "value": 20},
    "transport_emissions": {"form": "points", "value": -30},
}


def waste(mode, id_noise, signature, weight_gap):
    costs = {"preprocess": [1.0, 2.0], "simulate": [0.0, 0.0], "optimize": [0.0, 0.0],
             "route": [0.5, 0.2], "carbon": [0.05, 0.01], "metrics": [0.05, 0.01]}
    if mode == "framework":
        costs["preprocess"] = [30.0, 2.0]
        costs["route"] = [25.0, 0.2]
    return {
        "name": f"waste_{mode}",
        "family": "waste",
        "notes": "50 smart bins around a central depot, five waste streams.",
        "rng_seed": 7,
        "collection_graph": waste_graph(2024, id_noise),
        "sensors": {
            "horizon": 600,
            "deposit_probability": 0.1,
            "fill_increment": [0.0, 0.02],
            "train_fraction": 0.7,
            "categories": waste_categories(signature, weight_gap),
        },
        "routing": {"max_district_bins": 10, "rng_seed": 11, "episodes": 50000},
        "classifier": {"learning_rate": 1.0, "epochs": 5000, "l2_penalty": 0.0001, "rng_seed": 5},
        "energy": {
            "alpha": 0.00005,
            "beta": 0.00001,
            "stage_costs": {k: {"compute_seconds": v[0], "transferred_mb": v[1]} for k, v in costs.items()},
        },
        "expectations": WASTE_EXPECTATIONS,
        "feedback": {"horizon": 300, "extra_episodes": 1000},
    }


def alloc_small():
    return {
        "name": "alloc_small",
        "family": "generic",
        "rng_seed": 1,
        "processes": [
            {"id": "p1", "unit_cost": -3.0, "emission_factor_id": "ef1"},
            {"id": "p2", "unit_cost": -2.0, "emission_factor_id": "ef2"},
            {"id": "p3", "unit_cost": -4.0, "emission_factor_id": "ef3"},
        ],
        "limits": [
            {"resource_id": "labour", "availability": 10.0, "consumption": {"p1": 2.0, "p2": 1.0, "p3": 3.0}},
            {"resource_id": "energy", "availability": 12.0, "consumption": {"p1": 1.0, "p2": 3.0, "p3": 2.0}},
        ],
        "emission_factors": [
            {"id": "ef1", "process_id": "p1", "e": 1.0, "stage": "processing"},
            {"id": "ef2", "process_id": "p2", "e": 0.5, "stage": "processing"},
            {"id": "ef3", "process_id": "p3", "e": 2.0, "stage": "recovery"},
        ],
        "integrality": ["p1", "p2", "p3"],
    }


TABLE3 = {
    "title": "Traditional methods, AI-driven frameworks and this framework",
    "columns": ["Metric", "Traditional", "AI-Driven (literature values)", "Proposed"],
    "rows": [
        {"label": "Energy intensity (GJ/tonne)", "traditional": "5.5", "ai_driven": "4.0", "proposed": "3.6",
         "measured": "energy_intensity"},
        {"label": "Material recovery (%)", "traditional": "60", "ai_driven": "80", "proposed": "88",
         "measured": "recovery"},
        {"label": "CO2 reduction (%)", "traditional": "—", "ai_driven": "25", "proposed": "28",
         "measured": "co2_reduction"},
    ],
    "notes": [
        "Traditional, AI-Driven and Proposed columns are published figures; AI-Driven describes third-party "
        "systems not implemented here.",
        "Measured comes from the latest framework run in the output directory (energy intensity = facility "
        "kWh x 0.0036 / input tonnes; recovery = mean element recovery; CO2 reduction against the latest "
        "baseline run of the same family).",
    ],
}


def write(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    ap.add_argument("--id-noise", type=float, default=0.2)
    ap.add_argument("--weight-gap", type=float, default=0.32)
    ap.add_argument("--signature", type=float, default=1.7)
    ap.add_argument("--only", choices=["battery", "waste", "other"], default=None)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.only in (None, "battery"):
        for mode in ("baseline", "framework"):
            write(args.out_dir / f"battery_{mode}.json", battery(mode, 1000))
    if args.only in (None, "waste"):
        for mode in ("baseline", "framework"):
            write(args.out_dir / f"waste_{mode}.json", waste(mode, args.id_noise, args.signature, args.weight_gap))
    if args.only in (None, "other"):
        write(args.out_dir / "alloc_small.json", alloc_small())
        write(args.out_dir / "table3.json", TABLE3)


if __name__ == "__main__":
    main()
