"""Generate data/dow30_sample_prices.csv.

Synthetic daily closing prices for the thirty Dow Jones Industrial Average
tickers. Daily changes follow a tree cascade whose edges mostly stay inside
an industry group, with heavy-tailed errors, so the fitted tree and the
k-cluster split have visible industry structure. Deterministic for a fixed
seed.
"""

import argparse
import csv
import pathlib

import numpy as np

SECTORS = {
    "tech": ["AAPL", "MSFT", "CSCO", "IBM", "INTC", "CRM"],
    "finance": ["JPM", "GS", "AXP", "V", "TRV"],
    "health": ["JNJ", "MRK", "UNH", "AMGN", "WBA"],
    "consumer": ["KO", "PG", "MCD", "WMT", "HD", "NKE", "DIS"],
    "industrial": ["BA", "CAT", "HON", "MMM", "DOW", "CVX", "VZ"],
}


def build_tree(rng):
    # Each sector is a chain/star around its first ticker; sector hubs attach to other hubs.
    parent = {}
    hubs = []
    for names in SECTORS.values():
        hub = names[0]
        hubs.append(hub)
        for idx, name in enumerate(names[1:], start=1):
            parent[name] = names[rng.integers(0, idx)]
    for hub in hubs[1:]:
        parent[hub] = hubs[0] if rng.random() < 0.5 else hubs[rng.integers(0, len(hubs))]
        if parent[hub] == hub:
            parent[hub] = hubs[0]
    return parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "dow30_sample_prices.csv"))
    ap.add_argument("--days", type=int, default=1260)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    tickers = [t for names in SECTORS.values() for t in names]
    parent = build_tree(rng)
    root = SECTORS["tech"][0]

    order = [root]
    while len(order) < len(tickers):
        for t in tickers:
            if t not in order and parent.get(t) in order:
                order.append(t)

    hubs = {names[0] for names in SECTORS.values()}
    coeff = {t: rng.uniform(0.25, 0.4) if t in hubs else rng.uniform(0.55, 0.9) for t in parent}
    n = args.days - 1
    changes = {}
    for t in order:
        # Student-t(5) errors scaled to unit variance overall.
        err = rng.standard_t(5, size=n) / np.sqrt(5.0 / 3.0)
        if t == root:
            changes[t] = err
        else:
            a = coeff[t]
            changes[t] = a * changes[parent[t]] + np.sqrt(1.0 - a * a) * err

    start = {t: rng.uniform(40.0, 400.0) for t in tickers}
    vol = {t: rng.uniform(0.006, 0.014) for t in tickers}
    prices = {}
    for t in tickers:
        path = start[t] + np.concatenate([[0.0], np.cumsum(changes[t] * vol[t] * start[t])])
        prices[t] = np.round(np.maximum(path, 1.0), 2)

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(tickers)
        for day in range(args.days):
            w.writerow([f"{prices[t][day]:.2f}" for t in tickers])


if __name__ == "__main__":
    main()
