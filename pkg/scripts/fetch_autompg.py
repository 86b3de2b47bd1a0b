#!/usr/bin/env python3
"""Download and prepare the UCI Auto MPG dataset.

Writes data/autompg.csv with columns mpg (target), cylinders, displacement,
horsepower, weight, acceleration, model_year, origin.  Rows with missing
horsepower ('?') are dropped, leaving 392 rows.

Requires network access to archive.ics.uci.edu.
"""

import csv
import os
import sys
import urllib.request

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/auto-mpg/auto-mpg.data"
HEADER = ["mpg", "cylinders", "displacement", "horsepower", "weight",
          "acceleration", "model_year", "origin"]


def main(out_path="data/autompg.csv"):
    print(f"fetching {URL}")
    raw = urllib.request.urlopen(URL, timeout=60).read().decode("utf-8")
    rows = []
    for line in raw.splitlines():
        if not line.strip():
            continue
        # whitespace-separated numerics followed by a quoted car name
        numeric = line.split('"')[0].split()
        if len(numeric) != 8:
            continue
        if "?" in numeric:
            continue
        rows.append([float(v) for v in numeric])
    if len(rows) != 392:
        print(f"warning: expected 392 complete rows, got {len(rows)}", file=sys.stderr)
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    print(f"wrote {out_path} ({len(rows)} rows)")


if __name__ == "__main__":
    main(*sys.argv[1:])
