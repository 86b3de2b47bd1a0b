#!/usr/bin/env python3
"""Download and prepare the UCI Heart Disease (Cleveland) dataset.

Writes data/heart.csv with 13 features plus a binary target (presence of
disease: num > 0).  Rows with missing values ('?') are dropped, leaving 297
of the 303 rows.

Requires network access to archive.ics.uci.edu.
"""

import csv
import os
import sys
import urllib.request

URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
       "heart-disease/processed.cleveland.data")
HEADER = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach",
          "exang", "oldpeak", "slope", "ca", "thal", "target"]


def main(out_path="data/heart.csv"):
    print(f"fetching {URL}")
    raw = urllib.request.urlopen(URL, timeout=60).read().decode("utf-8")
    rows = []
    for line in raw.splitlines():
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 14 or "?" in cells:
            continue
        values = [float(v) for v in cells]
        values[-1] = 1.0 if values[-1] > 0 else 0.0
        rows.append(values)
    if len(rows) != 297:
        print(f"warning: expected 297 complete rows, got {len(rows)}", file=sys.stderr)
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    print(f"wrote {out_path} ({len(rows)} rows)")


if __name__ == "__main__":
    main(*sys.argv[1:])
