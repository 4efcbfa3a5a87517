#!/usr/bin/env python3
"""Convert the KEEL copies of ionosphere, german and pima (diabetes) shipped in
the keel-ds wheel into LibSVM text files.

    pip download --no-deps keel-ds -d /tmp/keel
    python3 tools/make_fixtures.py /tmp/keel/keel_ds-*.whl tests/fixtures

Minority class is written as +1. German's categorical attributes are one-hot
encoded in order of first appearance per column; numeric attributes are kept.
"""
import sys
import zipfile
from pathlib import Path


def rows(wheel, name):
    with zipfile.ZipFile(wheel) as z:
        text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("@"):
            yield [tok.strip() for tok in line.split(",")]


def fmt(v):
    return repr(float(v)) if "." in v or "e" in v.lower() else str(int(v))


def write(path, records):
    with open(path, "w") as out:
        for label, feats in records:
            pairs = " ".join(f"{i}:{v}" for i, v in feats)
            out.write(f"{label} {pairs}\n")


def numeric(wheel, name, positive):
    recs = []
    for r in rows(wheel, name):
        feats = [(i + 1, fmt(v)) for i, v in enumerate(r[:-1]) if float(v) != 0.0]
        recs.append(("+1" if r[-1] == positive else "-1", feats))
    return recs


def german(wheel):
    data = list(rows(wheel, "german"))
    ncol = len(data[0]) - 1
    categorical = [not data[0][c].lstrip("-").replace(".", "").isdigit() for c in range(ncol)]
    levels = [dict() for _ in range(ncol)]
    for r in data:
        for c in range(ncol):
            if categorical[c]:
                levels[c].setdefault(r[c], len(levels[c]))
    offset, base = 1, []
    for c in range(ncol):
        base.append(offset)
        offset += len(levels[c]) if categorical[c] else 1
    recs = []
    for r in data:
        feats = []
        for c in range(ncol):
            if categorical[c]:
                feats.append((base[c] + levels[c][r[c]], "1"))
            elif float(r[c]) != 0.0:
                feats.append((base[c], fmt(r[c])))
        recs.append(("+1" if r[-1] == "2" else "-1", feats))
    return recs


def main():
    wheel, outdir = sys.argv[1], Path(sys.argv[2])
    outdir.mkdir(parents=True, exist_ok=True)
    write(outdir / "ionosphere.libsvm", numeric(wheel, "ionosphere", "b"))
    write(outdir / "diabetes.libsvm", numeric(wheel, "pima", "tested_positive"))
    write(outdir / "german.libsvm", german(wheel))


if __name__ == "__main__":
    main()
