#!/usr/bin/env python3
"""Extract UCR datasets bundled inside Python wheels into UCR text format.

Usage: extract_ucr.py <wheel-dir> <out-dir>

Writes <out-dir>/<Name>/<Name>_TRAIN and <Name>_TEST files, one series per
line: label followed by the values, comma separated.
"""
import io
import pathlib
import sys
import zipfile

SKTIME = ["GunPoint", "ItalyPowerDemand", "ArrowHead", "UnitTest", "OSULeaf"]
PYTS = ["Coffee"]


def write(out, name, split, rows):
    d = out / name
    d.mkdir(parents=True, exist_ok=True)
    with open(d / f"{name}_{split}", "w") as f:
        for label, values in rows:
            f.write(",".join([label] + values) + "\n")


def parse_ts(text):
    rows, in_data = [], False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("@data"):
            in_data = True
            continue
        if in_data:
            values, label = line.rsplit(":", 1)
            rows.append((label.strip(), [v.strip() for v in values.split(",")]))
    return rows


def fmt_label(v):
    f = float(v)
    return str(int(f)) if f.is_integer() else str(v)


def main():
    wheels, out = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    for whl in wheels.glob("*.whl"):
        z = zipfile.ZipFile(whl)
        names = set(z.namelist())
        if whl.name.startswith("sktime"):
            for ds in SKTIME:
                for split in ("TRAIN", "TEST"):
                    p = f"sktime/datasets/data/{ds}/{ds}_{split}.ts"
                    if p in names:
                        write(out, ds, split, parse_ts(z.read(p).decode()))
        elif whl.name.startswith("tslearn"):
            import numpy as np
            d = np.load(io.BytesIO(z.read("tslearn/.cached_datasets/Trace.npz")))
            for split in ("TRAIN", "TEST"):
                X, y = d[f"X_{split.lower()}"][:, :, 0], d[f"y_{split.lower()}"]
                rows = [(fmt_label(lab), [repr(float(v)) for v in x]) for x, lab in zip(X, y)]
                write(out, "Trace", split, rows)
        elif whl.name.startswith("pyts"):
            for ds in PYTS:
                for split in ("TRAIN", "TEST"):
                    cands = [n for n in names if n.endswith(f"{ds}_{split}.txt") or n.endswith(f"{ds}_{split}.tsv")]
                    for p in cands:
                        rows = []
                        for line in z.read(p).decode().splitlines():
                            parts = line.replace(",", " ").replace("\t", " ").split()
                            if parts:
                                rows.append((fmt_label(parts[0]), parts[1:]))
                        write(out, ds, split, rows)


if __name__ == "__main__":
    main()
