#!/usr/bin/env python3
"""Convert the public PPI release (GraphSAGE layout) into the dataset format.

Expected input directory (from https://snap.stanford.edu/graphsage/ppi.zip):
    ppi-G.json        node-link graph; nodes carry "id", "val", "test" flags
    ppi-feats.npy     N x 50 float features
    ppi-class_map.json  node id -> 121-dim 0/1 label list

Usage:
    python3 tools/convert_ppi.py <ppi_dir> <out_dir>

Writes edges.txt, features.csv, labels.csv, roles.csv, meta.json. Full-scale
runs on the result are opt-in (tens of minutes on CPU).
"""

import json
import os
import sys

import numpy as np


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    src, dst = sys.argv[1], sys.argv[2]

    with open(os.path.join(src, "ppi-G.json")) as f:
        g = json.load(f)
    feats = np.load(os.path.join(src, "ppi-feats.npy"))
    with open(os.path.join(src, "ppi-class_map.json")) as f:
        class_map = json.load(f)

    nodes = g["nodes"]
    n = len(nodes)
    if feats.shape[0] != n:
        raise SystemExit(f"feature rows {feats.shape[0]} != node count {n}")

    roles = ["train"] * n
    for node in nodes:
        i = node["id"]
        if node.get("test"):
            roles[i] = "test"
        elif node.get("val"):
            roles[i] = "val"

    os.makedirs(dst, exist_ok=True)

    with open(os.path.join(dst, "edges.txt"), "w") as f:
        seen = set()
        for link in g["links"]:
            u, v = link["source"], link["target"]
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            f.write(f"{key[0]} {key[1]}\n")

    np.savetxt(os.path.join(dst, "features.csv"), feats, delimiter=",", fmt="%.17g")

    labels = np.zeros((n, len(next(iter(class_map.values())))), dtype=int)
    for key, row in class_map.items():
        labels[int(key)] = row
    np.savetxt(os.path.join(dst, "labels.csv"), labels, delimiter=",", fmt="%d")

    with open(os.path.join(dst, "roles.csv"), "w") as f:
        f.write("\n".join(roles) + "\n")
    with open(os.path.join(dst, "meta.json"), "w") as f:
        f.write('{"task": "multilabel"}\n')

    print(f"wrote {dst}: {n} nodes, {len(seen)} edges, {labels.shape[1]} classes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
