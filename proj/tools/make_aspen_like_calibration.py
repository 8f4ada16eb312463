#!/usr/bin/env python3
"""Generate data/aspen_m1_like.json.

Builds a two-row octagon lattice (2 chips x 5 octagons x 8 qubits) with
Aspen-style qubit ids, drops a fixed set of couplers, and searches seeded
fidelity draws until the greedy / matching pair counts hit the targets:
97 usable couplers, greedy 33 pairs, 26 of them at >= 0.90, matching 39.
The result is a constructed stand-in, not measured device data.
"""
import json
import random
import sys

import networkx as nx

TARGET_GREEDY = 33
TARGET_CAPPED = 26
TARGET_MATCHING = 39
CAP = 0.90


def lattice():
    qubits, edges = [], set()
    for chip in (0, 100):
        for k in range(5):
            base = chip + 10 * k
            qubits += [base + j for j in range(8)]
            for j in range(8):
                a, b = base + j, base + (j + 1) % 8
                edges.add((min(a, b), max(a, b)))
            if k < 4:
                nxt = base + 10
                edges.add((base + 1, nxt + 6))
                edges.add((base + 2, nxt + 5))
    for k in range(5):
        edges.add((10 * k + 7, 100 + 10 * k + 4))
        edges.add((10 * k + 0, 100 + 10 * k + 3))
    return sorted(qubits), sorted(edges)


# Dead couplers. Both ring couplers of qubit 33 are gone, which strands it and
# caps any matching at 39 pairs.
REMOVED = {(32, 33), (33, 34), (1, 16), (44, 45), (104, 105), (112, 113),
           (126, 127), (20, 123), (141, 142)}


def greedy(edges, fid, cap=None):
    order = sorted(edges, key=lambda e: (-fid[e], e[0], e[1]))
    used, out = set(), []
    for e in order:
        if cap is not None and fid[e] < cap:
            break
        if e[0] in used or e[1] in used:
            continue
        used.update(e)
        out.append(e)
    return out


def draw(rng, edges):
    fid = {}
    for e in edges:
        u = rng.random()
        if u < 0.55:
            f = rng.uniform(0.90, 0.99)
        elif u < 0.85:
            f = rng.uniform(0.80, 0.90)
        else:
            f = rng.uniform(0.60, 0.80)
        fid[e] = round(f, 4)
    return fid


def write_compact(doc, out):
    out.write("{\n")
    out.write(' "name": %s,\n' % json.dumps(doc["name"]))
    out.write(' "comment": %s,\n' % json.dumps(doc["comment"]))
    out.write(' "qubits": %s,\n' % json.dumps(doc["qubits"]))
    out.write(' "edges": [\n')
    out.write(",\n".join("  " + json.dumps(e) for e in doc["edges"]))
    out.write("\n ],\n")
    out.write(' "readout": {\n')
    out.write(",\n".join("  %s: %s" % (json.dumps(k), json.dumps(v))
                          for k, v in doc["readout"].items()))
    out.write("\n }\n}\n")


def main():
    qubits, all_edges = lattice()
    assert len(all_edges) == 106
    edges = [e for e in all_edges if e not in REMOVED]
    assert len(edges) == 97
    for seed in range(100000):
        rng = random.Random(seed)
        fid = draw(rng, edges)
        if len(set(fid.values())) != len(fid):
            continue
        g = greedy(edges, fid)
        if len(g) != TARGET_GREEDY:
            continue
        if len(greedy(edges, fid, CAP)) != TARGET_CAPPED:
            continue
        G = nx.Graph()
        for e in edges:
            G.add_edge(*e, weight=fid[e])
        m = nx.max_weight_matching(G)
        if len(m) != TARGET_MATCHING:
            continue
        readout = {}
        for q in qubits:
            readout[str(q)] = [round(rng.uniform(0.01, 0.04), 4),
                               round(rng.uniform(0.02, 0.07), 4)]
        doc = {
            "name": "aspen_m1_like",
            "comment": ("Constructed 80-qubit octagon-lattice calibration. Not measured "
                        "data: couplers and fidelities were chosen so that 97 couplers "
                        "are usable, greedy selection yields 33 pairs (26 at >= 0.90) "
                        "and maximum-weight matching yields 39 pairs. Generated by "
                        "tools/make_aspen_like_calibration.py with search seed %d." % seed),
            "qubits": qubits,
            "edges": [[a, b, fid[(a, b)]] for a, b in edges],
            "readout": readout,
        }
        write_compact(doc, sys.stdout)
        print("seed", seed, file=sys.stderr)
        return
    sys.exit("no seed found")


if __name__ == "__main__":
    main()
