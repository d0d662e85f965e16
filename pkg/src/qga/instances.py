"""Synthetic assembly instances: random generation and a replay format.

The dump format is line-oriented text:

    n 3
    m 2
    V 0 10 11
    E 0 40 41
    W <set1> <v1> <set2> <v2> <j> <weight> <best_p> <dir>

with one W line per (vertex pair, edge set) combination.
"""

from __future__ import annotations

import numpy as np

from .assembler import CandidateSets, build_condensed_graph, table_cost_source
from .errors import ParseError


def random_instance(rng: np.random.Generator, n: int, m: int, k: int, exact_sizes: bool = False):
    """Draw candidate sets with fresh ids and uniform [0,1) pair weights.

    Returns (CandidateSets, weight table dict).  ``exact_sizes`` makes every
    set carry exactly k candidates instead of 1..k.
    """
    if n < 2 and m >= 1:
        raise ValueError("need n >= 2 when m >= 1")
    next_id = 0

    def fresh(count):
        nonlocal next_id
        ids = tuple(range(next_id, next_id + count))
        next_id += count
        return ids

    def size():
        return k if exact_sizes else int(rng.integers(1, k + 1))

    vertex_sets = [fresh(size()) for _ in range(n)]
    edge_sets = [fresh(size()) for _ in range(m)]
    sets = CandidateSets(
        vertex_sets,
        edge_sets,
        vertex_terms=[None] * n,
        edge_terms=[None] * m,
    )
    weights: dict = {}
    for i1 in range(n):
        for i2 in range(i1 + 1, n):
            for v1 in vertex_sets[i1]:
                for v2 in vertex_sets[i2]:
                    for j, preds in enumerate(edge_sets):
                        w = float(rng.random())
                        best_p = preds[int(rng.integers(0, len(preds)))]
                        direction = int(rng.integers(0, 2))
                        weights[(i1, v1, i2, v2, j)] = (w, best_p, direction)
    return sets, weights


def build_random_graph(rng, n, m, k, exact_sizes=False):
    sets, weights = random_instance(rng, n, m, k, exact_sizes=exact_sizes)
    return build_condensed_graph(sets, table_cost_source(weights))


def dump_instance(sets: CandidateSets, weights: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {sets.n}\n")
        fh.write(f"m {sets.m}\n")
        for i, vs in enumerate(sets.vertex_sets):
            fh.write("V " + " ".join([str(i)] + [str(v) for v in vs]) + "\n")
        for j, es in enumerate(sets.edge_sets):
            fh.write("E " + " ".join([str(j)] + [str(p) for p in es]) + "\n")
        for (i1, v1, i2, v2, j), (w, best_p, direction) in sorted(weights.items()):
            fh.write(f"W {i1} {v1} {i2} {v2} {j} {w!r} {best_p} {direction}\n")


def load_instance(path):
    """Inverse of dump_instance; returns (CandidateSets, weight table)."""
    n = m = None
    vertex_sets: dict[int, tuple[int, ...]] = {}
    edge_sets: dict[int, tuple[int, ...]] = {}
    weights: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            tag = fields[0]
            try:
                if tag == "n":
                    n = int(fields[1])
                elif tag == "m":
                    m = int(fields[1])
                elif tag == "V":
                    vertex_sets[int(fields[1])] = tuple(int(x) for x in fields[2:])
                elif tag == "E":
                    edge_sets[int(fields[1])] = tuple(int(x) for x in fields[2:])
                elif tag == "W":
                    i1, v1, i2, v2, j = (int(x) for x in fields[1:6])
                    w = float(fields[6])
                    best_p = int(fields[7])
                    direction = int(fields[8])
                    weights[(i1, v1, i2, v2, j)] = (w, best_p, direction)
                else:
                    raise ValueError(f"unknown tag {tag!r}")
            except (IndexError, ValueError) as exc:
                raise ParseError(path, line_no, str(exc))
    if n is None or m is None:
        raise ParseError(path, 0, "missing n/m header")
    if sorted(vertex_sets) != list(range(n)) or sorted(edge_sets) != list(range(m)):
        raise ParseError(path, 0, "vertex/edge set indices do not match n/m")
    sets = CandidateSets(
        [vertex_sets[i] for i in range(n)],
        [edge_sets[j] for j in range(m)],
        vertex_terms=[None] * n,
        edge_terms=[None] * m,
    )
    missing = [
        (i1, v1, i2, v2, j)
        for i1 in range(n)
        for i2 in range(i1 + 1, n)
        for v1 in sets.vertex_sets[i1]
        for v2 in sets.vertex_sets[i2]
        for j in range(m)
        if (i1, v1, i2, v2, j) not in weights
    ]
    if missing:
        raise ParseError(path, 0, f"weight table incomplete, e.g. missing {missing[0]}")
    return sets, weights
