from __future__ import annotations

import json
import random

from tdmono.generators import DualGraph, _line
from tdmono.model import DegenerationModel, Flags, serialize_model

SEED = 20261016


def random_multigraphs(count: int = 20, seed: int = SEED) -> list[DualGraph]:
    """Connected loop-free multigraphs with at most 6 vertices and 10 edges."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 6)
        # random spanning tree first, so the graph is connected
        edges = [(rng.randint(1, v - 1), v) for v in range(2, n + 1)]
        extra = rng.randint(0, 10 - len(edges))
        for _ in range(extra):
            u, v = rng.sample(range(1, n + 1), 2)
            edges.append((u, v))
        rng.shuffle(edges)
        out.append(DualGraph.from_edges(edges, n))
    return out


def single_line() -> DegenerationModel:
    return DegenerationModel("p1", 1, 1, {(1,): _line()}, {}, {}, Flags())


def model_json(m: DegenerationModel) -> dict:
    return json.loads(serialize_model(m))


def dump(obj: dict) -> str:
    return json.dumps(obj)
