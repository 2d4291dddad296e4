"""Shared fixtures-in-code: the worked toy instance and random generators."""

from __future__ import annotations

import random

from privquant import JointRange, Quantization, Symbol
from privquant.quantize import CodewordPolicy

# Joint range shared by the example-based tests: 6 sensitive values, 7 public ones.
TOY_PAIRS = [
    ("s1", "x1"),
    ("s1", "x2"),
    ("s2", "x1"),
    ("s3", "x3"),
    ("s3", "x4"),
    ("s4", "x5"),
    ("s5", "x6"),
    ("s6", "x7"),
]

TOY_VALUES = {"x1": 0.2, "x2": 0.1, "x3": 0.4, "x4": 0.3, "x5": 0.6, "x6": 1.5, "x7": 1.0}
TOY_VALUES_X7_4 = {**TOY_VALUES, "x7": 4.0}


def make_toy(values=None) -> JointRange:
    return JointRange.from_id_pairs(TOY_PAIRS, values)


def id_clusters(jr: JointRange, q: Quantization) -> set[frozenset[str]]:
    """Order-free view of a quantization, by symbol ids."""
    return {frozenset(jr.x_ids(c)) for c in q.clusters}


def clusters_by_id(jr: JointRange, *groups: tuple[str, ...]) -> list[set[int]]:
    """Index clusters from id tuples, e.g. clusters_by_id(jr, ("x1","x2"), ...)."""
    index = {sym.id: i for i, sym in enumerate(jr.x_symbols)}
    return [{index[i] for i in group} for group in groups]


def random_joint_range(
    rng: random.Random, max_s: int = 8, max_x: int = 9, with_values: bool = True
) -> JointRange:
    """Random joint range with both marginals covered, sized for brute force."""
    n_s = rng.randint(1, max_s)
    n_x = rng.randint(1, max_x)
    pairs = set()
    for x in range(n_x):
        pairs.add((rng.randrange(n_s), x))
    covered = {s for s, _ in pairs}
    for s in range(n_s):
        if s not in covered:
            pairs.add((s, rng.randrange(n_x)))
    for _ in range(rng.randint(0, (n_s * n_x) // 3)):
        pairs.add((rng.randrange(n_s), rng.randrange(n_x)))
    values = None
    if with_values:
        values = [round(rng.uniform(0.0, 10.0), 3) for _ in range(n_x)]
    s_syms = [Symbol(f"s{i}") for i in range(n_s)]
    x_syms = [Symbol(f"x{i}", values[i] if values else None) for i in range(n_x)]
    return JointRange(s_syms, x_syms, pairs)


def random_partition(rng: random.Random, n: int) -> list[set[int]]:
    """Uniform-ish random partition of {0..n-1} (random labels, normalized)."""
    labels = [rng.randrange(n) for _ in range(n)]
    blocks: dict[int, set[int]] = {}
    for x, lab in enumerate(labels):
        blocks.setdefault(lab, set()).add(x)
    return list(blocks.values())


def random_quantization(
    rng: random.Random, jr: JointRange, policy: CodewordPolicy = CodewordPolicy.CENTROID
) -> Quantization:
    return Quantization.from_clusters(jr, random_partition(rng, jr.n_x), policy)
