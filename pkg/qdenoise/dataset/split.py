"""
Deterministic, stratified index splitting.
"""
from __future__ import annotations

import math
from collections import defaultdict
from typing import Dict, Hashable, List, Sequence, Tuple

from ..quantum.rng import make_rng


def stratified_split(keys: Sequence[Hashable], fraction: float, seed: int) -> Tuple[List[int], List[int]]:
    """
    Splits ``range(len(keys))`` into (kept, held_out) with ``fraction`` of every
    stratum held out.

    The total held-out count is ``round(n * fraction)``; per-stratum counts are
    floors of their exact share, the remainder going to the strata with the
    largest fractional parts (ties broken by a seeded order). Both sides are
    returned sorted.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"Split fraction must lie in (0, 1), got {fraction}.")
    n = len(keys)
    n_held = int(math.floor(n * fraction + 0.5))
    if n_held == 0 or n_held == n:
        raise ValueError(f"A fraction of {fraction} on {n} samples leaves one side empty.")

    rng = make_rng(seed)
    strata: Dict[Hashable, List[int]] = defaultdict(list)
    for i, key in enumerate(keys):
        strata[key].append(i)
    order = list(strata)
    tie_break = {key: float(r) for key, r in zip(order, rng.random(len(order)))}

    quota = {key: int(math.floor(len(members) * fraction)) for key, members in strata.items()}
    remainder = n_held - sum(quota.values())
    by_share = sorted(
        order,
        key=lambda key: (-(len(strata[key]) * fraction - quota[key]), tie_break[key]),
    )
    for key in by_share[:remainder]:
        quota[key] += 1

    held: List[int] = []
    for key in order:
        members = list(strata[key])
        rng.shuffle(members)
        held.extend(members[: quota[key]])
    held_set = set(held)
    kept = [i for i in range(n) if i not in held_set]
    return kept, sorted(held)


def split_train_test(dataset, test_fraction: float, split_seed: int) -> Tuple[List[int], List[int]]:
    """Train/test split stratified per (kind, level) cell."""
    return stratified_split([r.cell for r in dataset.records], test_fraction, split_seed)
