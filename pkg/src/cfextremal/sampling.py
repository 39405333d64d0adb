"""Seeded random instances for the property suites and oracle comparisons."""

from __future__ import annotations

import math

import numpy as np

from .groups import Factor, GroupDescriptor, GroupElement, OmegaDescriptor
from .sequences import SupportZm


def random_admissible_support(rng: np.random.Generator, m: int) -> SupportZm:
    """Random symmetric subset of Z_m containing 0 and +-1."""
    residues = {0, 1 % m, (-1) % m}
    for k in range(2, m // 2 + 1):
        if rng.random() < 0.5:
            residues.add(k)
            residues.add((-k) % m)
    return SupportZm(m, frozenset(residues))


def random_finite_instance(rng: np.random.Generator, max_size: int = 1024):
    """Random (group, omega, z): product of cyclic factors, symmetric omega
    containing 0 and +-z.  Large groups come with dense omega so that both
    the reduction and the direct oracle stay at desk scale."""
    large = rng.random() < 0.08
    while True:
        if large:
            mods = [int(rng.integers(64, 513))]
            if rng.random() < 0.5:
                mods.append(int(rng.integers(2, 3)))
        else:
            d = int(rng.choice([1, 2, 3], p=[0.5, 0.35, 0.15]))
            mods = [int(rng.integers(2, 13)) for _ in range(d)]
        if math.prod(mods) <= max_size:
            break
    group = GroupDescriptor(tuple(Factor("cyclic", m) for m in mods))
    size = group.size
    while True:
        z = GroupElement(group, tuple(int(rng.integers(0, m)) for m in mods))
        if not z.is_zero:
            break
    density = rng.uniform(0.8, 0.95) if size > 96 else rng.uniform(0.25, 0.8)
    elems = {tuple(0 for _ in mods), z.coords, z.neg().coords}
    seen = set(elems)
    import itertools
    for e in itertools.product(*[range(m) for m in mods]):
        if e in seen:
            continue
        neg = tuple((-c) % m for c, m in zip(e, mods))
        seen.add(e)
        seen.add(neg)
        if rng.random() < density:
            elems.add(e)
            elems.add(neg)
    omega = OmegaDescriptor(group, explicit=frozenset(elems))
    return group, omega, z
