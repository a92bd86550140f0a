"""Deterministic seeded sampling of period matrices, points and characteristics.

Every draw is a pure function of (seed, stream, genus, index) via numpy's
SeedSequence, so the same arguments give bit-identical output in any order
and on any thread.
"""

from __future__ import annotations

import os
import zlib
from fractions import Fraction

import numpy as np

from .characteristics import RationalVector
from .theta import PeriodMatrix

DEFAULT_SEED = 7
SEED_ENV = "THETAFORGE_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def rng_for(seed: int, stream: str, genus: int, index: int) -> np.random.Generator:
    tag = zlib.crc32(stream.encode())
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, tag, genus, index])
    return np.random.default_rng(ss)


def sample_tau(genus: int, seed: int, index: int) -> PeriodMatrix:
    """Re tau symmetric with entries in [-0.5, 0.5]; Im tau = y0 I + W W^t with
    y0 in [0.5, 1.5] and W entries in [-0.3, 0.3], so lambda_min(Im tau) >= 0.5."""
    rng = rng_for(seed, "tau", genus, index)
    x = np.zeros((genus, genus))
    iu = np.triu_indices(genus)
    x[iu] = rng.uniform(-0.5, 0.5, size=len(iu[0]))
    x = np.triu(x) + np.triu(x, 1).T
    y0 = rng.uniform(0.5, 1.5)
    w = rng.uniform(-0.3, 0.3, size=(genus, genus))
    y = y0 * np.eye(genus) + w @ w.T
    y = 0.5 * (y + y.T)
    return PeriodMatrix(x + 1j * y)


def sample_point(rng: np.random.Generator, genus: int, box: float = 0.5) -> np.ndarray:
    return rng.uniform(-box, box, genus) + 1j * rng.uniform(-box, box, genus)


def sample_char(rng: np.random.Generator, genus: int, denominator: int) -> RationalVector:
    return RationalVector(Fraction(int(k), denominator) for k in rng.integers(0, denominator, genus))


def sample_half(rng: np.random.Generator, genus: int) -> RationalVector:
    return sample_char(rng, genus, 2)
