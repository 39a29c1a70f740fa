from dataclasses import dataclass
from collections import Counter
from typing import Iterator, Tuple

import numpy as np

from ..core.exceptions import BadParams

UINT64 = 2 ** 64
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Seed:
    """
    Reproducible randomness handle.

    (master, stream) determines every draw. Child streams come from a
    counter: derive(c) maps stream s to (s * 0x9E3779B97F4A7C15 + c + 1) mod 2**64,
    so trial t of a run uses Seed(master, 0).derive(t).
    """
    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value < UINT64:
                raise BadParams(f"seed {name} must be a 64-bit unsigned integer, got {value!r}")

    def derive(self, counter: int) -> "Seed":
        return Seed(self.master, (self.stream * _GOLDEN + counter + 1) % UINT64)

    def rng(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(int(self.master), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True)
class Sample:
    """Ordered multiset of domain points; provenance names the split it came from"""
    points: Tuple = ()
    provenance: str = "S"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator:
        return iter(self.points)

    def __getitem__(self, index):
        return self.points[index]

    def shuffled(self, seed: Seed) -> "Sample":
        order = seed.rng().permutation(len(self.points))
        return Sample(tuple(self.points[k] for k in order), f"{self.provenance}~shuffled")

    def split(self, *sizes: int, names: Tuple[str, ...] = ()) -> Tuple["Sample", ...]:
        """Cut consecutive pieces of the given sizes; the remainder is dropped"""
        if any(size < 0 for size in sizes) or sum(sizes) > len(self.points):
            raise BadParams(f"cannot split a sample of size {len(self.points)} into {sizes}")
        names = names or tuple(f"S{k + 1}" for k in range(len(sizes)))
        pieces = []
        start = 0
        for name, size in zip(names, sizes):
            pieces.append(Sample(self.points[start:start + size], name))
            start += size
        return tuple(pieces)

    def counts(self) -> Counter:
        return Counter(self.points)
