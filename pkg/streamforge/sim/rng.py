# SPDX-FileCopyrightText: © 2025 DSLab - Fondazione Bruno Kessler
#
# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np


def stream_key(seed: int, stream_id: str) -> int:
    """
    128 bit Philox key derived from the run seed and a stream id.

    Parameters
    ----------
    seed : int
        Run seed.
    stream_id : str
        Component or link identifier.

    Returns
    -------
    int
        Key in [0, 2**128).
    """
    digest = hashlib.sha256(f"{seed}/{stream_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


class RandomSource:
    """
    Counter based random stream owned by one component.

    Draws only depend on (seed, stream id, draw index), so the order in
    which other components draw never changes this stream.
    """

    def __init__(self, seed: int, stream_id: str) -> None:
        self.seed = seed
        self.stream_id = stream_id
        self.draws = 0
        self._generator = np.random.Generator(np.random.Philox(key=stream_key(seed, stream_id)))

    def random(self) -> float:
        """
        Uniform draw in [0, 1).
        """
        self.draws += 1
        return float(self._generator.random())

    def bernoulli(self, probability: float) -> bool:
        """
        True with the given probability. Consumes exactly one draw.
        """
        return self.random() < probability

    def weighted_choice(self, names: Sequence[str], weights: Sequence[float]) -> str:
        """
        Pick a name with probability proportional to its weight.

        Parameters
        ----------
        names : Sequence[str]
            Candidates, in a fixed order.
        weights : Sequence[float]
            Positive weights.

        Returns
        -------
        str
            Chosen name.
        """
        total = float(sum(weights))
        point = self.random() * total
        acc = 0.0
        for name, weight in zip(names, weights):
            acc += weight
            if point < acc:
                return name
        return names[-1]


class RandomStreams:
    """
    Registry of the random sources of a run.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._streams: dict[str, RandomSource] = {}

    def stream(self, stream_id: str) -> RandomSource:
        if stream_id not in self._streams:
            self._streams[stream_id] = RandomSource(self.seed, stream_id)
        return self._streams[stream_id]
