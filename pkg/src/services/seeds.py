import zlib

import numpy as np


def derive_seed(seed: int, stage: str) -> int:
    """Stable per-stage sub-seed of a run seed.

    :param seed: Run seed given on the command line.
    :type seed: int
    :param stage: Stage name, e.g. ``"split"`` or ``"impute"``.
    :type stage: str
    :return: A 32-bit seed that depends only on ``seed`` and ``stage``.
    :rtype: int
    """
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(stage.encode("utf-8"))])
    return int(sequence.generate_state(1)[0])


def child_generators(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators for ``count`` parallel streams of one seed."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]
