"""Deterministic random-stream derivation.

All randomized paths in the package draw from counter-based generators keyed
by an explicit integer seed.  Substreams are derived with
``SeedSequence(master_seed, spawn_key=key)`` so that any (grid point, trial)
pair owns an independent stream whose output is a pure function of the seed
and the key — never of scheduling, worker count, or call order elsewhere.
"""

from __future__ import annotations

from numpy.random import Generator, Philox, SeedSequence

from .errors import ParameterError


def check_seed(seed: int) -> int:
    """Validate a user-supplied master seed (non-negative integer)."""
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ParameterError(f"seed must be a non-negative integer, got {seed!r}")
    return seed


def substream(master_seed: int, *key: int) -> Generator:
    """Return the counter-based generator for ``key`` under ``master_seed``.

    Equal (seed, key) pairs always yield identical streams; distinct keys
    yield statistically independent ones.
    """
    check_seed(master_seed)
    return Generator(Philox(SeedSequence(master_seed, spawn_key=key)))


def sample_without_replacement(n: int, k: int, rng: Generator) -> list[int]:
    """Draw ``k`` distinct indices from ``range(n)``, uniformly, in draw order.

    Partial Fisher-Yates on an index table using only integer draws from
    ``rng``, so results are identical across platforms and numpy builds.
    """
    if not 0 <= k <= n:
        raise ParameterError(f"cannot draw {k} distinct items from {n}")
    table: dict[int, int] = {}
    out = []
    for i in range(k):
        j = int(rng.integers(i, n))
        vi = table.get(i, i)
        vj = table.get(j, j)
        out.append(vj)
        table[j] = vi
    return out


def shuffled(items: list, rng: Generator) -> list:
    """Uniform permutation of ``items`` using only integer draws from ``rng``."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out
