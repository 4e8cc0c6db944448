"""Detection rules for SCW codebooks observed through Poisson counts.

For a codeword ``s`` with per-level observation sums ``W[l] = sum of r[k]
over positions where s[k] = eta_l``, the coherent ML metric is

    metric(s) = -weight(s) * c_s + sum_{l>=1} W[l] * log(1 + eta_l * c_s/c_n)

which drops all codeword-independent terms of the Poisson log-likelihood.
The full log-likelihood (constants included) is kept alongside as
:func:`exact_log_likelihood` so optimality tests never share code with the
detectors they check.

The CSI-free rule sorts the observation ascending and assigns the lowest
level to the smallest counts, the next level to the next block, and so on.
For full SCW codebooks this reproduces the coherent ML decision for every
CSI pair, which is what makes the codes attractive: detection needs neither
``c_s`` nor ``c_n``.

Tie convention, everywhere: with a generator the choice is uniform over the
set of metric-maximizing codewords; without one the lexicographically
smallest maximizer is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.random import Generator

from .channel import CsiPair, CsiPrior, as_counts
from .codes import Codebook, Codeword, SymbolSet, WeightVector
from .errors import CodebookError, CsiError, DimensionError, ParameterError


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of a codebook detection."""

    codeword: Codeword
    tie_count: int
    out_of_book: bool = False
    metric: float | None = None
    tie_indices: tuple[int, ...] | None = None


def _multinomial(parts: Sequence[int]) -> int:
    total = math.factorial(int(sum(parts)))
    for p in parts:
        total //= math.factorial(int(p))
    return total


def _sorted_assignment(
    obs: np.ndarray, counts: Sequence[int], tie_rng: Generator | None
) -> tuple[np.ndarray, int]:
    """Core CSI-free rule on a validated observation.

    Returns (level indices, number of codewords attaining the ML metric).
    Equal observation values that straddle a level boundary are permuted
    uniformly when ``tie_rng`` is given; the stable sort order (ascending
    original index) otherwise, which yields the lexicographically smallest
    maximizer.
    """
    k = len(obs)
    order = np.argsort(obs, kind="stable")
    vals = obs[order]
    ends = np.cumsum(counts)
    interior = [int(c) for c in ends[:-1] if 0 < c < k]
    tie_count = 1
    if any(vals[c - 1] == vals[c] for c in interior):
        # decompose into runs of equal values; only runs crossing a level
        # boundary admit more than one ML assignment
        change = np.flatnonzero(np.diff(vals)) + 1
        edges = [0, *change.tolist(), k]
        for a, b in zip(edges[:-1], edges[1:]):
            cuts = [c for c in interior if a < c < b]
            if not cuts:
                continue
            parts = np.diff([a, *cuts, b])
            tie_count *= _multinomial(parts)
            if tie_rng is not None:
                tie_rng.shuffle(order[a:b])
    out = np.empty(k, dtype=np.int64)
    start = 0
    for level, end in enumerate(ends):
        out[order[start:end]] = level
        start = end
    return out, tie_count


def csi_free_detect(
    weights: WeightVector,
    symbol_set: SymbolSet,
    observation: Sequence[int],
    tie_rng: Generator | None = None,
) -> Codeword:
    """Sorted-assignment detection; O(K log K), needs no channel state."""
    if weights.n_levels != symbol_set.n_levels:
        raise DimensionError(
            f"{weights.n_levels} weights for {symbol_set.n_levels} levels"
        )
    obs = as_counts(observation)
    if len(obs) != weights.length:
        raise DimensionError(
            f"observation length {len(obs)} != codeword length {weights.length}"
        )
    indices, _ = _sorted_assignment(obs, weights.counts, tie_rng)
    return Codeword(tuple(int(i) for i in indices), symbol_set)


def _level_gains(symbol_set: SymbolSet, csi: CsiPair) -> list[float]:
    """log(1 + eta_l * c_s / c_n) per level; requires c_n > 0."""
    if csi.c_n == 0:
        raise CsiError(
            "coherent metric needs c_n > 0; with zero noise the "
            "signal-to-interference ratio is unbounded"
        )
    ratio = csi.c_s / csi.c_n
    return [math.log1p(float(v) * ratio) for v in symbol_set.levels]


def coherent_metric(
    codeword: Codeword, observation: Sequence[int], csi: CsiPair
) -> float:
    """Codeword-dependent part of the Poisson log-likelihood."""
    obs = as_counts(observation)
    if len(obs) != codeword.length:
        raise DimensionError(
            f"observation length {len(obs)} != codeword length {codeword.length}"
        )
    gains = _level_gains(codeword.symbol_set, csi)
    sums = np.bincount(
        np.asarray(codeword.indices), weights=obs,
        minlength=codeword.symbol_set.n_levels,
    )
    total = -float(codeword.weight) * csi.c_s
    for level in range(1, len(gains)):
        total += sums[level] * gains[level]
    return float(total)


def exact_log_likelihood(
    codeword: Codeword, observation: Sequence[int], csi: CsiPair
) -> float:
    """Full Poisson log-likelihood, constants included.

    Kept deliberately simple (plain per-position sum) so it can serve as an
    independent reference for the fast metric implementations.
    """
    obs = as_counts(observation)
    if len(obs) != codeword.length:
        raise DimensionError(
            f"observation length {len(obs)} != codeword length {codeword.length}"
        )
    total = 0.0
    for r, s in zip(obs.tolist(), codeword.as_floats().tolist()):
        mean = s * csi.c_s + csi.c_n
        if mean == 0.0:
            if r:
                return float("-inf")
            continue
        total += r * math.log(mean) - mean - math.lgamma(r + 1.0)
    return total


def _level_sums_matrix(codebook: Codebook, obs: np.ndarray) -> np.ndarray:
    """(M, L) per-level observation sums for every codeword, exact integers."""
    indices = codebook.index_matrix()
    n_levels = codebook.symbol_set.n_levels
    out = np.empty((codebook.size, n_levels), dtype=np.int64)
    for level in range(n_levels):
        out[:, level] = (indices == level) @ obs
    return out


def _pick_from_ties(
    codebook: Codebook, tie_positions: np.ndarray, tie_rng: Generator | None
) -> int:
    if len(tie_positions) == 1 or tie_rng is None:
        # stored order is lexicographic for enumerated books, but make the
        # deterministic choice explicit for arbitrary books
        return int(min(
            tie_positions.tolist(),
            key=lambda i: codebook.codewords[i].indices,
        ))
    return int(tie_positions[int(tie_rng.integers(0, len(tie_positions)))])


def _validated_obs(codebook: Codebook, observation: Sequence[int]) -> np.ndarray:
    obs = as_counts(observation)
    if len(obs) != codebook.length:
        raise DimensionError(
            f"observation length {len(obs)} != codeword length {codebook.length}"
        )
    return obs


def coherent_ml_detect(
    codebook: Codebook,
    observation: Sequence[int],
    csi: CsiPair,
    tie_rng: Generator | None = None,
) -> DetectionResult:
    """Exhaustive ML detection with known CSI."""
    obs = _validated_obs(codebook, observation)
    gains = np.array(_level_gains(codebook.symbol_set, csi))
    sums = _level_sums_matrix(codebook, obs)
    weight = float(codebook.codewords[0].weight)  # SCW: common to all
    metrics = sums[:, 1:].astype(np.float64) @ gains[1:] - weight * csi.c_s
    best = metrics.max()
    ties = np.flatnonzero(metrics == best)
    pos = _pick_from_ties(codebook, ties, tie_rng)
    return DetectionResult(
        codeword=codebook.codewords[pos],
        tie_count=len(ties),
        out_of_book=False,
        metric=float(metrics[pos]),
        tie_indices=tuple(int(i) for i in ties),
    )


def noncoherent_ml_detect(
    codebook: Codebook,
    observation: Sequence[int],
    prior: CsiPrior,
    tie_rng: Generator | None = None,
) -> DetectionResult:
    """ML detection with CSI known only through a finite prior.

    Maximizes the log marginal likelihood ``log sum_a w_a L(r | s, csi_a)``
    via a log-sum-exp over prior atoms.
    """
    obs = _validated_obs(codebook, observation)
    for atom in prior.atoms:
        if atom.c_n == 0:
            raise CsiError("non-coherent detection needs c_n > 0 in every atom")
    sums = _level_sums_matrix(codebook, obs).astype(np.float64)
    levels = codebook.symbol_set.as_floats()
    k = codebook.length
    # weight is common across the codebook, so the mean total is a scalar
    weight = float(codebook.codewords[0].weight)
    lgamma_term = float(sum(math.lgamma(r + 1.0) for r in obs.tolist()))
    stacked = np.empty((len(prior.atoms), codebook.size))
    for a, (atom, w) in enumerate(zip(prior.atoms, prior.weights)):
        log_means = np.log(levels * atom.c_s + atom.c_n)
        stacked[a] = (
            math.log(w)
            + sums @ log_means
            - (weight * atom.c_s + k * atom.c_n)
            - lgamma_term
        )
    peak = stacked.max(axis=0)
    metrics = peak + np.log(np.exp(stacked - peak).sum(axis=0))
    best = metrics.max()
    ties = np.flatnonzero(metrics == best)
    pos = _pick_from_ties(codebook, ties, tie_rng)
    return DetectionResult(
        codeword=codebook.codewords[pos],
        tie_count=len(ties),
        out_of_book=False,
        metric=float(metrics[pos]),
        tie_indices=tuple(int(i) for i in ties),
    )


def binary_cw_detect(
    codebook: Codebook,
    observation: Sequence[int],
    tie_rng: Generator | None = None,
) -> DetectionResult:
    """Correlation detection for binary constant-weight codebooks.

    ``argmax_s sum_k s[k] r[k]`` — CSI-free and ML for binary codes, full or
    partial.  Metrics are integers, so ties are exact.
    """
    if not codebook.is_binary:
        raise CodebookError("correlation detection requires a binary codebook")
    obs = _validated_obs(codebook, observation)
    metrics = codebook.index_matrix().astype(np.int64) @ obs
    best = metrics.max()
    ties = np.flatnonzero(metrics == best)
    pos = _pick_from_ties(codebook, ties, tie_rng)
    return DetectionResult(
        codeword=codebook.codewords[pos],
        tie_count=len(ties),
        out_of_book=False,
        metric=float(metrics[pos]),
        tie_indices=tuple(int(i) for i in ties),
    )


def detect_partial_scw(
    codebook: Codebook,
    observation: Sequence[int],
    mode: str,
    csi: CsiPair | None = None,
    tie_rng: Generator | None = None,
) -> DetectionResult:
    """Detection for partial SCW codebooks.

    ``declare_error``: run the CSI-free sorted assignment over the parent
    full code and flag ``out_of_book`` when the winner is not in the book.
    ``restricted_ml``: coherent ML restricted to the book; requires CSI.
    """
    if mode == "declare_error":
        obs = _validated_obs(codebook, observation)
        indices, tie_count = _sorted_assignment(
            obs, codebook.weights.counts, tie_rng
        )
        cw = Codeword(tuple(int(i) for i in indices), codebook.symbol_set)
        return DetectionResult(
            codeword=cw,
            tie_count=tie_count,
            out_of_book=cw not in codebook,
            metric=None,
            tie_indices=None,
        )
    if mode == "restricted_ml":
        if csi is None:
            raise CsiError("restricted_ml detection requires a CSI pair")
        return coherent_ml_detect(codebook, observation, csi, tie_rng)
    raise ParameterError(
        f"mode must be 'declare_error' or 'restricted_ml', got {mode!r}"
    )
