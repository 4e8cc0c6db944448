"""Strongly constant-weight (SCW) codebooks over CSK symbol sets.

A symbol set is an ascending list of L rational release fractions starting at
0 and ending at 1.  An SCW codebook of length K pins the *per-level* symbol
counts of every codeword: codeword ``s`` belongs iff, for every level ``l``,
``#{k : s[k] = eta_l} == weights[l]``.  Binary constant-weight codes are the
L = 2 special case.

Counting and rate identities used throughout:

    M(full)   = K! / prod_l weights[l]!
    code rate = log_L(M) / K      (symbols per channel use)
    info rate = log_2(M) / K      (bits per channel use) = log2(L) * code rate

Codeword symbols are ``fractions.Fraction`` end to end; floats appear only
when a caller asks for them (value matrices, distances, rates).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    CodebookError,
    DimensionError,
    EnumerationCapError,
    ParameterError,
)
from .streams import check_seed, sample_without_replacement, substream

#: default ceiling for exhaustive enumeration
ENUMERATION_CAP = 10_000_000

RationalLike = Fraction | int | str


def as_fraction(value: RationalLike | float) -> Fraction:
    """Coerce a level or rate given as ``Fraction``/int/"p/q" string/float.

    Floats are snapped to the nearest rational with denominator <= 10^6 so
    that e.g. ``1/3`` written as ``0.3333333333333333`` round-trips exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParameterError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParameterError(f"not a rational value: {value!r}")
        return Fraction(value).limit_denominator(1_000_000)
    raise ParameterError(f"not a rational value: {value!r}")


@dataclass(frozen=True)
class SymbolSet:
    """Ascending rational CSK levels ``0 = eta_0 < ... < eta_{L-1} = 1``."""

    levels: tuple[Fraction, ...]

    def __post_init__(self):
        levels = tuple(as_fraction(v) for v in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise ParameterError("symbol set needs at least two levels")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ParameterError(f"levels must be strictly ascending: {levels}")
        if levels[0] != 0 or levels[-1] != 1:
            raise ParameterError(
                f"levels must start at 0 and end at 1, got {levels}"
            )

    @classmethod
    def uniform(cls, n_levels: int) -> "SymbolSet":
        """Equally spaced levels ``l / (n_levels - 1)``."""
        if n_levels < 2:
            raise ParameterError("uniform symbol set needs n_levels >= 2")
        return cls(tuple(Fraction(i, n_levels - 1) for i in range(n_levels)))

    @classmethod
    def from_strings(cls, tokens: Sequence[str]) -> "SymbolSet":
        return cls(tuple(as_fraction(t) for t in tokens))

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def is_binary(self) -> bool:
        return len(self.levels) == 2

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.levels], dtype=np.float64)

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.levels) + "}"


@dataclass(frozen=True)
class WeightVector:
    """Per-level symbol counts shared by every codeword of an SCW code."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise ParameterError("weight vector must not be empty")
        if any(c < 0 for c in counts):
            raise ParameterError(f"weights must be non-negative: {counts}")
        if sum(counts) < 1:
            raise ParameterError("codeword length K must be at least 1")

    @classmethod
    def balanced(cls, length: int, n_levels: int) -> "WeightVector":
        """K/L occurrences of every level; requires L | K."""
        if length % n_levels:
            raise ParameterError(
                f"balanced weights need n_levels | length, got {length}, {n_levels}"
            )
        return cls((length // n_levels,) * n_levels)

    @property
    def length(self) -> int:
        """Codeword length K."""
        return sum(self.counts)

    @property
    def n_levels(self) -> int:
        return len(self.counts)

    @property
    def fractions(self) -> tuple[Fraction, ...]:
        """Occurrence fractions rho_l = weights[l] / K."""
        k = self.length
        return tuple(Fraction(c, k) for c in self.counts)

    @property
    def is_balanced(self) -> bool:
        return len(set(self.counts)) == 1


@dataclass(frozen=True)
class Codeword:
    """One SCW codeword, stored as level indices into its symbol set."""

    indices: tuple[int, ...]
    symbol_set: SymbolSet

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        if not indices:
            raise ParameterError("codeword must not be empty")
        n = self.symbol_set.n_levels
        if any(not 0 <= i < n for i in indices):
            raise ParameterError(
                f"level indices must lie in [0, {n}): {indices}"
            )

    @property
    def length(self) -> int:
        return len(self.indices)

    @property
    def symbols(self) -> tuple[Fraction, ...]:
        levels = self.symbol_set.levels
        return tuple(levels[i] for i in self.indices)

    @property
    def weight(self) -> Fraction:
        """Sum of symbol values (rational)."""
        return sum(self.symbols, start=Fraction(0))

    def level_counts(self) -> tuple[int, ...]:
        counts = [0] * self.symbol_set.n_levels
        for i in self.indices:
            counts[i] += 1
        return tuple(counts)

    def matches(self, weights: WeightVector) -> bool:
        """SCW membership test: per-level counts equal the weight vector."""
        if weights.n_levels != self.symbol_set.n_levels:
            return False
        return self.level_counts() == weights.counts

    def as_floats(self) -> np.ndarray:
        return self.symbol_set.as_floats()[list(self.indices)]


@dataclass(frozen=True)
class Codebook:
    """An SCW codebook: full enumeration or a seeded partial subset."""

    symbol_set: SymbolSet
    weights: WeightVector
    codewords: tuple[Codeword, ...]
    kind: str = "full"
    seed: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("full", "partial"):
            raise ParameterError(f"kind must be 'full' or 'partial': {self.kind!r}")
        if self.weights.n_levels != self.symbol_set.n_levels:
            raise DimensionError(
                f"{self.weights.n_levels} weights for "
                f"{self.symbol_set.n_levels} levels"
            )
        if not self.codewords:
            raise CodebookError("codebook must contain at least one codeword")
        for cw in self.codewords:
            if cw.symbol_set != self.symbol_set:
                raise CodebookError("codeword uses a different symbol set")
            if not cw.matches(self.weights):
                raise CodebookError(
                    f"codeword {cw.indices} violates the weight vector "
                    f"{self.weights.counts}"
                )
        if len(set(cw.indices for cw in self.codewords)) != len(self.codewords):
            raise CodebookError("duplicate codewords")
        if self.kind == "full" and len(self.codewords) != codebook_size(self.weights):
            raise CodebookError(
                f"kind='full' but {len(self.codewords)} codewords != "
                f"{codebook_size(self.weights)}"
            )

    @property
    def size(self) -> int:
        return len(self.codewords)

    @property
    def length(self) -> int:
        return self.weights.length

    @property
    def is_binary(self) -> bool:
        return self.symbol_set.is_binary

    def index_matrix(self) -> np.ndarray:
        """(M, K) int8 matrix of level indices, cached."""
        if "index" not in self._cache:
            self._cache["index"] = np.array(
                [cw.indices for cw in self.codewords], dtype=np.int8
            )
        return self._cache["index"]

    def value_matrix(self) -> np.ndarray:
        """(M, K) float matrix of symbol values, cached."""
        if "value" not in self._cache:
            vals = self.symbol_set.as_floats()
            self._cache["value"] = vals[self.index_matrix().astype(np.int64)]
        return self._cache["value"]

    def index_of(self, codeword: Codeword) -> int | None:
        """Position of ``codeword`` in the book, or None when absent."""
        if "lookup" not in self._cache:
            self._cache["lookup"] = {
                cw.indices: i for i, cw in enumerate(self.codewords)
            }
        return self._cache["lookup"].get(tuple(codeword.indices))

    def __contains__(self, codeword: Codeword) -> bool:
        return self.index_of(codeword) is not None

    def to_json_dict(self) -> dict:
        return {
            "levels": [str(v) for v in self.symbol_set.levels],
            "weights": list(self.weights.counts),
            "kind": self.kind,
            "seed": self.seed,
            "codewords": [list(cw.indices) for cw in self.codewords],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Codebook":
        required = {"levels", "weights", "kind", "codewords"}
        missing = required - doc.keys()
        if missing:
            raise CodebookError(f"codebook document missing keys: {sorted(missing)}")
        unknown = doc.keys() - (required | {"seed"})
        if unknown:
            raise CodebookError(f"codebook document has unknown keys: {sorted(unknown)}")
        symbol_set = SymbolSet.from_strings(doc["levels"])
        weights = WeightVector(tuple(doc["weights"]))
        codewords = tuple(
            Codeword(tuple(ix), symbol_set) for ix in doc["codewords"]
        )
        return cls(
            symbol_set=symbol_set,
            weights=weights,
            codewords=codewords,
            kind=doc["kind"],
            seed=doc.get("seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CodebookError(f"codebook document is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise CodebookError("codebook document must be a JSON object")
        return cls.from_json_dict(doc)


def codebook_size(weights: WeightVector) -> int:
    """Exact number of codewords in the full SCW code (big integer)."""
    size = math.factorial(weights.length)
    for c in weights.counts:
        size //= math.factorial(c)
    return size


def _multiset_permutations(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All level-index sequences with the given counts, lexicographically.

    Classic next-permutation walk; starts from the ascending arrangement.
    """
    seq = []
    for level, c in enumerate(counts):
        seq.extend([level] * c)
    n = len(seq)
    while True:
        yield tuple(seq)
        # rightmost ascent
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1:] = reversed(seq[i + 1:])


def enumerate_full_scw(
    symbol_set: SymbolSet,
    weights: WeightVector,
    cap: int = ENUMERATION_CAP,
) -> Codebook:
    """Enumerate the full SCW codebook in lexicographic index order.

    Raises :class:`EnumerationCapError` (carrying the exact size) when the
    code has more than ``cap`` codewords.
    """
    if weights.n_levels != symbol_set.n_levels:
        raise DimensionError(
            f"{weights.n_levels} weights for {symbol_set.n_levels} levels"
        )
    size = codebook_size(weights)
    if size > cap:
        raise EnumerationCapError(size, cap)
    codewords = tuple(
        Codeword(ix, symbol_set) for ix in _multiset_permutations(weights.counts)
    )
    return Codebook(symbol_set=symbol_set, weights=weights, codewords=codewords,
                    kind="full")


def code_rate(weights: WeightVector) -> float:
    """``log_L(M) / K`` computed through log-gamma, safe for large K."""
    k = weights.length
    n_levels = weights.n_levels
    log_m = math.lgamma(k + 1) - sum(math.lgamma(c + 1) for c in weights.counts)
    return log_m / (k * math.log(n_levels))


def info_rate(weights: WeightVector) -> float:
    """``log_2(M) / K`` bits per channel use."""
    k = weights.length
    log_m = math.lgamma(k + 1) - sum(math.lgamma(c + 1) for c in weights.counts)
    return log_m / (k * math.log(2.0))


def code_rate_asymptote(fractions: Sequence[Fraction | float], n_levels: int) -> float:
    """Base-L entropy of the occurrence fractions; the K -> inf code rate.

    ``H_L(rho) = -sum_l rho_l log_L rho_l`` with ``0 log 0 = 0``.
    """
    if n_levels < 2:
        raise ParameterError("n_levels must be >= 2")
    if len(fractions) != n_levels:
        raise DimensionError(
            f"{len(fractions)} fractions for {n_levels} levels"
        )
    vals = [float(f) for f in fractions]
    if any(v < 0 for v in vals) or abs(sum(vals) - 1.0) > 1e-12:
        raise ParameterError(f"occurrence fractions must be a distribution: {vals}")
    log_l = math.log(n_levels)
    return -sum(v * math.log(v) / log_l for v in vals if v > 0)


#: Stirling sandwich constants for the central binomial correction term
ALPHA_LOW = math.sqrt(2.0 * math.pi) / math.e**2
ALPHA_HIGH = math.e / (2.0 * math.pi)


def binary_rate_bounds(length: int, weight: int) -> tuple[float, float]:
    """Closed-form sandwich for the binary constant-weight code rate.

    Both bounds have the shape ``H_2(rho) + log2(alpha / sqrt(K rho (1-rho))) / K``
    with ``rho = weight / length``; alpha = sqrt(2 pi)/e^2 for the lower bound
    and e/(2 pi) for the upper.  Degenerate weights 0 and K are rejected.
    """
    if length < 2:
        raise ParameterError("length must be >= 2")
    if not 0 < weight < length:
        raise ParameterError(
            f"weight must satisfy 0 < weight < length, got {weight}/{length}"
        )
    rho = weight / length
    entropy = -(rho * math.log2(rho) + (1.0 - rho) * math.log2(1.0 - rho))
    spread = math.sqrt(length * rho * (1.0 - rho))
    lower = entropy + math.log2(ALPHA_LOW / spread) / length
    upper = entropy + math.log2(ALPHA_HIGH / spread) / length
    return lower, upper


def average_release(
    weights: WeightVector, symbol_set: SymbolSet, n_tx: int | Fraction
) -> Fraction:
    """Mean molecules released per channel use, exact.

    ``n_tx * sum_l weights[l] * eta_l / K``; balanced weights over a uniform
    symbol set give exactly ``n_tx / 2``.
    """
    if weights.n_levels != symbol_set.n_levels:
        raise DimensionError(
            f"{weights.n_levels} weights for {symbol_set.n_levels} levels"
        )
    total = sum(
        (c * v for c, v in zip(weights.counts, symbol_set.levels)),
        start=Fraction(0),
    )
    return as_fraction(n_tx) * total / weights.length


def _level_denominator(symbol_set: SymbolSet) -> int:
    d = 1
    for v in symbol_set.levels:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def min_euclidean_distance(codebook: Codebook) -> float:
    """Smallest pairwise Euclidean distance between codeword symbol vectors.

    Distances are compared exactly: levels are scaled to integers by their
    common denominator, so the minimum squared distance is an integer ratio
    and only the final square root is floating point.
    """
    m = codebook.size
    if m < 2:
        raise CodebookError("minimum distance needs at least two codewords")
    denom = _level_denominator(codebook.symbol_set)
    scaled = np.array(
        [[int(v * denom) for v in cw.symbols] for cw in codebook.codewords],
        dtype=np.int64,
    )
    norms = np.einsum("ij,ij->i", scaled, scaled)
    best = None
    chunk = max(1, min(m, 8_000_000 // max(m, 1)))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        gram = scaled[lo:hi] @ scaled.T
        sq = norms[lo:hi, None] + norms[None, :] - 2 * gram
        rows = np.arange(lo, hi)
        sq[rows - lo, rows] = np.iinfo(np.int64).max  # mask self-distances
        low = int(sq.min())
        if best is None or low < best:
            best = low
    return math.sqrt(best) / denom


def random_partial_codebook(
    full: Codebook, target_rate: RationalLike | float, seed: int
) -> Codebook:
    """Seeded uniform subset of a full codebook hitting an information rate.

    Keeps ``2 ** floor(target_rate * K)`` codewords (target_rate in bits per
    channel use), drawn without replacement using the documented
    integer-only Fisher-Yates walk, then sorted back to lexicographic order.
    """
    if full.kind != "full":
        raise CodebookError("partial codebooks are sampled from a full codebook")
    check_seed(seed)
    rate = as_fraction(target_rate)
    if rate <= 0:
        raise ParameterError(f"target rate must be positive: {target_rate}")
    n_bits = math.floor(rate * full.length)
    if n_bits < 0:
        raise ParameterError(f"target rate too small: {target_rate}")
    wanted = 2**n_bits
    if wanted > full.size:
        raise ParameterError(
            f"target rate {target_rate} needs {wanted} codewords, "
            f"full code has {full.size}"
        )
    rng = substream(seed, 0)
    picks = sorted(sample_without_replacement(full.size, wanted, rng))
    codewords = tuple(full.codewords[i] for i in picks)
    return Codebook(
        symbol_set=full.symbol_set,
        weights=full.weights,
        codewords=codewords,
        kind="partial",
        seed=seed,
    )
