"""Random bit-pattern mappings onto SCW codebooks.

A mapping carries ``n_bits = floor(log2 M)`` information bits per codeword:
``2**n_bits`` codewords are kept (a partial codebook whose size is already a
power of two is used as-is) and a seeded bijection assigns one codeword to
every bit pattern.  Detection outcomes outside the mapped subset are decode
failures — flagged, never raised — and the simulation layer decides how to
account for them.

Bit patterns are read big-endian: bits (b0, b1, ..., b_{n-1}) encode the
integer ``sum b_i 2^(n-1-i)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .codes import Codebook, Codeword
from .errors import CodebookError, DimensionError, ParameterError
from .streams import check_seed, sample_without_replacement, shuffled, substream


@dataclass(frozen=True)
class BitMapping:
    """Bijection between ``2**n_bits`` bit patterns and codebook entries."""

    codebook: Codebook
    n_bits: int
    table: tuple[int, ...]  # bit pattern value -> codebook index
    seed: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n_bits < 1:
            raise ParameterError("mapping needs at least one bit per codeword")
        if len(self.table) != 2**self.n_bits:
            raise ParameterError(
                f"table has {len(self.table)} entries for {self.n_bits} bits"
            )
        if len(set(self.table)) != len(self.table):
            raise ParameterError("mapping table must be a bijection")
        if any(not 0 <= i < self.codebook.size for i in self.table):
            raise ParameterError("mapping table points outside the codebook")

    def _inverse(self) -> dict[tuple[int, ...], int]:
        if "inv" not in self._cache:
            self._cache["inv"] = {
                self.codebook.codewords[cw_index].indices: pattern
                for pattern, cw_index in enumerate(self.table)
            }
        return self._cache["inv"]

    def pattern_of(self, codeword: Codeword) -> int | None:
        """Bit pattern mapped to ``codeword``; None outside the subset."""
        return self._inverse().get(tuple(codeword.indices))

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_bits": self.n_bits,
            "codeword_indices": list(self.table),
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, doc: dict, codebook: Codebook) -> "BitMapping":
        required = {"seed", "n_bits", "codeword_indices"}
        missing = required - doc.keys()
        if missing:
            raise ParameterError(f"mapping document missing keys: {sorted(missing)}")
        unknown = doc.keys() - required
        if unknown:
            raise ParameterError(f"mapping document has unknown keys: {sorted(unknown)}")
        return cls(
            codebook=codebook,
            n_bits=int(doc["n_bits"]),
            table=tuple(int(i) for i in doc["codeword_indices"]),
            seed=int(doc["seed"]),
        )


def build_random_mapping(codebook: Codebook, seed: int) -> BitMapping:
    """Seeded mapping of ``floor(log2 M)`` bits onto a codebook.

    The codeword subset and the pattern bijection both come from the
    integer-only draws of the mapping substream, so a (codebook, seed) pair
    always yields the same table.
    """
    check_seed(seed)
    m = codebook.size
    if m < 2:
        raise CodebookError("mapping needs at least two codewords")
    n_bits = m.bit_length() - 1
    wanted = 2**n_bits
    rng = substream(seed, 1)
    if wanted == m:
        selected = list(range(m))  # power-of-two book: used as-is
    else:
        selected = sorted(sample_without_replacement(m, wanted, rng))
    table = tuple(shuffled(selected, rng))
    return BitMapping(codebook=codebook, n_bits=n_bits, table=table, seed=seed)


def encode_bits(mapping: BitMapping, bits) -> list[Codeword]:
    """Encode a bit sequence (length a multiple of ``n_bits``)."""
    arr = np.asarray(bits, dtype=np.int64)
    if arr.ndim != 1:
        raise DimensionError("bits must be a 1-D sequence")
    if np.any((arr != 0) & (arr != 1)):
        raise ParameterError("bits must be 0 or 1")
    b = mapping.n_bits
    if arr.size == 0 or arr.size % b:
        raise DimensionError(
            f"bit count {arr.size} is not a positive multiple of {b}"
        )
    out = []
    for start in range(0, arr.size, b):
        pattern = 0
        for bit in arr[start:start + b].tolist():
            pattern = (pattern << 1) | bit
        out.append(mapping.codebook.codewords[mapping.table[pattern]])
    return out


def decode_codeword(mapping: BitMapping, codeword: Codeword) -> tuple[int, ...] | None:
    """Bits for a detected codeword, or None on decode failure."""
    pattern = mapping.pattern_of(codeword)
    if pattern is None:
        return None
    b = mapping.n_bits
    return tuple((pattern >> (b - 1 - i)) & 1 for i in range(b))
