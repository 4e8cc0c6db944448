"""Diffusive molecular channel with flow, enzyme degradation, Poisson counts.

The receiver observes, per channel use, a count ``r[k] ~ Poisson(s[k] * c_s
+ c_n)`` where ``s[k]`` is the transmitted release fraction, ``c_s`` the
expected signal count at the sampling instant for a full release, and ``c_n``
a constant interference-plus-noise mean.  The (c_s, c_n) pair is the channel
state information (CSI).

Expected signal count for a point release of ``n_tx`` molecules observed by a
transparent spherical receiver at distance ``d`` in a uniform flow ``(v_par,
v_perp)`` with diffusion ``D`` and first-order enzymatic degradation
``kappa * c_enzyme``:

    c_s(t) = n_tx * V_rx / (4 pi D t)^(3/2)
             * exp(-kappa c_e t - ((d - v_par t)^2 + (v_perp t)^2) / (4 D t))

Defaults reproduce a c_s of about 4.8 counts at the 0.1 ms sampling time with
10^4 released molecules.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np
from numpy.random import Generator

from .codes import Codeword
from .errors import CsiError, DimensionError, ParameterError

AVOGADRO = 6.02214076e23
#: molecules per m^3 in a 1 micromol/L solution
MICROMOLAR_PER_M3 = AVOGADRO * 1e-3


def enzyme_from_micromolar(concentration_umol_per_l: float) -> float:
    """Convert an enzyme concentration in micromol/L to molecules per m^3."""
    if concentration_umol_per_l < 0:
        raise ParameterError("enzyme concentration must be non-negative")
    return concentration_umol_per_l * MICROMOLAR_PER_M3


@dataclass(frozen=True)
class ChannelParams:
    """Physical channel parameters; defaults give the reference link."""

    n_tx: float = 1.0e4                      # molecules per full release
    rx_radius_m: float = 50.0e-9             # receiver radius
    distance_m: float = 500.0e-9             # transmitter-receiver distance
    diffusion_m2_per_s: float = 4.3e-10      # diffusion coefficient
    enzyme_per_m3: float = 1.66 * MICROMOLAR_PER_M3
    degradation_m3_per_s: float = 2.0e-19    # enzyme reaction rate constant
    flow_parallel_m_per_s: float = 1.0e-3    # flow toward the receiver
    flow_perp_m_per_s: float = 1.0e-3        # transverse flow
    t_symbol_s: float = 1.0e-3               # symbol duration
    t_sample_s: float = 1.0e-4               # sampling time inside the symbol

    def __post_init__(self):
        positive = (
            "n_tx", "rx_radius_m", "distance_m", "diffusion_m2_per_s",
            "t_symbol_s", "t_sample_s",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        nonneg = (
            "enzyme_per_m3", "degradation_m3_per_s",
            "flow_parallel_m_per_s", "flow_perp_m_per_s",
        )
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")
        if self.t_sample_s > self.t_symbol_s:
            raise ParameterError("t_sample_s must not exceed t_symbol_s")

    @property
    def rx_volume_m3(self) -> float:
        return 4.0 / 3.0 * math.pi * self.rx_radius_m**3

    def with_n_tx(self, n_tx: float) -> "ChannelParams":
        return ChannelParams(**{**self.as_dict(), "n_tx": n_tx})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.as_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ChannelParams":
        known = {f.name for f in fields(cls)}
        unknown = doc.keys() - known
        if unknown:
            raise ParameterError(
                f"unknown channel parameter keys: {sorted(unknown)}"
            )
        return cls(**{k: float(v) for k, v in doc.items()})

    @classmethod
    def from_json(cls, text: str) -> "ChannelParams":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"channel config is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ParameterError("channel config must be a JSON object")
        return cls.from_json_dict(doc)


@dataclass(frozen=True)
class CsiPair:
    """Channel state: expected full-release signal count and noise count."""

    c_s: float
    c_n: float

    def __post_init__(self):
        if not (math.isfinite(self.c_s) and self.c_s > 0):
            raise CsiError(f"c_s must be positive and finite, got {self.c_s}")
        if not (math.isfinite(self.c_n) and self.c_n >= 0):
            raise CsiError(f"c_n must be non-negative and finite, got {self.c_n}")


@dataclass(frozen=True)
class CsiPrior:
    """Finite mixture over CSI pairs for non-coherent operation."""

    atoms: tuple[CsiPair, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.atoms:
            raise CsiError("prior needs at least one atom")
        if len(self.atoms) != len(self.weights):
            raise DimensionError(
                f"{len(self.atoms)} atoms but {len(self.weights)} weights"
            )
        if any(w <= 0 for w in self.weights):
            raise CsiError(f"prior weights must be positive: {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise CsiError(f"prior weights must sum to 1: {sum(self.weights)}")

    @classmethod
    def point_mass(cls, csi: CsiPair) -> "CsiPrior":
        return cls(atoms=(csi,), weights=(1.0,))


def cir_expected_count(params: ChannelParams, t: float) -> float:
    """Expected observed count at time ``t`` after a full release."""
    if not t > 0:
        raise ParameterError(f"observation time must be positive, got {t}")
    d = params.diffusion_m2_per_s
    spread = (4.0 * math.pi * d * t) ** 1.5
    drift = (
        (params.distance_m - params.flow_parallel_m_per_s * t) ** 2
        + (params.flow_perp_m_per_s * t) ** 2
    )
    decay = params.degradation_m3_per_s * params.enzyme_per_m3 * t
    return (
        params.n_tx
        * params.rx_volume_m3
        / spread
        * math.exp(-decay - drift / (4.0 * d * t))
    )


def csi_from_params(params: ChannelParams, c_n: float) -> CsiPair:
    """CSI pair with c_s evaluated at the configured sampling time."""
    return CsiPair(c_s=cir_expected_count(params, params.t_sample_s), c_n=c_n)


def sir(csi: CsiPair) -> float:
    """Signal-to-interference ratio ``c_s / c_n``."""
    if csi.c_n == 0:
        raise CsiError("SIR undefined for c_n = 0")
    return csi.c_s / csi.c_n


def sinr(csi: CsiPair) -> float:
    """Signal-to-interference-plus-noise ratio ``c_s^2 / (c_s + c_n)``."""
    return csi.c_s**2 / (csi.c_s + csi.c_n)


def sir_db(csi: CsiPair) -> float:
    return 10.0 * math.log10(sir(csi))


def sinr_db(csi: CsiPair) -> float:
    return 10.0 * math.log10(sinr(csi))


def c_s_for_sinr(target_sinr: float, c_n: float) -> float:
    """Signal mean achieving a given linear SINR at fixed noise mean.

    Positive root of ``c_s^2 - target c_s - target c_n = 0``.
    """
    if not target_sinr > 0:
        raise ParameterError(f"target SINR must be positive, got {target_sinr}")
    if c_n < 0:
        raise ParameterError(f"c_n must be non-negative, got {c_n}")
    return 0.5 * (target_sinr + math.sqrt(target_sinr**2 + 4.0 * target_sinr * c_n))


def csi_for_sinr_db(target_sinr_db: float, c_n: float) -> CsiPair:
    """CSI pair hitting a target SINR given in dB at fixed noise mean."""
    return CsiPair(c_s=c_s_for_sinr(10.0 ** (target_sinr_db / 10.0), c_n), c_n=c_n)


def n_tx_for_sinr(
    target_sinr: float, c_n: float, params: ChannelParams
) -> float:
    """Released molecules needed to hit a linear SINR target.

    The expected count is linear in ``n_tx``, so the current operating point
    is scaled by the ratio of required to current signal mean.
    """
    needed = c_s_for_sinr(target_sinr, c_n)
    current = cir_expected_count(params, params.t_sample_s)
    return params.n_tx * needed / current


def observation_means(codeword: Codeword, csi: CsiPair) -> np.ndarray:
    """Per-use Poisson means ``s[k] * c_s + c_n``."""
    return codeword.as_floats() * csi.c_s + csi.c_n


def transmit(codeword: Codeword, csi: CsiPair, rng: Generator) -> np.ndarray:
    """Draw one observation vector for a codeword (independent Poisson counts)."""
    return rng.poisson(observation_means(codeword, csi)).astype(np.int64)


@dataclass(frozen=True)
class DecomposedObservation:
    """Observation split into signal mean, noise mean, and residual."""

    signal_mean: np.ndarray
    noise_mean: np.ndarray
    residual: np.ndarray


def decompose(
    observation: Sequence[int], codeword: Codeword, csi: CsiPair
) -> DecomposedObservation:
    """Split counts into expected signal, expected noise, and what is left."""
    obs = as_counts(observation)
    if len(obs) != codeword.length:
        raise DimensionError(
            f"observation length {len(obs)} != codeword length {codeword.length}"
        )
    signal = codeword.as_floats() * csi.c_s
    noise = np.full(codeword.length, csi.c_n)
    return DecomposedObservation(
        signal_mean=signal,
        noise_mean=noise,
        residual=obs.astype(np.float64) - signal - noise,
    )


def sample_csi(prior: CsiPrior, rng: Generator) -> CsiPair:
    """Draw one CSI pair from a finite prior using a single uniform variate."""
    u = float(rng.random())
    acc = 0.0
    for atom, w in zip(prior.atoms, prior.weights):
        acc += w
        if u < acc:
            return atom
    return prior.atoms[-1]  # guard against accumulated rounding


def as_counts(observation: Sequence[int] | np.ndarray) -> np.ndarray:
    """Validate and coerce an observation vector to int64 counts."""
    obs = np.asarray(observation)
    if obs.ndim != 1 or obs.size == 0:
        raise DimensionError("observation must be a non-empty 1-D sequence")
    if not np.issubdtype(obs.dtype, np.integer):
        rounded = np.rint(np.asarray(obs, dtype=np.float64))
        if not np.all(np.isfinite(rounded)) or np.any(rounded != obs):
            raise ParameterError("observation entries must be integers")
        obs = rounded
    obs = obs.astype(np.int64)
    if np.any(obs < 0):
        raise ParameterError("observation entries must be non-negative counts")
    return obs
