"""Monte Carlo link simulation with deterministic parallelism.

Every trial owns a counter-based substream keyed by ``(master_seed,
grid_index, trial_index)`` and consumes draws in a fixed order: message,
channel state (when drawn from a prior), Poisson counts, detector tie
breaks, decode-failure pattern.  Batches are cut into fixed-size chunks and
early stopping is decided only at batch boundaries on cumulative error
counts in trial order, so results are byte-identical across reruns and
worker counts.

Error accounting: a codeword error is ``detected != transmitted``.  With a
bit mapping attached, bit errors come from the mapped patterns; a detected
codeword outside the mapped subset is a decode failure, replaced by a
uniformly random pattern (default) or charged half the bits ("erasure").
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from .channel import (
    ChannelParams,
    CsiPair,
    CsiPrior,
    cir_expected_count,
    csi_for_sinr_db,
    sample_csi,
    sinr_db,
)
from .codes import (
    Codebook,
    SymbolSet,
    WeightVector,
    as_fraction,
    enumerate_full_scw,
    random_partial_codebook,
)
from .detectors import _sorted_assignment
from .errors import ConfigError, ParameterError
from .mapping import build_random_mapping
from .streams import check_seed, substream

#: trials per scheduling unit; fixed so chunk boundaries never depend on workers
CHUNK = 2048

DETECTORS = (
    "csi_free", "binary_cw", "coherent", "noncoherent",
    "declare_error", "restricted_ml",
)

CONFIDENCE_Z = 1.96


# ---------------------------------------------------------------------------
# configuration model


@dataclass(frozen=True)
class CodeConfig:
    """Code description; the codebook is materialized only when needed."""

    levels: tuple[str, ...]
    weights: tuple[int, ...]
    kind: str = "full"
    target_info_rate: str | None = None
    codebook_seed: int | None = None

    def symbol_set(self) -> SymbolSet:
        return SymbolSet.from_strings(self.levels)

    def weight_vector(self) -> WeightVector:
        return WeightVector(self.weights)


@dataclass(frozen=True)
class ChannelConfig:
    kind: str
    sinr_db: tuple[float, ...] = ()
    c_n: float | None = None
    c_s: float | None = None
    params: ChannelParams | None = None
    atoms: tuple[tuple[float, float, float], ...] = ()  # (c_s, c_n, weight)


@dataclass(frozen=True)
class SweepConfig:
    code: CodeConfig
    channel: ChannelConfig
    detector: str
    master_seed: int
    trials: int
    max_errors: int | None = 200
    batch_size: int = 10000
    mapping_seed: int | None = None
    decode_failure: str = "random_pattern"
    ci: str = "wald"


def _require_keys(doc: dict, required: set, optional: set, where: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    missing = required - doc.keys()
    if missing:
        raise ConfigError(f"{where} missing keys: {sorted(missing)}")
    unknown = doc.keys() - required - optional
    if unknown:
        raise ConfigError(f"{where} has unknown keys: {sorted(unknown)}")


def parse_code_config(doc: dict) -> CodeConfig:
    _require_keys(
        doc, {"levels", "weights"},
        {"kind", "target_info_rate", "codebook_seed"}, "code config",
    )
    kind = doc.get("kind", "full")
    if kind not in ("full", "partial"):
        raise ConfigError(f"code kind must be 'full' or 'partial', got {kind!r}")
    target = doc.get("target_info_rate")
    seed = doc.get("codebook_seed")
    if kind == "partial":
        if target is None or seed is None:
            raise ConfigError(
                "partial codes need target_info_rate and codebook_seed"
            )
    cfg = CodeConfig(
        levels=tuple(str(v) for v in doc["levels"]),
        weights=tuple(int(w) for w in doc["weights"]),
        kind=kind,
        target_info_rate=None if target is None else str(target),
        codebook_seed=None if seed is None else int(seed),
    )
    cfg.symbol_set()  # validate eagerly
    cfg.weight_vector()
    return cfg


def parse_channel_config(doc: dict) -> ChannelConfig:
    if not isinstance(doc, dict) or "type" not in doc:
        raise ConfigError("channel config must be an object with a 'type' key")
    kind = doc["type"]
    if kind == "sinr_grid":
        _require_keys(doc, {"type", "sinr_db", "c_n"}, set(), "sinr_grid channel")
        grid = tuple(float(v) for v in doc["sinr_db"])
        if not grid:
            raise ConfigError("sinr_db grid must not be empty")
        return ChannelConfig(kind=kind, sinr_db=grid, c_n=float(doc["c_n"]))
    if kind == "fixed_csi":
        _require_keys(doc, {"type", "c_s", "c_n"}, set(), "fixed_csi channel")
        return ChannelConfig(kind=kind, c_s=float(doc["c_s"]), c_n=float(doc["c_n"]))
    if kind == "physical":
        _require_keys(doc, {"type", "params", "c_n"}, set(), "physical channel")
        return ChannelConfig(
            kind=kind,
            params=ChannelParams.from_json_dict(doc["params"]),
            c_n=float(doc["c_n"]),
        )
    if kind == "prior":
        _require_keys(doc, {"type", "atoms"}, set(), "prior channel")
        atoms = []
        for entry in doc["atoms"]:
            _require_keys(entry, {"c_s", "c_n", "weight"}, set(), "prior atom")
            atoms.append(
                (float(entry["c_s"]), float(entry["c_n"]), float(entry["weight"]))
            )
        cfg = ChannelConfig(kind=kind, atoms=tuple(atoms))
        _prior_of(cfg)  # validate weights and CSI values eagerly
        return cfg
    raise ConfigError(
        "channel type must be one of sinr_grid, fixed_csi, physical, prior; "
        f"got {kind!r}"
    )


def parse_sweep_config(doc: dict) -> SweepConfig:
    _require_keys(
        doc,
        {"code", "channel", "detector", "master_seed", "trials"},
        {"max_errors", "batch_size", "mapping_seed", "decode_failure", "ci"},
        "sweep config",
    )
    detector = doc["detector"]
    if detector not in DETECTORS:
        raise ConfigError(f"detector must be one of {DETECTORS}, got {detector!r}")
    max_errors = doc.get("max_errors", 200)
    if max_errors in (0, None):
        max_errors = None
    elif int(max_errors) < 1:
        raise ConfigError("max_errors must be null or a positive integer")
    else:
        max_errors = int(max_errors)
    decode_failure = doc.get("decode_failure", "random_pattern")
    if decode_failure not in ("random_pattern", "erasure"):
        raise ConfigError(
            f"decode_failure must be 'random_pattern' or 'erasure', got {decode_failure!r}"
        )
    ci = doc.get("ci", "wald")
    if ci not in ("wald", "wilson"):
        raise ConfigError(f"ci must be 'wald' or 'wilson', got {ci!r}")
    trials = int(doc["trials"])
    if trials < 1:
        raise ConfigError("trials must be positive")
    batch_size = int(doc.get("batch_size", 10000))
    if batch_size < 1:
        raise ConfigError("batch_size must be positive")
    mapping_seed = doc.get("mapping_seed")
    cfg = SweepConfig(
        code=parse_code_config(doc["code"]),
        channel=parse_channel_config(doc["channel"]),
        detector=detector,
        master_seed=check_seed(int(doc["master_seed"])),
        trials=trials,
        max_errors=max_errors,
        batch_size=batch_size,
        mapping_seed=None if mapping_seed is None else int(mapping_seed),
        decode_failure=decode_failure,
        ci=ci,
    )
    _check_semantics(cfg)
    return cfg


def _check_semantics(cfg: SweepConfig) -> None:
    symbol_set = cfg.code.symbol_set()
    weights = cfg.code.weight_vector()
    if weights.n_levels != symbol_set.n_levels:
        raise ConfigError(
            f"{weights.n_levels} weights for {symbol_set.n_levels} levels"
        )
    if cfg.detector == "binary_cw" and not symbol_set.is_binary:
        raise ConfigError("binary_cw detection requires binary levels")
    # noncoherent without a prior channel is allowed: it degenerates to a
    # point-mass prior at the grid CSI.


def materialize_codebook(code: CodeConfig) -> Codebook:
    full = enumerate_full_scw(code.symbol_set(), code.weight_vector())
    if code.kind == "full":
        return full
    return random_partial_codebook(
        full, as_fraction(code.target_info_rate), code.codebook_seed
    )


def _prior_of(channel: ChannelConfig) -> CsiPrior:
    return CsiPrior(
        atoms=tuple(CsiPair(c_s=a, c_n=b) for a, b, _ in channel.atoms),
        weights=tuple(w for _, _, w in channel.atoms),
    )


@dataclass(frozen=True)
class GridPoint:
    index: int
    sinr_db: float | None
    csi: CsiPair | None
    prior: CsiPrior | None


def build_grid(channel: ChannelConfig) -> tuple[GridPoint, ...]:
    if channel.kind == "sinr_grid":
        return tuple(
            GridPoint(
                index=i, sinr_db=s,
                csi=csi_for_sinr_db(s, channel.c_n), prior=None,
            )
            for i, s in enumerate(channel.sinr_db)
        )
    if channel.kind == "fixed_csi":
        csi = CsiPair(c_s=channel.c_s, c_n=channel.c_n)
        return (GridPoint(index=0, sinr_db=sinr_db(csi), csi=csi, prior=None),)
    if channel.kind == "physical":
        csi = CsiPair(
            c_s=cir_expected_count(channel.params, channel.params.t_sample_s),
            c_n=channel.c_n,
        )
        return (GridPoint(index=0, sinr_db=sinr_db(csi), csi=csi, prior=None),)
    if channel.kind == "prior":
        return (GridPoint(index=0, sinr_db=None, csi=None, prior=_prior_of(channel)),)
    raise ConfigError(f"unknown channel kind {channel.kind!r}")


def config_to_dict(cfg: SweepConfig, grid: tuple[GridPoint, ...]) -> dict:
    channel: dict = {"type": cfg.channel.kind}
    if cfg.channel.kind == "sinr_grid":
        channel["sinr_db"] = list(cfg.channel.sinr_db)
        channel["c_n"] = cfg.channel.c_n
    elif cfg.channel.kind == "fixed_csi":
        channel["c_s"] = cfg.channel.c_s
        channel["c_n"] = cfg.channel.c_n
    elif cfg.channel.kind == "physical":
        channel["params"] = cfg.channel.params.as_dict()
        channel["c_n"] = cfg.channel.c_n
    else:
        channel["atoms"] = [
            {"c_s": a, "c_n": b, "weight": w} for a, b, w in cfg.channel.atoms
        ]
    return {
        "code": {
            "levels": list(cfg.code.levels),
            "weights": list(cfg.code.weights),
            "kind": cfg.code.kind,
            "target_info_rate": cfg.code.target_info_rate,
            "codebook_seed": cfg.code.codebook_seed,
        },
        "channel": channel,
        "detector": cfg.detector,
        "master_seed": cfg.master_seed,
        "trials": cfg.trials,
        "max_errors": cfg.max_errors,
        "batch_size": cfg.batch_size,
        "mapping_seed": cfg.mapping_seed,
        "decode_failure": cfg.decode_failure,
        "ci": cfg.ci,
        "grid": [
            {
                "grid_index": gp.index,
                "sinr_db": gp.sinr_db,
                "c_s": None if gp.csi is None else gp.csi.c_s,
                "c_n": None if gp.csi is None else gp.csi.c_n,
            }
            for gp in grid
        ],
    }


# ---------------------------------------------------------------------------
# trial execution


@dataclass
class Tally:
    trials: int = 0
    errors: int = 0
    ties: int = 0
    oob: int = 0
    failures: int = 0
    bits: int = 0
    bit_errors: float = 0.0

    def add(self, other: "Tally") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


class _PointRunner:
    """Per-(config, grid point) precomputation and the trial loop."""

    def __init__(self, cfg: SweepConfig, point: GridPoint):
        self.cfg = cfg
        self.point = point
        self.symbol_set = cfg.code.symbol_set()
        self.weights = cfg.code.weight_vector()
        self.counts = self.weights.counts
        self.k = self.weights.length
        self.level_values = self.symbol_set.as_floats()
        self.n_levels = self.symbol_set.n_levels

        need_book = cfg.detector != "csi_free" or cfg.mapping_seed is not None
        self.book = materialize_codebook(cfg.code) if need_book else None
        self.template = np.repeat(
            np.arange(self.n_levels, dtype=np.int64), self.counts
        )

        self.index_matrix = None
        self.lookup: dict[tuple[int, ...], int] = {}
        if self.book is not None:
            self.index_matrix = self.book.index_matrix().astype(np.int64)
            self.lookup = {
                cw.indices: i for i, cw in enumerate(self.book.codewords)
            }

        self.mapping = None
        self.inv_pattern = None
        if cfg.mapping_seed is not None:
            self.mapping = build_random_mapping(self.book, cfg.mapping_seed)
            self.n_bits = self.mapping.n_bits
            self.n_patterns = 2**self.n_bits
            self.pattern_rows = np.array(self.mapping.table, dtype=np.int64)
            self.inv_pattern = np.full(self.book.size, -1, dtype=np.int64)
            for pattern, pos in enumerate(self.mapping.table):
                self.inv_pattern[pos] = pattern

        # detector precomputation
        det = cfg.detector
        if det in ("coherent", "restricted_ml", "noncoherent"):
            self.indicators = [
                (self.index_matrix == level).astype(np.int64)
                for level in range(self.n_levels)
            ]
            self.common_weight = float(self.book.codewords[0].weight)
        if det == "noncoherent":
            prior = point.prior
            if prior is None:
                prior = CsiPrior.point_mass(point.csi)
            self.det_prior = prior
            for atom in prior.atoms:
                if atom.c_n == 0:
                    raise ConfigError(
                        "non-coherent detection needs c_n > 0 in every atom"
                    )

        # channel precomputation for a fixed CSI point
        self.level_mu = None
        self.mu_matrix = None
        if point.csi is not None:
            csi = point.csi
            self.level_mu = self.level_values * csi.c_s + csi.c_n
            if self.index_matrix is not None:
                self.mu_matrix = self.level_values[self.index_matrix] * csi.c_s + csi.c_n
            if det in ("coherent", "restricted_ml"):
                self.fixed_gains = self._gains(csi)

    def _gains(self, csi: CsiPair) -> list[float]:
        if csi.c_n == 0:
            raise ConfigError("coherent detection needs c_n > 0")
        ratio = csi.c_s / csi.c_n
        return [math.log1p(v * ratio) for v in self.level_values.tolist()]

    def _detect_book(self, metrics: np.ndarray, rng) -> tuple[int, int]:
        best = metrics.max()
        ties = np.flatnonzero(metrics == best)
        if len(ties) == 1:
            return int(ties[0]), 1
        return int(ties[int(rng.integers(0, len(ties)))]), len(ties)

    def run_range(self, lo: int, hi: int) -> Tally:
        cfg = self.cfg
        point = self.point
        tally = Tally()
        det = cfg.detector
        mapping = self.mapping
        prior = point.prior
        for trial in range(lo, hi):
            rng = substream(cfg.master_seed, point.index, trial)

            # message
            tx_pos = -1
            tx_pattern = -1
            if mapping is not None:
                tx_pattern = int(rng.integers(0, self.n_patterns))
                tx_pos = int(self.pattern_rows[tx_pattern])
                tx_idx = self.index_matrix[tx_pos]
            elif self.book is not None:
                tx_pos = int(rng.integers(0, self.book.size))
                tx_idx = self.index_matrix[tx_pos]
            else:
                tx_idx = rng.permutation(self.template)

            # channel
            if prior is not None:
                csi = sample_csi(prior, rng)
                mu = self.level_values[tx_idx] * csi.c_s + csi.c_n
            else:
                csi = point.csi
                if self.mu_matrix is not None:
                    mu = self.mu_matrix[tx_pos]
                else:
                    mu = self.level_mu[tx_idx]
            obs = rng.poisson(mu)

            # detection
            oob = False
            det_pos = -1
            if det in ("csi_free", "declare_error"):
                det_idx, tie_count = _sorted_assignment(obs, self.counts, rng)
                err = not np.array_equal(det_idx, tx_idx)
                if self.book is not None:
                    det_pos = self.lookup.get(tuple(det_idx.tolist()), -1)
                    oob = det_pos < 0
            elif det == "binary_cw":
                metrics = self.index_matrix @ obs
                det_pos, tie_count = self._detect_book(metrics, rng)
                err = det_pos != tx_pos
            elif det in ("coherent", "restricted_ml"):
                gains = self.fixed_gains if prior is None else self._gains(csi)
                metrics = np.zeros(self.book.size)
                for level in range(1, self.n_levels):
                    if gains[level] != 0.0:
                        metrics += (self.indicators[level] @ obs) * gains[level]
                det_pos, tie_count = self._detect_book(metrics, rng)
                err = det_pos != tx_pos
            elif det == "noncoherent":
                stacked = np.empty((len(self.det_prior.atoms), self.book.size))
                for a, (atom, w) in enumerate(
                    zip(self.det_prior.atoms, self.det_prior.weights)
                ):
                    log_means = np.log(self.level_values * atom.c_s + atom.c_n)
                    ll = np.zeros(self.book.size)
                    for level in range(self.n_levels):
                        ll += (self.indicators[level] @ obs) * log_means[level]
                    stacked[a] = ll + math.log(w) - (
                        self.common_weight * atom.c_s + self.k * atom.c_n
                    )
                peak = stacked.max(axis=0)
                metrics = peak + np.log(np.exp(stacked - peak).sum(axis=0))
                det_pos, tie_count = self._detect_book(metrics, rng)
                err = det_pos != tx_pos
            else:  # pragma: no cover - guarded by config validation
                raise ParameterError(f"unknown detector {det!r}")

            tally.trials += 1
            tally.errors += err
            tally.ties += tie_count > 1
            tally.oob += oob

            if mapping is not None:
                pattern = -1
                if det_pos >= 0:
                    pattern = int(self.inv_pattern[det_pos])
                if pattern < 0:
                    tally.failures += 1
                    if cfg.decode_failure == "random_pattern":
                        pattern = int(rng.integers(0, self.n_patterns))
                        tally.bit_errors += (pattern ^ tx_pattern).bit_count()
                    else:
                        tally.bit_errors += self.n_bits / 2.0
                else:
                    tally.bit_errors += (pattern ^ tx_pattern).bit_count()
                tally.bits += self.n_bits
        return tally


_RUNNER_CACHE: dict = {}


def _run_chunk(args) -> Tally:
    cfg, point, lo, hi = args
    key = (cfg, point)
    runner = _RUNNER_CACHE.get(key)
    if runner is None:
        if len(_RUNNER_CACHE) > 8:
            _RUNNER_CACHE.clear()
        runner = _PointRunner(cfg, point)
        _RUNNER_CACHE[key] = runner
    return runner.run_range(lo, hi)


# ---------------------------------------------------------------------------
# aggregation


def binomial_interval(
    successes: float, n: int, method: str = "wald"
) -> tuple[float, float]:
    """Two-sided 95% interval for a binomial proportion."""
    if n <= 0:
        return (0.0, 1.0)
    p = successes / n
    z = CONFIDENCE_Z
    if method == "wald":
        hw = z * math.sqrt(max(p * (1.0 - p), 0.0) / n)
        return (max(0.0, p - hw), min(1.0, p + hw))
    if method == "wilson":
        denom = 1.0 + z * z / n
        center = (p + z * z / (2.0 * n)) / denom
        hw = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
        return (max(0.0, center - hw), min(1.0, center + hw))
    raise ParameterError(f"interval method must be 'wald' or 'wilson': {method!r}")


@dataclass
class PointResult:
    grid_index: int
    sinr_db: float | None
    c_s: float | None
    c_n: float | None
    detector: str
    trials: int
    errors: int
    cer: float
    cer_ci_low: float
    cer_ci_high: float
    bits: int
    bit_errors: float
    ber: float | None
    ber_ci_low: float | None
    ber_ci_high: float | None
    tie_rate: float
    oob_rate: float
    decode_failures: int
    wall_time_s: float


@dataclass
class SweepResult:
    config: dict
    points: list[PointResult]


def run_point(
    cfg: SweepConfig, point: GridPoint, executor: ProcessPoolExecutor | None = None
) -> PointResult:
    t0 = time.perf_counter()
    tally = Tally()
    done = 0
    while done < cfg.trials:
        end = min(done + cfg.batch_size, cfg.trials)
        tasks = [
            (cfg, point, lo, min(lo + CHUNK, end))
            for lo in range(done, end, CHUNK)
        ]
        if executor is None:
            parts = [_run_chunk(t) for t in tasks]
        else:
            parts = list(executor.map(_run_chunk, tasks))
        for part in parts:
            tally.add(part)
        done = end
        if cfg.max_errors is not None and tally.errors >= cfg.max_errors:
            break
    wall = time.perf_counter() - t0

    cer = tally.errors / tally.trials
    cer_lo, cer_hi = binomial_interval(tally.errors, tally.trials, cfg.ci)
    if tally.bits:
        ber = tally.bit_errors / tally.bits
        ber_lo, ber_hi = binomial_interval(tally.bit_errors, tally.bits, cfg.ci)
    else:
        ber = ber_lo = ber_hi = None
    return PointResult(
        grid_index=point.index,
        sinr_db=point.sinr_db,
        c_s=None if point.csi is None else point.csi.c_s,
        c_n=None if point.csi is None else point.csi.c_n,
        detector=cfg.detector,
        trials=tally.trials,
        errors=tally.errors,
        cer=cer,
        cer_ci_low=cer_lo,
        cer_ci_high=cer_hi,
        bits=tally.bits,
        bit_errors=tally.bit_errors,
        ber=ber,
        ber_ci_low=ber_lo,
        ber_ci_high=ber_hi,
        tie_rate=tally.ties / tally.trials,
        oob_rate=tally.oob / tally.trials,
        decode_failures=tally.failures,
        wall_time_s=wall,
    )


def run_sweep(config: SweepConfig | dict, workers: int = 1) -> SweepResult:
    """Run every grid point of a sweep; ``workers > 1`` forks a process pool.

    Estimates are a pure function of the configuration: worker count only
    affects wall time.
    """
    cfg = parse_sweep_config(config) if isinstance(config, dict) else config
    grid = build_grid(cfg.channel)
    executor = None
    if workers > 1:
        executor = ProcessPoolExecutor(
            max_workers=workers,
            mp_context=multiprocessing.get_context("fork"),
        )
    try:
        points = [run_point(cfg, gp, executor) for gp in grid]
    finally:
        if executor is not None:
            executor.shutdown()
    return SweepResult(config=config_to_dict(cfg, grid), points=points)


# ---------------------------------------------------------------------------
# delimited output

SWEEP_COLUMNS = (
    "grid_index", "sinr_db", "c_s", "c_n", "detector", "trials", "errors",
    "cer", "cer_ci_low", "cer_ci_high", "bits", "bit_errors", "ber",
    "ber_ci_low", "ber_ci_high", "tie_rate", "oob_rate", "decode_failures",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_csv_text(result: SweepResult) -> str:
    """Headered RFC-4180 text for a sweep (wall times stay in the sidecar)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SWEEP_COLUMNS)
    for p in result.points:
        writer.writerow([_fmt(getattr(p, col)) for col in SWEEP_COLUMNS])
    return buf.getvalue()


def rows_csv_text(header: tuple[str, ...], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in header])
    return buf.getvalue()


def write_sweep(result: SweepResult, csv_path, sidecar_path=None) -> str:
    """Write CSV plus a JSON sidecar carrying the config and content hash."""
    text = sweep_csv_text(result)
    data = text.encode()
    with open(csv_path, "wb") as fh:
        fh.write(data)
    digest = hashlib.sha256(data).hexdigest()
    if sidecar_path is not None:
        sidecar = {
            "config": result.config,
            "csv_sha256": digest,
            "wall_time_s": [p.wall_time_s for p in result.points],
            "total_wall_time_s": sum(p.wall_time_s for p in result.points),
        }
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh, indent=2)
            fh.write("\n")
    return digest
