"""Strongly constant-weight CSK codes over Poisson molecular channels.

Codebook construction and rates, physical channel and CSI handling,
coherent / non-coherent / CSI-free detection, analytical error bounds, and
a deterministic Monte Carlo harness with figure recipes.
"""

from .bounds import (
    BoundResult,
    ber_from_cer,
    bessel_i,
    chernoff_union_bound,
    orderstat_bounds,
    poisson_cdf,
    poisson_pmf,
    skellam_pmf,
    skellam_union_bound,
)
from .channel import (
    ChannelParams,
    CsiPair,
    CsiPrior,
    DecomposedObservation,
    c_s_for_sinr,
    cir_expected_count,
    csi_for_sinr_db,
    csi_from_params,
    decompose,
    enzyme_from_micromolar,
    n_tx_for_sinr,
    sample_csi,
    sinr,
    sinr_db,
    sir,
    sir_db,
    transmit,
)
from .codes import (
    Codebook,
    Codeword,
    SymbolSet,
    WeightVector,
    average_release,
    binary_rate_bounds,
    code_rate,
    code_rate_asymptote,
    codebook_size,
    enumerate_full_scw,
    info_rate,
    min_euclidean_distance,
    random_partial_codebook,
)
from .detectors import (
    DetectionResult,
    binary_cw_detect,
    coherent_metric,
    coherent_ml_detect,
    csi_free_detect,
    detect_partial_scw,
    exact_log_likelihood,
    noncoherent_ml_detect,
)
from .errors import (
    CodebookError,
    ConfigError,
    CsiError,
    DimensionError,
    EnumerationCapError,
    ParameterError,
    ScwError,
)
from .figures import run_figure_recipe
from .mapping import BitMapping, build_random_mapping, decode_codeword, encode_bits
from .sim import (
    SweepConfig,
    SweepResult,
    binomial_interval,
    parse_sweep_config,
    run_sweep,
    sweep_csv_text,
    write_sweep,
)
from .streams import substream

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
