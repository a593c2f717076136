"""rfmvm: matrix-vector multiplication computed in simulated RF physics.

Weights and inputs are frequency-encoded onto OFDM subcarriers, multiplied
through a mixer model, and decoded from a reduced-rate capture; companion
modules cover channel calibration, closed-form energy accounting, and a
complex-valued fully-connected inference runtime.
"""

from .channel import (
    ChannelResponse,
    CsiEstimate,
    apply_channel,
    csi_from_channel,
    estimate_csi,
    flat_channel,
    interpolate_csi,
    multipath_channel,
    precode_input,
    precode_weights,
    tabulated_channel,
    time_encode_weights,
)
from .containers import read_idx, read_vectors, read_weights, write_vectors, write_weights
from .energy import (
    EnergyBreakdown,
    HardwareProfile,
    ThroughputParams,
    aggregate_model_energy,
    e_tdl,
    energy_breakdown,
    landauer_limit,
    link_budget_distance,
    throughput,
)
from .engine import (
    CaptureBuffer,
    MvmPlan,
    WeightBlockSymbols,
    decode_block,
    encode_input,
    encode_weights_block,
    pad_weight_block,
    plan_mvm,
    run_ip,
    run_mvm,
)
from .frontend import (
    FrontendConfig,
    IqWaveform,
    LpfSpec,
    NoiseSpec,
    PassbandWaveform,
    adc_capture,
    add_awgn,
    iq_demodulate,
    iq_modulate,
    lowpass,
    mix,
    papr,
    upsample,
)
from .inference import (
    ComplexFcModel,
    activation_zc,
    classify,
    forward_analog,
    forward_digital,
    load_mnist,
    load_model,
)
from .ofdm import (
    OfdmGrid,
    Preamble,
    SyncResult,
    ZcPhaseSequence,
    attach_cyclic_prefix,
    detect_preamble_and_cfo,
    dft_shifted,
    generate_preamble,
    idft_shifted,
    remove_cyclic_prefix,
    rmse_and_bits,
    zc_phase_sequence,
    zc_phasors,
)

__version__ = "0.1.0"
