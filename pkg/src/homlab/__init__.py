"""Photon-coincidence models for one- and two-delay interferometers.

The package computes coincidence rates for a balanced two-port
interferometer and its two-delay extension, for an entangled photon-pair
input and for identical coherent pulses. Closed forms live in
``rates`` next to a quadrature oracle that recomputes every rate from
the transfer matrix and the tabulated spectra. ``sensing`` turns
fluctuation-averaged scan curves into recovered path-length offsets,
``qps`` maps two interferometric baselines into an emitter position on a
sphere, and ``figures``/``cli`` generate the standard plot datasets.
"""

from .spectra import (
    CoherentSpectrum,
    FrequencyGrid,
    GaussianJointSpectrum,
    make_grid,
)
from .network import (
    AchromaticPhase,
    BalancedBS,
    OpticalNetwork,
    RelativeDelay,
    ScalarLoss,
    element_from_dict,
    element_to_dict,
    hom_network,
    mhom_network,
    network_from_jsonable,
    network_to_jsonable,
    transfer_at,
)
from .rates import (
    LossParams,
    RateCurve,
    RateSurface,
    RegimeError,
    RegimeWarning,
    bp_plateau,
    bp_rate_oracle,
    box_average_curve,
    box_average_surface,
    cl_s_rate,
    coarse_grain_curve,
    coarse_grain_surface,
    cp_plateau,
    cp_rate_oracle,
    hom_bp_analytic,
    hom_cp_analytic,
    hom_cp_coarse_analytic,
    mhom_bp_analytic,
    mhom_bp_coarse_analytic,
    mhom_bp_loss_coarse,
    mhom_cp_analytic,
    mhom_cp_coarse_analytic,
    mhom_cp_loss_coarse,
    pair_grid,
    pulse_grid,
    sample_curve,
    sample_surface,
)
from .sensing import (
    ExtremaError,
    ExtremaReport,
    SensingResult,
    SensingScenario,
    find_extrema,
    hom_zero_locate,
    invert_bp,
    invert_cp,
    run_sensing,
    scan_f,
    visibility,
)
from .qps import (
    QpsDelays,
    QpsInversion,
    QpsScanResult,
    QpsTarget,
    qps_forward,
    qps_invert,
    qps_scan,
)
from .figures import FIGURE_PRESETS, build_figure

__version__ = "0.1.0"

__all__ = [
    "AchromaticPhase",
    "BalancedBS",
    "CoherentSpectrum",
    "ExtremaError",
    "ExtremaReport",
    "FIGURE_PRESETS",
    "FrequencyGrid",
    "GaussianJointSpectrum",
    "LossParams",
    "OpticalNetwork",
    "QpsDelays",
    "QpsInversion",
    "QpsScanResult",
    "QpsTarget",
    "RateCurve",
    "RateSurface",
    "RegimeError",
    "RegimeWarning",
    "RelativeDelay",
    "ScalarLoss",
    "SensingResult",
    "SensingScenario",
    "bp_plateau",
    "bp_rate_oracle",
    "box_average_curve",
    "box_average_surface",
    "build_figure",
    "cl_s_rate",
    "coarse_grain_curve",
    "coarse_grain_surface",
    "cp_plateau",
    "cp_rate_oracle",
    "element_from_dict",
    "element_to_dict",
    "find_extrema",
    "hom_bp_analytic",
    "hom_cp_analytic",
    "hom_cp_coarse_analytic",
    "hom_network",
    "hom_zero_locate",
    "invert_bp",
    "invert_cp",
    "make_grid",
    "mhom_bp_analytic",
    "mhom_bp_coarse_analytic",
    "mhom_bp_loss_coarse",
    "mhom_cp_analytic",
    "mhom_cp_coarse_analytic",
    "mhom_cp_loss_coarse",
    "mhom_network",
    "network_from_jsonable",
    "network_to_jsonable",
    "pair_grid",
    "pulse_grid",
    "qps_forward",
    "qps_invert",
    "qps_scan",
    "run_sensing",
    "sample_curve",
    "sample_surface",
    "scan_f",
    "transfer_at",
    "visibility",
]
