"""Jammer-assisted covert communication over block-fading MIMO channels.

Covertness-achieving transmit powers, artificial-noise covariance strategies,
Bob's linear receivers, Willie's energy-detector simulation, and the sweep
harness that reproduces the strategy-comparison figures.
"""

from ._version import __version__
from .model import (
    ChannelRealization,
    JammerStrategy,
    NoiseVariancePair,
    SystemParams,
    covariance,
    make_strategy,
    sample_channel,
    single_beam,
)
from .covert import (
    DetectionEstimate,
    PsiSample,
    alice_power_full_csi,
    alice_power_no_csi,
    alice_power_no_csi_n1,
    estimate_min_error_sum,
    ks_distance,
    psi_cdf,
    sample_psi,
    simulate_slot_statistic,
    willie_variances,
)
from .strategies import (
    GlobalOptResult,
    ReceiveFilter,
    SchemeNotApplicableError,
    SchemeResult,
    SnrEvaluation,
    filter_given_direction,
    global_opt_alternating,
    jammer_full_csi_m1,
    jammer_given_filter,
    jammer_no_csi_bob_mrc,
    jammer_no_csi_isotropic,
    jammer_no_csi_m1,
    objective_filtered,
    objective_m1,
    objective_no_csi_m1,
    scheme_bob_cancels,
    scheme_c_mrc,
    scheme_jammer_cancels,
    scheme_v_willie,
)
from .experiments import (
    SweepConfig,
    applicable_schemes,
    run_covert_check,
    run_fig3,
    run_fig4,
    run_optimize_dump,
    run_psi_check,
)
from .reports import RunReport, emit_csv, parse_csv

__all__ = [name for name in dir() if not name.startswith("_")]
