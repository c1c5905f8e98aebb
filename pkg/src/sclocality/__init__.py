"""Spatially coupled LDPC codes with sub-block locality.

Protograph constructions, overlap-based coupling partitions, short-cycle
counting, EXIT thresholds, array-based lifting and BER simulation.
"""

from __future__ import annotations

from .cycles import (
    CoupledCycleDecomposition,
    CycleCount,
    a_function,
    closed_form_cycles6,
    count_coupled_cycles,
    enumerate_cycles,
)
from .exit import j_function, j_inverse, run_exit, threshold, threshold_ordering_regular
from .lifting import LiftedCode, ab_lift, build_coupled, extract_local_code, lifted_components
from .partition import (
    PartitionCandidate,
    cutting_vector_partition,
    optimize_locality_aware,
    optimize_locality_blind,
    score_partition,
)
from .presets import PRESETS, get_preset
from .protograph import (
    X,
    OverlapSet,
    PartitionMatrix,
    Protograph,
    build_balanced,
    build_regular,
    build_unbalanced,
    couple_protograph,
    overlap_parameters,
    split_by_partition,
)
from .simulate import BerPoint, SimConfig, bp_decode, simulate_ber, snr_to_sigma

__version__ = "0.1.0"
