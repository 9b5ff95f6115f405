"""Decoupling and matching networks for compact uniform circular monopole arrays."""

from .beamform import (
    GainCurve,
    max_directivity,
    realized_gain_through_network,
    realized_gain_unmatched,
    scan_gain_curve,
    steering_vector,
)
from .dmnsynth import (
    StarTriangleDesign,
    TwoStageDesign,
    star_triangle_six_port,
    star_triangle_tl_core,
    star_triangle_tl_realization,
    synth_star_triangle,
    synth_two_stage,
    two_stage_six_port,
    two_stage_tl_realization,
    verify_two_stage_identities,
)
from .errors import *  # noqa: F401,F403
from .io import read_touchstone, write_csv, write_touchstone
from .netcore import FrequencySweep, MultiportNetwork, band_below_threshold, convert, is_lossless, is_reciprocal, terminate
from .netlist import Netlist
from .rfelements import Susceptance, TransmissionLine
from .tuner import NeutralizationDesign, ObjectiveSpec, broadband_tune, evaluate_objective, optimize_neutralization
from .ucamodel import CmsArray, OverlapMatrix, SymmetricArrayModel, UcaGeometry, admittance_of, overlap_matrix

__version__ = "0.1.0"
