"""Density-matrix simulation of radical-pair quantum beats under thermal relaxation."""
from .channels import decay_params, gad_kraus, dephasing_kraus, relaxed_closed_form, relaxed_gaussian
from .protocols import (
    Populations,
    correction_combine,
    correction_undo,
    double_correction,
    echo_deviation,
    inherent_method,
    kraus_method,
    tr_mfe,
)
from .spinsys import SpinSystemSpec, singlet_probability

__version__ = "0.1.0"
