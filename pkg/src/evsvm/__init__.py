"""Evidential multiclass classification from binary SVMs.

Binary SVM decision values become mass functions, are fused with
Dempster's rule, and are decided as a class, a union of classes, or a
rejection.
"""

__version__ = "0.1.0"

from .belief import (Frame, FocalSet, MassFunction, bel, betp, conjunctive_combine,
                     dempster_combine, pl, validate_mass)
from .decision import (AppriouWeights, Decision, build_appriou_weights, decide_appriou,
                       decide_maxbel_reject, decide_pignistic, decide_process)
from .multiclass import (Calibration, EvidentialModel, bba_from_decision, calibrate,
                         fuse_pattern, train_multiclass, vote_ovo, argmax_ovr)
from .svm import Kernel, SvmModel, decision_function, kernel_eval, train_binary

__all__ = [
    "Frame", "FocalSet", "MassFunction", "bel", "betp", "conjunctive_combine",
    "dempster_combine", "pl", "validate_mass",
    "AppriouWeights", "Decision", "build_appriou_weights", "decide_appriou",
    "decide_maxbel_reject", "decide_pignistic", "decide_process",
    "Calibration", "EvidentialModel", "bba_from_decision", "calibrate", "fuse_pattern",
    "train_multiclass", "vote_ovo", "argmax_ovr",
    "Kernel", "SvmModel", "decision_function", "kernel_eval", "train_binary",
]
