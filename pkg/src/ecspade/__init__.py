"""Subpixel target detectors for multivariate-t backgrounds and their ROC harness."""

from .detectors import (GlrtEstimate, PixelQuadratic, TargetContext, alpha_hat, amf_score,
                        beta_hat, brute_force_glrt, clairvoyant_score, ec2spade_score,
                        ec_amf_score, ec_ftmf_score, ftmf_fit, ftmf_score, gauss2spade_score,
                        make_target_context, pixel_quadratic)
from .errors import (BadBeta, BadNu, ConfigError, DegenerateQuadratic, DimMismatch,
                     ECSpadeError, EmptyInput, IdentityMismatch, NotSPD, NumericalError,
                     OutOfRange, ZeroTarget)
from .evaluation import RocCurve, auc_pairwise, pd_at_pfa, roc
from .sim import PRESETS, Scenario, ScorePairs, run_trial, sweep
from .stats import BackgroundModel, log_density, mahalanobis_sq, make_background, sample

__version__ = "0.1.0"

__all__ = [
    "alpha_hat",
    "amf_score",
    "auc_pairwise",
    "BackgroundModel",
    "BadBeta",
    "BadNu",
    "beta_hat",
    "brute_force_glrt",
    "clairvoyant_score",
    "ConfigError",
    "DegenerateQuadratic",
    "DimMismatch",
    "ec2spade_score",
    "ec_amf_score",
    "ec_ftmf_score",
    "ECSpadeError",
    "EmptyInput",
    "ftmf_fit",
    "ftmf_score",
    "gauss2spade_score",
    "GlrtEstimate",
    "IdentityMismatch",
    "log_density",
    "mahalanobis_sq",
    "make_background",
    "make_target_context",
    "NotSPD",
    "NumericalError",
    "OutOfRange",
    "pd_at_pfa",
    "pixel_quadratic",
    "PixelQuadratic",
    "PRESETS",
    "roc",
    "RocCurve",
    "run_trial",
    "sample",
    "Scenario",
    "ScorePairs",
    "sweep",
    "TargetContext",
    "ZeroTarget",
]
