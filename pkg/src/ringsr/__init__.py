"""Super-resolution of column-subsampled images via overlapped patch Hankel
embedding and tensor-ring completion with incremental ranks."""

from .hankel import HankelPlan, plan
from .metrics import RoiSpec, cnr, psnr, ssim
from .ring import FitResult, RankSchedule, TensorRing, rank_increment, tr_als_fit, tr_to_dense
from .superres import (
    PipelineError,
    PipelineResult,
    SuperResConfig,
    superres_pipeline,
    superres_single_patch,
)

__all__ = [
    "HankelPlan",
    "plan",
    "RoiSpec",
    "cnr",
    "psnr",
    "ssim",
    "FitResult",
    "RankSchedule",
    "TensorRing",
    "rank_increment",
    "tr_als_fit",
    "tr_to_dense",
    "PipelineError",
    "PipelineResult",
    "SuperResConfig",
    "superres_pipeline",
    "superres_single_patch",
]

__version__ = "0.1.0"
