"""
特征提取服务模块
"""
from .models import FEATURE_DIM, FeatureConfig, FeatureVector
from .service import (
    FeatureService,
    assemble,
    hz_to_mel,
    mel_filterbank,
    mel_to_hz,
    mfcc,
    rmse_frames,
    zcr_frames,
)

__all__ = [
    "FEATURE_DIM",
    "FeatureConfig",
    "FeatureService",
    "FeatureVector",
    "assemble",
    "hz_to_mel",
    "mel_filterbank",
    "mel_to_hz",
    "mfcc",
    "rmse_frames",
    "zcr_frames",
]
