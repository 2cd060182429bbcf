"""
特征提取专用数据模型
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import ShapeMismatch
from core.models import FEATURE_DIM
from infrastructure.config.settings import FeatureConfig

__all__ = ["FeatureConfig", "FeatureVector", "FEATURE_DIM"]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """
    单个片段的堆叠特征向量

    顺序：[ZCR 各帧 | RMSE 各帧 | MFCC 按系数优先，系数0各帧 ... 系数19各帧]
    """
    values: np.ndarray
    n_frames: int

    def __post_init__(self) -> None:
        if self.values.ndim != 1:
            raise ShapeMismatch(f"特征向量必须是一维，实际形状 {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("特征向量中存在 NaN/Inf")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def zcr(self) -> np.ndarray:
        return self.values[: self.n_frames]

    @property
    def rmse(self) -> np.ndarray:
        return self.values[self.n_frames: 2 * self.n_frames]

    @property
    def mfcc(self) -> np.ndarray:
        return self.values[2 * self.n_frames:].reshape(-1, self.n_frames)
