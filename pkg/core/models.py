"""
统一数据模型定义
包含所有服务共享的基础数据结构
"""
from enum import IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# 规范采样率、窗口时长与偏移：55125个采样点 -> 108帧 -> 22 x 108 = 2376 维特征
CANONICAL_RATE = 22050
CANONICAL_DURATION_S = 2.5
CANONICAL_OFFSET_S = 0.6
FEATURE_DIM = 2376
NUM_CLASSES = 7


class EmotionLabel(IntEnum):
    """七类情感标签，整数编码固定不变（混淆矩阵坐标轴使用该编码）"""
    NEUTRAL = 0
    HAPPY = 1
    SAD = 2
    ANGRY = 3
    FEAR = 4
    DISGUST = 5
    SURPRISE = 6

    @property
    def label_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_name(cls, name: str) -> "EmotionLabel":
        """按小写名称查找标签，未知名称抛出 KeyError"""
        return cls[name.strip().upper()]

    @classmethod
    def names(cls) -> list[str]:
        return [label.label_name for label in cls]


class AudioClip(BaseModel):
    """单声道波形及其采样率，所有增强操作的基本单元"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray
    sample_rate: int = Field(..., gt=0, description="采样率 (Hz)")

    @field_validator("samples", mode="before")
    @classmethod
    def _as_finite_vector(cls, value) -> np.ndarray:
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 1:
            raise ValueError(f"采样数组必须是一维，实际为 {array.ndim} 维")
        if not np.all(np.isfinite(array)):
            raise ValueError("采样值中存在 NaN/Inf")
        return array

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples))) if len(self) else 0.0

    def with_samples(self, samples: np.ndarray) -> "AudioClip":
        """以相同采样率包装新的波形"""
        return AudioClip(samples=samples, sample_rate=self.sample_rate)


class ClipWindow(BaseModel):
    """规范化窗口：先跳过 offset_s 秒，再裁剪/补零到 duration_s 秒"""
    model_config = ConfigDict(frozen=True)

    duration_s: float = Field(default=CANONICAL_DURATION_S, gt=0)
    offset_s: float = Field(default=CANONICAL_OFFSET_S, ge=0)
    target_rate: int = Field(default=CANONICAL_RATE, gt=0)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.target_rate))

    @property
    def offset_samples(self) -> int:
        return int(round(self.offset_s * self.target_rate))


class ManifestEntry(BaseModel):
    """数据清单中的一行"""
    model_config = ConfigDict(frozen=True)

    path: str
    label: EmotionLabel
    clip_id: str

    @model_validator(mode="after")
    def _non_empty(self) -> "ManifestEntry":
        if not self.path or not self.clip_id:
            raise ValueError("path 与 clip_id 不能为空")
        return self
