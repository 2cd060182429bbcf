"""
数据存储专用数据模型
"""
from dataclasses import dataclass, field

import numpy as np

from core.models import FEATURE_DIM, EmotionLabel, ManifestEntry

__all__ = [
    "CACHE_MAGIC",
    "CACHE_VERSION",
    "EmotionLabel",
    "FeatureCache",
    "FeatureRecord",
    "ManifestEntry",
    "SplitResult",
]

CACHE_MAGIC = b"EAFV"
CACHE_VERSION = 1


@dataclass(frozen=True, eq=False)
class FeatureRecord:
    """缓存中的一条记录：某个片段的某个增强变体的特征"""
    clip_id: str
    variant: int
    label: EmotionLabel
    values: np.ndarray

    def __post_init__(self) -> None:
        if not 0 <= self.variant <= 255:
            raise ValueError(f"变体编号超出 u8 范围: {self.variant}")
        object.__setattr__(self, "label", EmotionLabel(self.label))


@dataclass
class FeatureCache:
    """特征缓存内容"""
    records: list[FeatureRecord] = field(default_factory=list)
    dim: int = FEATURE_DIM

    def __len__(self) -> int:
        return len(self.records)

    def matrix(self) -> np.ndarray:
        """(N, dim) 特征矩阵"""
        if not self.records:
            return np.zeros((0, self.dim), dtype=np.float32)
        return np.stack([r.values for r in self.records]).astype(np.float32, copy=False)

    def labels(self) -> np.ndarray:
        return np.array([int(r.label) for r in self.records], dtype=np.int64)

    def select(self, clip_ids: set[str] | frozenset[str], variant: int | None = None) -> "FeatureCache":
        """按 clip_id 集合（可选按变体编号）筛选记录，保持原有顺序"""
        chosen = [
            r for r in self.records
            if r.clip_id in clip_ids and (variant is None or r.variant == variant)
        ]
        return FeatureCache(records=chosen, dim=self.dim)


@dataclass(frozen=True)
class SplitResult:
    """按 clip_id 划分的三个互不相交集合"""
    train: frozenset[str]
    val: frozenset[str]
    test: frozenset[str]
