"""
训练服务专用数据模型
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from sklearn.preprocessing import StandardScaler

from core.models import EmotionLabel
from infrastructure.config.settings import TrainConfig

__all__ = [
    "EpochRecord",
    "EvalReport",
    "LabelledSet",
    "Standardizer",
    "StopDecision",
    "TrainConfig",
    "TrainHistory",
]

HISTORY_COLUMNS = ["epoch", "train_loss", "train_acc", "val_loss", "val_acc", "lr"]


class StopDecision(str, Enum):
    CONTINUE = "continue"
    STOP = "stop"


class EpochRecord(BaseModel):
    """单轮训练记录"""
    epoch: int = Field(..., ge=0)
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    lr: float


class TrainHistory(BaseModel):
    """逐轮训练历史，best_epoch 为验证准确率最高（并列取最早）的轮次"""
    records: list[EpochRecord] = Field(default_factory=list)
    best_epoch: int = -1

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def val_accuracies(self) -> list[float]:
        return [r.val_acc for r in self.records]

    def lrs(self) -> list[float]:
        return [r.lr for r in self.records]

    @property
    def best_val_acc(self) -> float:
        return self.records[self.best_epoch].val_acc if self.best_epoch >= 0 else float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.records], columns=HISTORY_COLUMNS)


@dataclass(eq=False)
class LabelledSet:
    """特征矩阵 (N, dim) 与标签 (N,)"""
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError(f"特征数 {self.features.shape[0]} 与标签数 {self.labels.shape[0]} 不一致")

    def __len__(self) -> int:
        return int(self.labels.shape[0])


@dataclass(eq=False)
class Standardizer:
    """逐维标准化，统计量只来自训练集"""
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardizer":
        """
        StandardScaler 拟合训练矩阵；方差为0的维度 scale_ 为1

        非有限值按缺失值跳过，留给训练循环报告发散
        """
        matrix = np.asarray(features, dtype=np.float64)
        matrix = np.where(np.isfinite(matrix), matrix, np.nan)
        scaler = StandardScaler().fit(matrix)
        return cls(mean=scaler.mean_.astype(np.float32), std=scaler.scale_.astype(np.float32))

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(mean=np.zeros(dim, dtype=np.float32), std=np.ones(dim, dtype=np.float32))

    def apply(self, features: np.ndarray) -> np.ndarray:
        return ((features - self.mean) / self.std).astype(np.float32)


@dataclass(eq=False)
class EvalReport:
    """
    评估报告

    confusion 行为真实类别、列为预测类别；
    WA = 迹/总数，UA = 有样本的类别上召回率的平均
    """
    confusion: np.ndarray
    weighted_accuracy: float
    unweighted_accuracy: float
    per_class_recall: np.ndarray
    per_class_precision: np.ndarray
    per_class_f1: np.ndarray
    support: np.ndarray
    class_names: list[str] = field(default_factory=EmotionLabel.names)

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def summary_line(self) -> str:
        return f"wa={self.weighted_accuracy:.6f} ua={self.unweighted_accuracy:.6f}"
