"""
配置管理模块 - 基于嵌套结构
使用Pydantic嵌套模型直接映射 JSON/TOML 配置

优先级：命令行参数 > 配置文件 > 内置默认值；EMOAUG_* 环境变量作为种子等的兜底
"""
import json
from pathlib import Path
from typing import Any, Literal

import toml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from core.exceptions import UsageError
from core.models import (
    CANONICAL_DURATION_S,
    CANONICAL_OFFSET_S,
    CANONICAL_RATE,
    FEATURE_DIM,
    ClipWindow,
)


class _Section(BaseModel):
    """配置段基类：拒绝未知键"""
    model_config = ConfigDict(extra="forbid")


class SystemConfig(_Section):
    """系统配置"""
    log_level: str = Field(default="INFO", description="日志级别")
    threads: int = Field(default=1, ge=1, description="逐文件处理的工作线程数")


class LoggingConfig(_Section):
    """日志配置"""
    file_path: str = Field(default="logs/emoaugnet.log", description="日志文件路径")
    enable_console: bool = Field(default=True, description="是否启用控制台日志")
    enable_file: bool = Field(default=False, description="是否启用文件日志")


class AudioConfig(_Section):
    """音频规范化配置"""
    rate: int = Field(default=CANONICAL_RATE, gt=0, description="目标采样率 (Hz)")
    duration_s: float = Field(default=CANONICAL_DURATION_S, gt=0, description="窗口时长（秒）")
    offset_s: float = Field(default=CANONICAL_OFFSET_S, ge=0, description="起始偏移（秒）")

    def window(self) -> ClipWindow:
        return ClipWindow(duration_s=self.duration_s, offset_s=self.offset_s, target_rate=self.rate)


class AugmentConfig(_Section):
    """数据增强配置"""
    seed: int = Field(default=0, ge=0, lt=2**64, description="基础种子 (64位)")
    noise_scale: float = Field(default=0.035, ge=0, description="噪声常数因子")
    pitch_range: tuple[float, float] = Field(default=(-1.0, 1.0), description="音高偏移范围")
    pitch_unit: Literal["semitones", "octaves"] = Field(default="semitones", description="音高偏移单位")
    stretch_slow: float = Field(default=0.9, gt=0, description="慢速拉伸率")
    stretch_fast: float = Field(default=1.1, gt=0, description="快速拉伸率")
    shift_max: int = Field(default=5000, ge=0, le=5000, description="最大循环平移采样数")

    @field_validator("pitch_range")
    @classmethod
    def _ordered_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        low, high = value
        if not -1.0 <= low <= high <= 1.0:
            raise ValueError(f"pitch_range 必须满足 -1 <= low <= high <= 1，实际为 {value}")
        return value


class FeatureConfig(_Section):
    """逐帧特征提取配置"""
    frame_len: int = Field(default=2048, gt=0, description="帧长（采样点，2的幂）")
    hop: int = Field(default=512, gt=0, description="帧移")
    n_mfcc: int = Field(default=20, gt=0)
    n_mels: int = Field(default=128, gt=0)
    fmin: float = Field(default=0.0, ge=0)
    fmax: float | None = Field(default=None, description="为空时取 sample_rate/2")
    log_floor: float = Field(default=1e-10, gt=0)

    @model_validator(mode="after")
    def _consistent(self) -> "FeatureConfig":
        if self.frame_len & (self.frame_len - 1):
            raise ValueError(f"frame_len 必须是2的幂，实际为 {self.frame_len}")
        if self.n_mfcc > self.n_mels:
            raise ValueError("n_mfcc 不能大于 n_mels")
        if self.hop > self.frame_len:
            raise ValueError("hop 不能大于 frame_len")
        return self

    def n_frames(self, n_samples: int) -> int:
        """居中分帧的帧数"""
        return 1 + n_samples // self.hop

    def feature_dim(self, n_samples: int) -> int:
        """ZCR + RMSE + n_mfcc 个系数，每个通道 n_frames 个值"""
        return (2 + self.n_mfcc) * self.n_frames(n_samples)


class ModelConfig(_Section):
    """Conv1D-LSTM 网络结构配置"""
    conv_activation: Literal["relu", "elu"] = Field(default="relu", description="卷积层激活函数")
    dense_activation: Literal["relu", "elu"] = Field(default="elu", description="全连接隐藏层激活函数")
    dropout: float = Field(default=0.2, ge=0, lt=1, description="所有Dropout层的丢弃率")
    input_length: int = Field(default=FEATURE_DIM, gt=0)
    conv_filters: tuple[int, int, int] = (256, 512, 256)
    conv_kernels: tuple[int, int, int] = (5, 3, 3)
    lstm_units: tuple[int, int] = (128, 128)
    dense_units: tuple[int, int, int] = (128, 64, 32)
    bn_momentum: float = Field(default=0.99, gt=0, lt=1)
    bn_epsilon: float = Field(default=1e-3, gt=0)
    dtype: Literal["float32", "float64"] = "float32"


class TrainConfig(_Section):
    """训练配置"""
    lr0: float = Field(default=0.001, gt=0, description="初始学习率")
    batch_size: int = Field(default=64, ge=1)
    max_epochs: int = Field(default=100, ge=1)
    plateau_factor: float = Field(default=0.5, gt=0, lt=1)
    plateau_patience: int = Field(default=5, ge=1)
    min_lr: float = Field(default=1e-6, gt=0)
    early_stop_patience: int = Field(default=10, ge=1)
    min_delta: float = Field(default=1e-4, ge=0, description="判定“有提升”的阈值")
    monitor: Literal["val_accuracy"] = "val_accuracy"
    seed: int = Field(default=0, ge=0, lt=2**64)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    standardize: bool = Field(default=True, description="按训练集统计量做逐维标准化")

    @field_validator("split_ratios")
    @classmethod
    def _ratios_sum_to_one(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(r < 0 for r in value) or abs(sum(value) - 1.0) > 1e-9:
            raise ValueError(f"split_ratios 之和必须为1，实际为 {value}")
        return value


class PathsConfig(_Section):
    """路径配置"""
    manifest: str = "data/manifest.csv"
    cache: str = "data/features.eafv"
    checkpoint: str = "models/emoaugnet.eann"
    reports: str = "reports"


class PipelineConfig(_Section):
    """
    EmoAugNet 流水线配置
    嵌套结构直接映射配置文件的各个段
    """
    system: SystemConfig = Field(default_factory=SystemConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    audio: AudioConfig = Field(default_factory=AudioConfig)
    augment: AugmentConfig = Field(default_factory=AugmentConfig)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)


class EnvSettings(BaseSettings):
    """EMOAUG_* 环境变量（可放在 .env 文件中）"""
    model_config = SettingsConfigDict(env_prefix="EMOAUG_", env_file=".env", extra="ignore")

    seed: int | None = None
    log_level: str | None = None
    threads: int | None = None


def load_config_file(path: str | Path) -> dict[str, Any]:
    """
    加载 JSON 或 TOML 配置文件并返回嵌套结构

    Raises:
        FileNotFoundError: 文件不存在
        UsageError: 无法解析，或顶层不是对象
    """
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"配置文件不存在: {config_path}")

    try:
        with open(config_path, encoding="utf-8") as f:
            if config_path.suffix.lower() == ".toml":
                data = toml.load(f)
            else:
                data = json.load(f)
    except (json.JSONDecodeError, toml.TomlDecodeError) as e:
        raise UsageError(f"配置文件格式错误 ({e})", str(config_path)) from e
    if not isinstance(data, dict):
        raise UsageError("配置文件顶层必须是对象", str(config_path))
    return data


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """
    构建配置实例：文件中缺省的键使用内置默认值，环境变量补充系统段
    """
    data = load_config_file(path) if path else {}
    config = PipelineConfig(**data)

    env = EnvSettings()
    system_set = config.system.model_fields_set
    if env.log_level and "log_level" not in system_set:
        config.system.log_level = env.log_level
    if env.threads and "threads" not in system_set:
        config.system.threads = env.threads
    return config


def resolve_seed(flag: int | None, config: PipelineConfig) -> int:
    """
    种子优先级：命令行 > 配置文件显式值 > EMOAUG_SEED > 默认值
    """
    if flag is not None:
        return flag
    if "seed" in config.augment.model_fields_set:
        return config.augment.seed
    env_seed = EnvSettings().seed
    if env_seed is not None:
        return env_seed
    return config.augment.seed


# 全局配置实例
_settings: PipelineConfig | None = None
_settings_path: str | None = None


def get_settings(path: str | Path | None = None) -> PipelineConfig:
    """
    获取全局配置实例
    单例模式，首次调用（或指定了新的配置文件）时加载
    """
    global _settings, _settings_path
    key = str(path) if path else None
    if _settings is None or (key is not None and key != _settings_path):
        _settings = load_config(path)
        _settings_path = key
    return _settings


def print_current_config(config: PipelineConfig | None = None) -> str:
    """以 JSON 形式返回当前配置，便于 --show-config 输出"""
    config = config or get_settings()
    return config.model_dump_json(indent=2)
