"""
配置管理模块
包含流水线配置和环境变量管理
"""
from .settings import (
    AudioConfig,
    AugmentConfig,
    EnvSettings,
    FeatureConfig,
    ModelConfig,
    PathsConfig,
    PipelineConfig,
    TrainConfig,
    get_settings,
    load_config,
    print_current_config,
    resolve_seed,
)

__all__ = [
    "AudioConfig",
    "AugmentConfig",
    "EnvSettings",
    "FeatureConfig",
    "ModelConfig",
    "PathsConfig",
    "PipelineConfig",
    "TrainConfig",
    "get_settings",
    "load_config",
    "print_current_config",
    "resolve_seed",
]
