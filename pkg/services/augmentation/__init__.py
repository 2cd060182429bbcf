"""
数据增强服务模块
提供可复现的组合式音频增强
"""
from .models import DEFAULT_RECIPES, AugmentOp, NoiseParams, VariantPlan, recipe_name
from .rng import SplitMix64, clip_seed, variant_seed
from .service import (
    AugmentationService,
    add_noise,
    inject_noise,
    pitch_shift,
    temporal_shift,
    time_stretch,
)

__all__ = [
    "DEFAULT_RECIPES",
    "AugmentOp",
    "AugmentationService",
    "NoiseParams",
    "SplitMix64",
    "VariantPlan",
    "add_noise",
    "clip_seed",
    "inject_noise",
    "pitch_shift",
    "recipe_name",
    "temporal_shift",
    "time_stretch",
    "variant_seed",
]
