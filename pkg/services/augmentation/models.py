"""
数据增强专用数据模型
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

VARIANT_COUNT = 10


class AugmentOp(str, Enum):
    """基础增强操作"""
    IDENTITY = "identity"
    NOISE = "noise"
    PITCH = "pitch"
    STRETCH_SLOW = "stretch_slow"
    STRETCH_FAST = "stretch_fast"
    SHIFT = "shift"


# 配方按顺序依次作用，例如 (PITCH, NOISE) 表示在变调后的音频上加噪
Recipe = tuple[AugmentOp, ...]

DEFAULT_RECIPES: tuple[Recipe, ...] = (
    (AugmentOp.IDENTITY,),
    (AugmentOp.NOISE,),
    (AugmentOp.PITCH,),
    (AugmentOp.STRETCH_SLOW,),
    (AugmentOp.STRETCH_FAST,),
    (AugmentOp.SHIFT,),
    (AugmentOp.PITCH, AugmentOp.NOISE),
    (AugmentOp.STRETCH_SLOW, AugmentOp.NOISE),
    (AugmentOp.STRETCH_FAST, AugmentOp.NOISE),
    (AugmentOp.SHIFT, AugmentOp.NOISE),
)


def recipe_name(recipe: Recipe) -> str:
    """按作用顺序拼接的配方名，如 pitch+noise"""
    return "+".join(op.value for op in recipe)


class NoiseParams(BaseModel):
    """噪声参数：amp = scale * U(0,1) * 峰值幅度"""
    model_config = ConfigDict(frozen=True)

    scale: float = Field(default=0.035, ge=0)


class VariantPlan(BaseModel):
    """一个片段的10个变体配方及基础种子"""
    model_config = ConfigDict(frozen=True)

    recipes: tuple[Recipe, ...] = DEFAULT_RECIPES
    base_seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("recipes")
    @classmethod
    def _ten_with_identity_first(cls, value: tuple[Recipe, ...]) -> tuple[Recipe, ...]:
        if len(value) != VARIANT_COUNT:
            raise ValueError(f"变体配方必须恰好 {VARIANT_COUNT} 个，实际为 {len(value)}")
        if value[0] != (AugmentOp.IDENTITY,):
            raise ValueError("第0个配方必须是 identity")
        return value


class VariantDraw(BaseModel):
    """某个变体实际抽取到的随机参数，用于日志与复现"""
    index: int
    recipe: str
    noise_amp: float | None = None
    pitch_steps: float | None = None
    shift: int | None = None
