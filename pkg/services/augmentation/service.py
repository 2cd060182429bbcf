"""
数据增强服务实现
噪声注入、变调、时间伸缩、循环平移四种基础操作及10变体组合流水线
"""
import numpy as np

from core.exceptions import ShiftOutOfRange
from core.models import AudioClip
from core.protocols import RandomSource
from infrastructure.audio.processing import fit_length, resample_array
from infrastructure.config.settings import AugmentConfig
from infrastructure.dsp import StftConfig, istft, phase_vocoder, stft
from infrastructure.logging.logger import get_logger

from .models import AugmentOp, NoiseParams, Recipe, VariantDraw, VariantPlan, recipe_name
from .rng import SplitMix64, variant_seed

logger = get_logger(__name__)

MAX_SHIFT = 5000


def inject_noise(clip: AudioClip, params: NoiseParams, rng: RandomSource) -> tuple[AudioClip, float]:
    """
    注入高斯噪声，幅度 amp = scale * U(0,1) * max|x|

    Returns:
        tuple: (加噪后的片段, 实际噪声幅度)，幅度记录在变体抽样结果中
    """
    amp = params.scale * rng.uniform() * clip.peak
    noise = rng.gaussians(len(clip))
    return clip.with_samples(clip.samples + amp * noise), amp


def add_noise(clip: AudioClip, params: NoiseParams, rng: RandomSource) -> AudioClip:
    """注入高斯噪声，只返回片段"""
    return inject_noise(clip, params, rng)[0]


def temporal_shift(clip: AudioClip, k: int, max_shift: int = MAX_SHIFT) -> AudioClip:
    """
    循环平移 output[i] = samples[(i - k) mod N]

    Raises:
        ShiftOutOfRange: |k| 超过 max_shift
    """
    if abs(k) > max_shift:
        raise ShiftOutOfRange(f"平移量 {k} 超出 ±{max_shift}")
    return clip.with_samples(np.roll(clip.samples, k))


def time_stretch(clip: AudioClip, rate: float, stft_cfg: StftConfig | None = None) -> AudioClip:
    """
    相位声码器时间伸缩，输出长度 round(len / rate)，音高不变
    """
    if rate <= 0:
        raise ValueError(f"拉伸率必须 > 0，实际为 {rate}")
    spec = stft(clip.samples, stft_cfg)
    stretched = phase_vocoder(spec, rate)
    return clip.with_samples(istft(stretched, int(round(len(clip) / rate))))


def pitch_factor(steps: float, unit: str = "semitones") -> float:
    """频率倍数：半音制 2^(steps/12)，八度制 2^steps"""
    return 2.0 ** (steps / 12.0) if unit == "semitones" else 2.0**steps


def pitch_shift(
    clip: AudioClip,
    steps: float,
    unit: str = "semitones",
    stft_cfg: StftConfig | None = None,
) -> AudioClip:
    """
    变调：先按 1/factor 拉长（音高不变），再重采样回原长度，使所有频率乘以 factor

    steps == 0 时直接返回输入
    """
    if not np.isfinite(steps):
        raise ValueError(f"变调步数必须有限，实际为 {steps}")
    if steps == 0:
        return clip
    factor = pitch_factor(steps, unit)
    stretched = time_stretch(clip, 1.0 / factor, stft_cfg)
    shifted = resample_array(stretched.samples, 1.0 / factor, out_len=len(clip))
    return clip.with_samples(fit_length(shifted, len(clip)))


class AugmentationService:
    """
    数据增强服务类
    由基础种子确定性地为每个片段生成10个变体
    """

    def __init__(self, config: AugmentConfig | None = None, stft_cfg: StftConfig | None = None):
        """
        初始化增强服务

        Args:
            config: 增强配置，默认取内置常数 (0.035, [-1,1], 0.9/1.1, ±5000)
            stft_cfg: 时间伸缩使用的STFT参数
        """
        self.config = config or AugmentConfig()
        self.stft_cfg = stft_cfg or StftConfig()
        self.noise = NoiseParams(scale=self.config.noise_scale)
        self.service_name = "augmentation"

    def plan(self, base_seed: int) -> VariantPlan:
        return VariantPlan(base_seed=base_seed)

    def _draw_pitch(self, rng: SplitMix64) -> float:
        low, high = self.config.pitch_range
        return low + (high - low) * rng.uniform()

    def _draw_shift(self, rng: SplitMix64) -> int:
        span = 2 * self.config.shift_max + 1
        return min(int(rng.uniform() * span), span - 1) - self.config.shift_max

    def apply_recipe(
        self, clip: AudioClip, recipe: Recipe, rng: SplitMix64, index: int = 0
    ) -> tuple[AudioClip, VariantDraw]:
        """
        按顺序执行配方中的操作，随机数按操作顺序从 rng 中抽取

        Returns:
            tuple: (变体片段, 抽取到的随机参数)
        """
        draw = VariantDraw(index=index, recipe=recipe_name(recipe))
        out = clip
        for op in recipe:
            if op is AugmentOp.IDENTITY:
                continue
            if op is AugmentOp.NOISE:
                out, draw.noise_amp = inject_noise(out, self.noise, rng)
            elif op is AugmentOp.PITCH:
                draw.pitch_steps = self._draw_pitch(rng)
                out = pitch_shift(out, draw.pitch_steps, self.config.pitch_unit, self.stft_cfg)
            elif op is AugmentOp.STRETCH_SLOW:
                out = time_stretch(out, self.config.stretch_slow, self.stft_cfg)
            elif op is AugmentOp.STRETCH_FAST:
                out = time_stretch(out, self.config.stretch_fast, self.stft_cfg)
            elif op is AugmentOp.SHIFT:
                draw.shift = self._draw_shift(rng)
                out = temporal_shift(out, draw.shift, self.config.shift_max)
        return out, draw

    def generate_variants(self, clip: AudioClip, base_seed: int) -> list[AudioClip]:
        """
        生成固定顺序的10个变体，变体0即输入本身

        每个变体使用 variant_seed(base_seed, k) 独立播种，可单独复现；
        所有输出重新裁剪/补零到输入长度

        Args:
            clip: 已规范化的片段
            base_seed: 64位基础种子

        Returns:
            list[AudioClip]: 10个变体
        """
        plan = self.plan(base_seed)
        variants = []
        for index, recipe in enumerate(plan.recipes):
            if recipe == (AugmentOp.IDENTITY,):
                variants.append(clip)
                continue
            rng = SplitMix64(variant_seed(plan.base_seed, index))
            out, draw = self.apply_recipe(clip, recipe, rng, index)
            logger.debug("augment", f"变体 {index} ({draw.recipe})", **draw.model_dump(exclude_none=True))
            variants.append(out.with_samples(fit_length(out.samples, len(clip))))
        return variants
