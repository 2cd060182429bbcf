"""
合成语料生成
类别 k 为频率 220*2^(k/2) Hz 的纯音，叠加少量带种子的噪声
"""
from pathlib import Path

import numpy as np

from core.models import (
    CANONICAL_DURATION_S,
    CANONICAL_OFFSET_S,
    CANONICAL_RATE,
    AudioClip,
    EmotionLabel,
    ManifestEntry,
)
from infrastructure.audio import save_wav
from infrastructure.logging import get_logger

from .manifest import write_manifest

logger = get_logger(__name__)

BASE_FREQUENCY = 220.0
NOISE_STD = 0.01


def class_frequency(label: EmotionLabel | int) -> float:
    return BASE_FREQUENCY * 2.0 ** (int(label) / 2.0)


def synth_clip(label: EmotionLabel | int, index: int, seed: int = 0, rate: int = CANONICAL_RATE) -> AudioClip:
    """
    生成一个合成片段：0.6 秒引导段 + 2.5 秒内容，总长覆盖规范窗口

    振幅与初相位随片段略有变化，噪声由 (seed, 类别, 序号) 确定
    """
    rng = np.random.default_rng([seed, int(label), index])
    n = int(round((CANONICAL_OFFSET_S + CANONICAL_DURATION_S) * rate))
    t = np.arange(n) / rate
    amplitude = rng.uniform(0.3, 0.6)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    tone = amplitude * np.sin(2.0 * np.pi * class_frequency(label) * t + phase)
    noise = NOISE_STD * rng.standard_normal(n)
    return AudioClip(samples=np.clip(tone + noise, -1.0, 1.0), sample_rate=rate)


def generate_corpus(
    out_dir: str | Path,
    clips_per_class: int = 20,
    seed: int = 0,
    rate: int = CANONICAL_RATE,
) -> list[ManifestEntry]:
    """
    写出合成语料的 WAV 文件及 manifest.csv

    Returns:
        list: 按类别、序号排列的清单条目
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for label in EmotionLabel:
        for index in range(clips_per_class):
            stem = f"{label.label_name}_{index:03d}"
            path = out / f"{stem}.wav"
            save_wav(synth_clip(label, index, seed, rate), path)
            entries.append(ManifestEntry(path=str(path), label=label, clip_id=stem))

    write_manifest(entries, out / "manifest.csv")
    logger.info("synth", f"合成语料已写入 {out}", clips=len(entries))
    return entries
