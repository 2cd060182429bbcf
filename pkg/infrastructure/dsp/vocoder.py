"""
相位声码器
在STFT域按 rate 重新采样帧位置：幅度线性插值，相位按各频点瞬时频率累加
"""
import numpy as np

from .spectral import Spectrogram


def phase_vocoder(spec: Spectrogram, rate: float) -> Spectrogram:
    """
    时间伸缩内核

    Args:
        spec: 输入复数谱 (n_frames, n_bins)
        rate: 帧步长，>1 加速（帧数变少），<1 减速

    Returns:
        Spectrogram: 约 ceil(n_frames / rate) 帧的新谱
    """
    if rate <= 0:
        raise ValueError(f"rate 必须 > 0，实际为 {rate}")

    cfg = spec.config
    frames = spec.frames
    n_frames, n_bins = frames.shape
    if n_frames == 0:
        return spec

    time_steps = np.arange(0.0, n_frames, rate)
    # 每个帧移内各频点的期望相位推进 2*pi*k*hop/n_fft
    phase_advance = np.linspace(0.0, np.pi * cfg.hop, n_bins)

    # 末尾补一帧零，保证 step+1 不越界
    padded = np.concatenate([frames, np.zeros((2, n_bins), dtype=frames.dtype)], axis=0)
    base = time_steps.astype(np.int64)
    alpha = (time_steps - base)[:, None]
    left = padded[base]
    right = padded[base + 1]

    magnitude = (1.0 - alpha) * np.abs(left) + alpha * np.abs(right)

    delta = np.angle(right) - np.angle(left) - phase_advance
    delta -= 2.0 * np.pi * np.round(delta / (2.0 * np.pi))
    increments = phase_advance + delta

    # 第 t 个输出帧的相位 = 初始相位 + 前 t 个增量之和
    phase = np.empty_like(magnitude)
    phase[0] = np.angle(frames[0])
    if len(time_steps) > 1:
        phase[1:] = phase[0] + np.cumsum(increments[:-1], axis=0)

    return Spectrogram(frames=magnitude * np.exp(1j * phase), config=cfg)
