"""
音频规范化
带限重采样与固定窗口裁剪/补零
"""
import numpy as np

from core.models import AudioClip, ClipWindow

# 窗函数化 sinc 插值：每侧32个过零点，Kaiser窗
SINC_TAPS = 32
KAISER_BETA = 8.6
_CHUNK = 4096


def _kaiser(x: np.ndarray) -> np.ndarray:
    """归一化到 [-1, 1] 支撑区间上的Kaiser窗"""
    inside = np.clip(1.0 - x * x, 0.0, None)
    return np.i0(KAISER_BETA * np.sqrt(inside)) / np.i0(KAISER_BETA)


def resample_array(samples: np.ndarray, ratio: float, out_len: int | None = None) -> np.ndarray:
    """
    按比例 ratio = 目标率/源率 做带限插值

    降采样时截止频率随 ratio 缩小，核宽度相应展宽

    Args:
        samples: 输入波形
        ratio: 目标采样率与源采样率之比
        out_len: 输出长度，默认 round(len * ratio)

    Returns:
        np.ndarray: 重采样后的波形
    """
    if ratio <= 0:
        raise ValueError(f"重采样比例必须 > 0，实际为 {ratio}")
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if out_len is None:
        out_len = int(round(n * ratio))
    if n == 0 or out_len == 0:
        return np.zeros(out_len)

    cutoff = min(1.0, ratio)
    half_width = SINC_TAPS / cutoff
    offsets = np.arange(int(np.ceil(2 * half_width)) + 1)

    output = np.empty(out_len)
    for start in range(0, out_len, _CHUNK):
        positions = np.arange(start, min(start + _CHUNK, out_len)) / ratio
        first = np.floor(positions - half_width).astype(np.int64) + 1
        index = first[:, None] + offsets[None, :]
        distance = positions[:, None] - index
        kernel = cutoff * np.sinc(cutoff * distance) * _kaiser(distance / half_width)
        valid = (index >= 0) & (index < n) & (np.abs(distance) < half_width)
        taps = samples[np.clip(index, 0, n - 1)]
        output[start:start + len(positions)] = np.sum(np.where(valid, taps * kernel, 0.0), axis=1)
    return output


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """
    重采样到目标采样率，采样率一致时原样返回

    输出长度 = round(len * target_rate / source_rate)
    """
    if target_rate <= 0:
        raise ValueError(f"目标采样率必须 > 0，实际为 {target_rate}")
    if target_rate == clip.sample_rate:
        return clip
    samples = resample_array(clip.samples, target_rate / clip.sample_rate)
    return AudioClip(samples=samples, sample_rate=target_rate)


def fit_length(samples: np.ndarray, n_samples: int) -> np.ndarray:
    """裁剪或在尾部补零到恰好 n_samples 个采样"""
    if len(samples) >= n_samples:
        return samples[:n_samples]
    return np.pad(samples, (0, n_samples - len(samples)))


def fix_window(clip: AudioClip, window: ClipWindow) -> AudioClip:
    """
    跳过前 offset_s 秒，再裁剪/补零到 round(duration_s * target_rate) 个采样

    短片段只补零，不会被拒绝
    """
    if clip.sample_rate != window.target_rate:
        raise ValueError(
            f"片段采样率 {clip.sample_rate} 与窗口目标采样率 {window.target_rate} 不一致"
        )
    trimmed = clip.samples[window.offset_samples:]
    if window.offset_samples == 0 and len(trimmed) == window.n_samples:
        return clip
    return clip.with_samples(fit_length(trimmed, window.n_samples))


def canonicalize(clip: AudioClip, window: ClipWindow) -> AudioClip:
    """规范化流水线：重采样到目标采样率后固定窗口"""
    return fix_window(resample(clip, window.target_rate), window)
