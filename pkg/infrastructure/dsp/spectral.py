"""
短时傅里叶分析
窗函数、STFT 与加权重叠相加的逆变换
"""
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import NonPowerOfTwo, ShapeMismatch

from .fft import irfft, is_power_of_two, rfft

DEFAULT_N_FFT = 2048
DEFAULT_HOP = 512


def hann_window(n: int) -> np.ndarray:
    """
    周期Hann窗 w[i] = 0.5 - 0.5*cos(2*pi*i/n)

    n == 1 时返回 [1.0]
    """
    if n < 1:
        raise ValueError(f"窗长必须 >= 1，实际为 {n}")
    if n == 1:
        return np.ones(1)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


@dataclass(frozen=True, eq=False)
class StftConfig:
    """STFT参数：帧长、帧移、窗函数和是否居中"""
    n_fft: int = DEFAULT_N_FFT
    hop: int = DEFAULT_HOP
    window: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]
    center: bool = True

    def __post_init__(self) -> None:
        if not is_power_of_two(self.n_fft):
            raise NonPowerOfTwo(f"n_fft 必须是2的幂，实际为 {self.n_fft}")
        if not 0 < self.hop <= self.n_fft:
            raise ValueError(f"hop 必须在 (0, n_fft] 内，实际为 {self.hop}")
        if self.window is None:
            object.__setattr__(self, "window", hann_window(self.n_fft))
        if len(self.window) != self.n_fft:
            raise ShapeMismatch(f"窗长 {len(self.window)} 与 n_fft {self.n_fft} 不一致")

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """复数谱：frames 形状为 (n_frames, n_fft/2 + 1)"""
    frames: np.ndarray
    config: StftConfig

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    def magnitude(self) -> np.ndarray:
        return np.abs(self.frames)

    def power(self) -> np.ndarray:
        return np.abs(self.frames) ** 2


def frame_signal(signal: np.ndarray, frame_len: int, hop: int, pad_mode: str = "reflect") -> np.ndarray:
    """
    居中分帧：两端各填充 frame_len/2，帧数为 1 + len // hop

    Returns:
        np.ndarray: 形状 (n_frames, frame_len) 的只读视图
    """
    signal = np.asarray(signal, dtype=np.float64)
    half = frame_len // 2
    # 信号太短时反射填充无定义，退化为补零
    if pad_mode == "reflect" and len(signal) <= half:
        pad_mode = "constant"
    padded = np.pad(signal, (half, half), mode=pad_mode)
    n_frames = 1 + len(signal) // hop
    windows = np.lib.stride_tricks.sliding_window_view(padded, frame_len)
    return windows[::hop][:n_frames]


def stft(signal: np.ndarray, cfg: StftConfig | None = None) -> Spectrogram:
    """
    短时傅里叶变换

    Args:
        signal: 非空实信号
        cfg: STFT配置，默认 n_fft=2048, hop=512, 周期Hann窗, 居中

    Returns:
        Spectrogram: 复数谱
    """
    cfg = cfg or StftConfig()
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size == 0:
        raise ValueError("STFT输入信号不能为空")

    if cfg.center:
        frames = frame_signal(signal, cfg.n_fft, cfg.hop)
    else:
        if len(signal) < cfg.n_fft:
            signal = np.pad(signal, (0, cfg.n_fft - len(signal)))
        frames = np.lib.stride_tricks.sliding_window_view(signal, cfg.n_fft)[:: cfg.hop]

    return Spectrogram(frames=rfft(frames * cfg.window), config=cfg)


def istft(spec: Spectrogram, out_len: int) -> np.ndarray:
    """
    加权重叠相加逆变换，按窗平方和归一化

    Args:
        spec: 复数谱
        out_len: 输出长度，自然长度之外截断或在尾部补零

    Returns:
        np.ndarray: 重建的实信号
    """
    cfg = spec.config
    n_frames = spec.n_frames
    window = cfg.window
    total = cfg.n_fft + cfg.hop * max(n_frames - 1, 0)

    output = np.zeros(total)
    norm = np.zeros(total)
    if n_frames:
        frames = irfft(spec.frames, cfg.n_fft) * window
        window_sq = window**2
        for t in range(n_frames):
            start = t * cfg.hop
            output[start:start + cfg.n_fft] += frames[t]
            norm[start:start + cfg.n_fft] += window_sq

    nonzero = norm > 1e-10
    output[nonzero] /= norm[nonzero]

    if cfg.center:
        output = output[cfg.n_fft // 2:]
    if len(output) >= out_len:
        return output[:out_len].copy()
    return np.pad(output, (0, out_len - len(output)))
