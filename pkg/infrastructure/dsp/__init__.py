"""
频谱计算模块
包含FFT、STFT/ISTFT和相位声码器，供增强与特征提取共用
"""
from .fft import fft, ifft, irfft, is_power_of_two, rfft
from .spectral import Spectrogram, StftConfig, frame_signal, hann_window, istft, stft
from .vocoder import phase_vocoder

__all__ = [
    "Spectrogram",
    "StftConfig",
    "fft",
    "frame_signal",
    "hann_window",
    "ifft",
    "irfft",
    "is_power_of_two",
    "istft",
    "phase_vocoder",
    "rfft",
    "stft",
]
