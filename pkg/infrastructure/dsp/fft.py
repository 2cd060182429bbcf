"""
基2迭代FFT
沿最后一个轴批量计算，长度必须是2的幂
"""
from functools import lru_cache

import numpy as np

from core.exceptions import NonPowerOfTwo


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> np.ndarray:
    levels = n.bit_length() - 1
    index = np.arange(n)
    reversed_index = np.zeros(n, dtype=np.int64)
    for bit in range(levels):
        reversed_index |= ((index >> bit) & 1) << (levels - 1 - bit)
    reversed_index.setflags(write=False)
    return reversed_index


@lru_cache(maxsize=64)
def _twiddles(size: int) -> np.ndarray:
    factors = np.exp(-2j * np.pi * np.arange(size // 2) / size)
    factors.setflags(write=False)
    return factors


def fft(x: np.ndarray) -> np.ndarray:
    """
    非归一化正向DFT: X[k] = sum_n x[n] * exp(-2*pi*i*k*n/N)

    Args:
        x: 复数（或实数）数组，最后一维长度为2的幂

    Returns:
        np.ndarray: complex128 频谱，形状与输入相同

    Raises:
        NonPowerOfTwo: 长度不是2的幂
    """
    x = np.asarray(x)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise NonPowerOfTwo(f"FFT长度必须是2的幂，实际为 {n}")

    # 每次调用都分配独立的工作缓冲区
    out = np.array(x[..., _bit_reversal(n)], dtype=np.complex128, order="C")
    lead = out.shape[:-1]
    size = 2
    while size <= n:
        half = size // 2
        blocks = out.reshape(*lead, n // size, size)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * _twiddles(size)
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        size *= 2
    return out


def ifft(spectrum: np.ndarray) -> np.ndarray:
    """逆DFT，带 1/N 归一化"""
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    n = spectrum.shape[-1]
    return np.conj(fft(np.conj(spectrum))) / n


def rfft(x: np.ndarray) -> np.ndarray:
    """实信号FFT，仅保留 0..N/2 频点"""
    n = np.shape(x)[-1]
    return fft(x)[..., : n // 2 + 1]


def irfft(half_spectrum: np.ndarray, n: int) -> np.ndarray:
    """由 0..N/2 频点按共轭对称补全后做逆变换，返回实信号"""
    half_spectrum = np.asarray(half_spectrum, dtype=np.complex128)
    mirrored = np.conj(half_spectrum[..., n // 2 - 1:0:-1])
    full = np.concatenate([half_spectrum, mirrored], axis=-1)
    return ifft(full).real
