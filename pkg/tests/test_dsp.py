"""
FFT / STFT / 相位声码器测试
"""
import numpy as np
import pytest

from conftest import make_sine
from core.exceptions import NonPowerOfTwo
from infrastructure.dsp import (
    StftConfig,
    fft,
    hann_window,
    ifft,
    istft,
    phase_vocoder,
    stft,
)


def naive_dft(x: np.ndarray) -> np.ndarray:
    n = len(x)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x


def test_hann_window_values():
    """周期Hann窗的取值与和"""
    np.testing.assert_allclose(hann_window(4), [0.0, 0.5, 1.0, 0.5], atol=1e-15)
    for n in (2, 8, 2048):
        assert hann_window(n)[0] == 0.0
    assert abs(hann_window(2048).sum() - 1024.0) < 1e-9
    np.testing.assert_array_equal(hann_window(1), [1.0])


def test_fft_small_cases():
    """冲激与常数序列"""
    np.testing.assert_allclose(fft(np.array([1.0, 0, 0, 0])), [1, 1, 1, 1])
    np.testing.assert_allclose(fft(np.ones(4)), [4, 0, 0, 0], atol=1e-12)


def test_fft_matches_naive_dft():
    """随机256点输入与朴素DFT一致"""
    rng = np.random.default_rng(7)
    x = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    expected = naive_dft(x)
    assert np.max(np.abs(fft(x) - expected)) <= 1e-9 * np.max(np.abs(expected))


def test_fft_inverse_and_parseval():
    """逆变换恒等与 Parseval 等式"""
    rng = np.random.default_rng(3)
    for n in (1, 2, 64, 4096):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        spectrum = fft(x)
        np.testing.assert_allclose(ifft(spectrum), x, rtol=1e-9, atol=1e-9)
        energy = np.sum(np.abs(x) ** 2)
        assert abs(energy - np.sum(np.abs(spectrum) ** 2) / n) <= 1e-6 * energy


def test_fft_rejects_other_lengths():
    """长度不是2的幂时报错"""
    with pytest.raises(NonPowerOfTwo):
        fft(np.ones(6))
    with pytest.raises(NonPowerOfTwo):
        StftConfig(n_fft=1000)


def test_stft_frame_count_and_zero_signal():
    """55125个采样 -> 108帧；全零输入得到全零谱"""
    spec = stft(np.zeros(55125))
    assert spec.n_frames == 108
    assert spec.frames.shape == (108, 1025)
    assert not np.any(spec.frames)


def test_stft_tone_bin():
    """440 Hz 纯音内部帧的最大频点为 41"""
    clip = make_sine(440.0, 2.5)
    peaks = np.argmax(stft(clip.samples).magnitude(), axis=1)
    # 首尾两帧一半来自反射补齐，峰值会偏移一个频点
    assert np.all(peaks[1:-1] == round(440 * 2048 / 22050))


@pytest.mark.parametrize("hop", [256, 512, 1024])
def test_stft_istft_round_trip(hop):
    """内部采样的重建误差不超过 1e-6"""
    rng = np.random.default_rng(hop)
    x = rng.standard_normal(12000)
    cfg = StftConfig(n_fft=2048, hop=hop)
    y = istft(stft(x, cfg), len(x))
    assert np.max(np.abs(y[2048:-2048] - x[2048:-2048])) <= 1e-6


def test_istft_zero_and_truncation():
    """零谱重建为零；更短的 out_len 得到精确前缀"""
    cfg = StftConfig(n_fft=256, hop=64)
    zero = stft(np.zeros(1000), cfg)
    assert not np.any(istft(zero, 1000))

    x = np.random.default_rng(1).standard_normal(1000)
    spec = stft(x, cfg)
    full = istft(spec, 1000)
    np.testing.assert_array_equal(istft(spec, 600), full[:600])


def test_phase_vocoder_frame_counts():
    """rate 1 帧数不变，rate 0.5 帧数约翻倍"""
    spec = stft(np.random.default_rng(0).standard_normal(100 * 512 - 1))
    assert spec.n_frames == 100
    assert phase_vocoder(spec, 1.0).n_frames == 100
    assert abs(phase_vocoder(spec, 0.5).n_frames - 200) <= 1


@pytest.mark.parametrize("rate", [0.5, 0.9, 1.1, 2.0])
def test_phase_vocoder_keeps_tone_bin(rate):
    """稳态纯音伸缩后主频点不变"""
    spec = stft(make_sine(440.0, 2.5).samples)
    stretched = phase_vocoder(spec, rate)
    interior = stretched.magnitude()[2:-2]
    assert np.all(np.argmax(interior, axis=1) == 41)
