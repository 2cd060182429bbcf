"""
特征提取测试
"""
import numpy as np
import pytest

from conftest import make_sine
from core.exceptions import ShapeMismatch
from core.models import AudioClip
from services.features import (
    FEATURE_DIM,
    FeatureConfig,
    FeatureService,
    assemble,
    hz_to_mel,
    mel_filterbank,
    mel_to_hz,
    mfcc,
    rmse_frames,
    zcr_frames,
)

RATE = 22050


def naive_filterbank(n_mels: int, n_fft: int, rate: int) -> np.ndarray:
    """逐元素构造三角滤波器"""
    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    top = to_mel(rate / 2.0)
    edges = [to_hz(top * i / (n_mels + 1)) for i in range(n_mels + 2)]
    bank = np.zeros((n_mels, n_fft // 2 + 1))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        for k in range(n_fft // 2 + 1):
            f = k * rate / n_fft
            if lo <= f <= mid:
                w = (f - lo) / (mid - lo)
            elif mid < f <= hi:
                w = (hi - f) / (hi - mid)
            else:
                w = 0.0
            bank[m, k] = w * 2.0 / (hi - lo)
    return bank


def naive_mfcc(samples: np.ndarray, bank: np.ndarray, n_fft: int = 2048, hop: int = 512, n_mfcc: int = 20):
    """反射填充 + Hann + 朴素DFT + 逐项DCT-II"""
    padded = np.pad(samples, (n_fft // 2, n_fft // 2), mode="reflect")
    n_frames = 1 + len(samples) // hop
    window = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n_fft) / n_fft)
    k = np.arange(n_fft // 2 + 1)
    basis = np.exp(-2j * np.pi * np.outer(np.arange(n_fft), k) / n_fft)
    frames = np.stack([padded[t * hop:t * hop + n_fft] * window for t in range(n_frames)])
    power = np.abs(frames @ basis) ** 2
    log_mel = 10.0 * np.log10(np.maximum(power @ bank.T, 1e-10))

    n_mels = bank.shape[0]
    j = np.arange(n_mels)
    out = np.empty((n_mfcc, n_frames))
    for c in range(n_mfcc):
        scale = np.sqrt(1.0 / n_mels) if c == 0 else np.sqrt(2.0 / n_mels)
        out[c] = scale * log_mel @ np.cos(np.pi * c * (2 * j + 1) / (2 * n_mels))
    return out


def test_mel_scale_round_trip():
    """1000 Hz 约等于 1000 mel，正反变换互逆"""
    assert float(hz_to_mel(1000.0)) == pytest.approx(2595.0 * np.log10(1.0 + 1000.0 / 700.0), rel=1e-12)
    assert float(hz_to_mel(1000.0)) == pytest.approx(1000.0, abs=0.05)
    freqs = np.array([0.0, 250.0, 4000.0, 11025.0])
    np.testing.assert_allclose(mel_to_hz(hz_to_mel(freqs)), freqs, atol=1e-9)


def test_filterbank_shape_and_values():
    """128 x 1025，非负，与逐元素构造一致"""
    cfg = FeatureConfig()
    bank = mel_filterbank(cfg, RATE)
    assert bank.shape == (128, 1025)
    assert np.all(bank >= 0)
    np.testing.assert_allclose(bank, naive_filterbank(128, 2048, RATE), rtol=1e-9, atol=1e-15)


def test_filterbank_rejects_high_fmax():
    with pytest.raises(ValueError):
        mel_filterbank(FeatureConfig(fmax=20000.0), RATE)


def test_mfcc_matches_naive_oracle():
    """20 个规范长度（55125 采样）的随机片段上与朴素实现的差异不超过 1e-6"""
    cfg = FeatureConfig()
    bank = naive_filterbank(128, 2048, RATE)
    rng = np.random.default_rng(2024)
    n = 55125
    t = np.arange(n) / RATE
    for i in range(20):
        samples = 0.3 * np.sin(2 * np.pi * (100 + 150 * i) * t) + 0.05 * rng.standard_normal(n)
        clip = AudioClip(samples=samples, sample_rate=RATE)
        got = mfcc(clip, cfg)
        expected = naive_mfcc(samples, bank)
        assert got.shape == (20, 108)
        assert np.max(np.abs(got - expected)) <= 1e-6


def test_mfcc_of_silence():
    """全零输入：所有对数能量取下限，只有0号系数非零"""
    clip = AudioClip(samples=np.zeros(55125), sample_rate=RATE)
    coeffs = mfcc(clip, FeatureConfig())
    assert coeffs.shape == (20, 108)
    np.testing.assert_allclose(coeffs[0], -100.0 * np.sqrt(128), rtol=1e-12)
    np.testing.assert_allclose(coeffs[1:], 0.0, atol=1e-9)


def test_zcr_and_rmse_hand_cases():
    """交替符号序列的逐帧过零率与能量（含补零的边缘帧）"""
    cfg = FeatureConfig(frame_len=4, hop=4, n_mfcc=2, n_mels=2)
    clip = AudioClip(samples=[1, -1, 1, -1, 1, -1, 1, -1], sample_rate=8000)
    np.testing.assert_allclose(zcr_frames(clip, cfg), [1 / 3, 1.0, 2 / 3])
    np.testing.assert_allclose(rmse_frames(clip, cfg), [np.sqrt(0.5), 1.0, np.sqrt(0.5)])


def test_zcr_bounds_and_constant():
    """常数信号过零率为0，任意信号落在 [0, 1]"""
    cfg = FeatureConfig()
    constant = AudioClip(samples=np.full(5000, 0.25), sample_rate=RATE)
    assert not np.any(zcr_frames(constant, cfg))
    np.testing.assert_allclose(rmse_frames(constant, cfg)[3:-3], 0.25)

    noisy = AudioClip(samples=np.random.default_rng(0).standard_normal(5000), sample_rate=RATE)
    zcr = zcr_frames(noisy, cfg)
    assert zcr.min() >= 0 and zcr.max() <= 1


def test_assemble_layout():
    """ZCR 占 0..107，RMSE 占 108..215，MFCC 系数0 从 216 开始"""
    zcr = np.arange(108.0)
    rmse = np.arange(108.0) + 1000
    coeffs = np.arange(20 * 108.0).reshape(20, 108) + 5000
    vector = assemble(zcr, rmse, coeffs)
    assert len(vector) == FEATURE_DIM
    assert vector.values[0] == 0.0 and vector.values[107] == 107.0
    assert vector.values[108] == 1000.0
    assert vector.values[216] == coeffs[0, 0]
    assert vector.values[216 + 108] == coeffs[1, 0]
    np.testing.assert_array_equal(vector.mfcc, coeffs)


def test_assemble_rejects_mismatched_frames():
    with pytest.raises(ShapeMismatch):
        assemble(np.zeros(10), np.zeros(9), np.zeros((20, 10)))
    with pytest.raises(ShapeMismatch):
        assemble(np.zeros(10), np.zeros(10), np.zeros((20, 11)))


def test_service_extract_dimension_and_determinism():
    """规范化片段得到 2376 维特征，重复提取结果相同"""
    service = FeatureService()
    clip = make_sine(300.0, 2.5)
    first = service.extract(clip)
    second = service.extract(clip)
    assert len(first) == 2376
    assert first.n_frames == 108
    assert service.feature_dim(55125) == 2376
    np.testing.assert_array_equal(first.values, second.values)
