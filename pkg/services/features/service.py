"""
特征提取服务实现
逐帧 ZCR / RMSE / MFCC，按特征优先顺序堆叠成定长向量
"""
import numpy as np
from scipy.fft import dct

from core.exceptions import ShapeMismatch
from core.models import AudioClip
from infrastructure.dsp import StftConfig, frame_signal, stft

from .models import FeatureConfig, FeatureVector


def hz_to_mel(freq: np.ndarray | float) -> np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def _frames(clip: AudioClip, cfg: FeatureConfig) -> np.ndarray:
    # 时域特征使用补零居中分帧，边缘帧包含填充的零
    return frame_signal(clip.samples, cfg.frame_len, cfg.hop, pad_mode="constant")


def zcr_frames(clip: AudioClip, cfg: FeatureConfig) -> np.ndarray:
    """
    逐帧过零率：相邻采样对中严格变号的比例，0 视为非负

    Returns:
        np.ndarray: [0, 1] 内的逐帧过零率
    """
    non_negative = _frames(clip, cfg) >= 0
    return np.mean(non_negative[:, 1:] != non_negative[:, :-1], axis=1)


def rmse_frames(clip: AudioClip, cfg: FeatureConfig) -> np.ndarray:
    """逐帧均方根能量 sqrt(mean(x^2))"""
    return np.sqrt(np.mean(_frames(clip, cfg) ** 2, axis=1))


def mel_filterbank(cfg: FeatureConfig, sample_rate: int) -> np.ndarray:
    """
    三角形Mel滤波器组，中心频率在Mel刻度上等距，按面积归一化

    Returns:
        np.ndarray: 形状 (n_mels, frame_len/2 + 1)
    """
    nyquist = sample_rate / 2.0
    fmax = nyquist if cfg.fmax is None else cfg.fmax
    if fmax > nyquist:
        raise ValueError(f"fmax {fmax} 超过奈奎斯特频率 {nyquist}")

    freqs = np.arange(cfg.frame_len // 2 + 1) * sample_rate / cfg.frame_len
    edges = mel_to_hz(np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(fmax), cfg.n_mels + 2))
    lower, centre, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]

    rising = (freqs - lower) / (centre - lower)
    falling = (upper - freqs) / (upper - centre)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    return weights * (2.0 / (upper - lower))


def mfcc(
    clip: AudioClip, cfg: FeatureConfig, filterbank: np.ndarray | None = None
) -> np.ndarray:
    """
    功率谱 -> Mel滤波 -> 10*log10(max(., floor)) -> 正交DCT-II -> 前 n_mfcc 个系数

    Returns:
        np.ndarray: 形状 (n_mfcc, n_frames)
    """
    if filterbank is None:
        filterbank = mel_filterbank(cfg, clip.sample_rate)
    spec = stft(clip.samples, StftConfig(n_fft=cfg.frame_len, hop=cfg.hop))
    mel_power = spec.power() @ filterbank.T
    log_mel = 10.0 * np.log10(np.maximum(mel_power, cfg.log_floor))
    cepstrum = dct(log_mel, type=2, norm="ortho", axis=1)
    return cepstrum[:, : cfg.n_mfcc].T


def assemble(zcr: np.ndarray, rmse: np.ndarray, mfcc_matrix: np.ndarray) -> FeatureVector:
    """
    拼接为 [ZCR | RMSE | MFCC按系数优先]

    Raises:
        ShapeMismatch: 分量形状不一致
    """
    zcr = np.asarray(zcr, dtype=np.float64)
    rmse = np.asarray(rmse, dtype=np.float64)
    mfcc_matrix = np.asarray(mfcc_matrix, dtype=np.float64)
    n_frames = zcr.shape[0] if zcr.ndim == 1 else -1
    if zcr.ndim != 1 or rmse.shape != (n_frames,):
        raise ShapeMismatch(f"ZCR {zcr.shape} 与 RMSE {rmse.shape} 帧数不一致")
    if mfcc_matrix.ndim != 2 or mfcc_matrix.shape[1] != n_frames:
        raise ShapeMismatch(f"MFCC 形状 {mfcc_matrix.shape} 与帧数 {n_frames} 不一致")
    values = np.concatenate([zcr, rmse, mfcc_matrix.reshape(-1)])
    return FeatureVector(values=values, n_frames=n_frames)


class FeatureService:
    """
    特征提取服务类
    确定性地把规范化片段映射为定长特征向量
    """

    def __init__(self, config: FeatureConfig | None = None):
        self.config = config or FeatureConfig()
        self._filterbanks: dict[int, np.ndarray] = {}
        self.service_name = "features"

    def filterbank(self, sample_rate: int) -> np.ndarray:
        if sample_rate not in self._filterbanks:
            self._filterbanks[sample_rate] = mel_filterbank(self.config, sample_rate)
        return self._filterbanks[sample_rate]

    def feature_dim(self, n_samples: int) -> int:
        return self.config.feature_dim(n_samples)

    def extract(self, clip: AudioClip) -> FeatureVector:
        """
        提取单个片段的特征向量

        Args:
            clip: 规范化后的片段（55125 个采样时得到 2376 维）

        Returns:
            FeatureVector: 堆叠后的特征
        """
        cfg = self.config
        return assemble(
            zcr_frames(clip, cfg),
            rmse_frames(clip, cfg),
            mfcc(clip, cfg, self.filterbank(clip.sample_rate)),
        )
