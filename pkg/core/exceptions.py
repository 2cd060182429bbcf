"""
统一异常定义
库代码只负责抛出，CLI层负责把异常映射为退出码
"""


class EmoAugError(Exception):
    """所有流水线异常的基类"""

    exit_code: int = 1

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{message}: {path}" if path else message)


# ---- 用法 / 清单错误 (exit 2) ----

class UsageError(EmoAugError):
    """参数或配置不合法"""
    exit_code = 2


class ManifestError(EmoAugError):
    """数据清单错误"""
    exit_code = 2


class BadHeader(ManifestError):
    """清单表头不是 path,label,clip_id"""


class UnknownLabel(ManifestError):
    """标签不在七类情感之内"""


class DuplicatePath(ManifestError):
    """同一清单中路径重复"""


class BadFilename(ManifestError):
    """RAVDESS文件名字段数量不对"""


class UnknownEmotionCode(ManifestError):
    """RAVDESS情感编码不在对照表中"""


class EmptyDataset(EmoAugError):
    """数据集为空"""
    exit_code = 2


# ---- 音频错误 (exit 3) ----

class AudioError(EmoAugError):
    """音频读取/写入错误"""
    exit_code = 3


class MalformedWav(AudioError):
    """RIFF/WAVE 头或块结构损坏"""


class UnsupportedEncoding(AudioError):
    """不支持的编码（压缩格式、24位等）"""


class EmptyAudio(AudioError):
    """音频没有任何采样帧"""


# ---- 覆盖保护 (exit 4) ----

class OverwriteRefused(EmoAugError):
    """目标文件已存在且未指定 --force"""
    exit_code = 4


# ---- 训练发散 (exit 5) ----

class TrainingDiverged(EmoAugError):
    """训练损失出现 NaN/Inf"""
    exit_code = 5

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"第 {epoch} 轮训练损失发散 (loss={loss})")


# ---- 检查点 / 缓存格式错误 (exit 6) ----

class CheckpointError(EmoAugError):
    """检查点与模型结构不匹配或文件损坏"""
    exit_code = 6


class FormatError(EmoAugError):
    """二进制格式错误的公共基类"""
    exit_code = 2


class BadMagic(FormatError):
    """魔数不匹配"""


class VersionMismatch(FormatError):
    """格式版本不支持"""


class TruncatedFile(FormatError):
    """文件被截断"""


class DimMismatch(FormatError):
    """特征维度不匹配"""


# ---- 数值计算错误 ----

class NonPowerOfTwo(EmoAugError):
    """FFT长度不是2的幂"""


class ShiftOutOfRange(EmoAugError):
    """时间平移超出允许范围"""


class ShapeMismatch(EmoAugError):
    """张量或特征形状不匹配"""


class NonFiniteActivation(EmoAugError):
    """前向传播中出现 NaN/Inf"""
