"""
神经网络服务模块
纯 numpy 实现的 Conv1D-LSTM 分类网络
"""
from .checkpoint import Checkpoint, load_checkpoint, read_activation, save_checkpoint
from .gradcheck import GradCheckResult, gradient_check
from .layers import LSTM, BatchNorm, Conv1D, Dense, Dropout, MaxPool1D, elu, relu, softmax
from .models import Activation, ForwardResult, LayerSummary, ModelConfig, ModelSpec, ParamStore
from .network import (
    backward,
    build_model,
    build_spec,
    cross_entropy,
    forward,
    init_params,
    param_count,
    predict,
)
from .optim import AdamState, adam_step

__all__ = [
    "LSTM",
    "Activation",
    "AdamState",
    "BatchNorm",
    "Checkpoint",
    "Conv1D",
    "Dense",
    "Dropout",
    "ForwardResult",
    "GradCheckResult",
    "LayerSummary",
    "MaxPool1D",
    "ModelConfig",
    "ModelSpec",
    "ParamStore",
    "adam_step",
    "backward",
    "build_model",
    "build_spec",
    "cross_entropy",
    "elu",
    "forward",
    "gradient_check",
    "init_params",
    "load_checkpoint",
    "param_count",
    "predict",
    "read_activation",
    "relu",
    "save_checkpoint",
    "softmax",
]
