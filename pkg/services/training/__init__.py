"""
训练服务模块
训练循环、学习率调度、早停与评估指标
"""
from .callbacks import EarlyStopping, PlateauScheduler, early_stop_check, lr_schedule_step
from .metrics import evaluate, report_from_confusion, report_from_predictions
from .models import (
    EpochRecord,
    EvalReport,
    LabelledSet,
    Standardizer,
    StopDecision,
    TrainConfig,
    TrainHistory,
)
from .reports import (
    CLASS_REPORT_FILE,
    COMPARISON_FILE,
    CONFUSION_FILE,
    write_classification_report,
    write_comparison_csv,
    write_confusion_csv,
    write_history_csv,
)
from .service import PreparedData, TrainedModel, TrainingService, train

__all__ = [
    "CLASS_REPORT_FILE",
    "COMPARISON_FILE",
    "CONFUSION_FILE",
    "EarlyStopping",
    "EpochRecord",
    "EvalReport",
    "LabelledSet",
    "PlateauScheduler",
    "PreparedData",
    "Standardizer",
    "StopDecision",
    "TrainConfig",
    "TrainHistory",
    "TrainedModel",
    "TrainingService",
    "early_stop_check",
    "evaluate",
    "lr_schedule_step",
    "report_from_confusion",
    "report_from_predictions",
    "train",
    "write_classification_report",
    "write_comparison_csv",
    "write_confusion_csv",
    "write_history_csv",
]
