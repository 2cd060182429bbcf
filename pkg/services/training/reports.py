"""
训练历史与评估报告的 CSV 导出
"""
from pathlib import Path

import pandas as pd

from .models import EvalReport, TrainHistory

CONFUSION_FILE = "confusion.csv"
CLASS_REPORT_FILE = "classification_report.csv"
COMPARISON_FILE = "comparison.csv"


def _prepare(path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_history_csv(history: TrainHistory, path: str | Path) -> Path:
    """列：epoch,train_loss,train_acc,val_loss,val_acc,lr"""
    target = _prepare(path)
    history.to_frame().to_csv(target, index=False)
    return target


def write_confusion_csv(report: EvalReport, path: str | Path) -> Path:
    """
    混淆矩阵 CSV：首行/首列为类别名（行真实、列预测），末尾追加 wa=<v> ua=<v>
    """
    target = _prepare(path)
    frame = pd.DataFrame(report.confusion, index=report.class_names, columns=report.class_names)
    frame.to_csv(target, index_label="true\\pred")
    with open(target, "a", encoding="utf-8") as f:
        f.write(report.summary_line() + "\n")
    return target


def write_classification_report(report: EvalReport, path: str | Path) -> Path:
    """列：class,support,precision,recall,f1"""
    target = _prepare(path)
    pd.DataFrame(
        {
            "class": report.class_names,
            "support": report.support,
            "precision": report.per_class_precision,
            "recall": report.per_class_recall,
            "f1": report.per_class_f1,
        }
    ).to_csv(target, index=False)
    return target


def write_comparison_csv(rows: list[dict], path: str | Path) -> Path:
    """列：activation,best_epoch,val_acc,wa,ua"""
    target = _prepare(path)
    pd.DataFrame(rows, columns=["activation", "best_epoch", "val_acc", "wa", "ua"]).to_csv(target, index=False)
    return target
