"""
评估指标：混淆矩阵、WA / UA、逐类精确率/召回率/F1
"""
import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from core.exceptions import EmptyDataset
from core.models import NUM_CLASSES, EmotionLabel
from services.neuralnet import ModelSpec, ParamStore, predict

from .models import EvalReport, LabelledSet


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return np.divide(num, den, out=np.zeros_like(num, dtype=np.float64), where=den > 0)


def report_from_confusion(
    confusion: np.ndarray,
    class_names: list[str] | None = None,
) -> EvalReport:
    """
    由混淆矩阵计算评估报告（任意类别数）

    Raises:
        EmptyDataset: 矩阵元素之和为0
    """
    matrix = np.asarray(confusion, dtype=np.int64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"混淆矩阵必须是方阵，实际形状 {matrix.shape}")
    total = matrix.sum()
    if total == 0:
        raise EmptyDataset("没有可评估的样本")

    diagonal = np.diag(matrix).astype(np.float64)
    support = matrix.sum(axis=1)
    predicted = matrix.sum(axis=0)
    recall = _safe_divide(diagonal, support.astype(np.float64))
    precision = _safe_divide(diagonal, predicted.astype(np.float64))
    f1 = _safe_divide(2 * precision * recall, precision + recall)

    if class_names is None:
        n = matrix.shape[0]
        class_names = EmotionLabel.names() if n == NUM_CLASSES else [str(i) for i in range(n)]

    return EvalReport(
        confusion=matrix,
        weighted_accuracy=float(diagonal.sum() / total),
        unweighted_accuracy=float(recall[support > 0].mean()),
        per_class_recall=recall,
        per_class_precision=precision,
        per_class_f1=f1,
        support=support,
        class_names=class_names,
    )


def report_from_predictions(
    y_true: np.ndarray, y_pred: np.ndarray, num_classes: int = NUM_CLASSES
) -> EvalReport:
    """由真实标签与预测标签计算评估报告"""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise EmptyDataset("没有可评估的样本")
    labels = list(range(num_classes))
    report = report_from_confusion(confusion_matrix(y_true, y_pred, labels=labels))
    precision, recall, f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, zero_division=0
    )
    report.per_class_precision = np.asarray(precision, dtype=np.float64)
    report.per_class_recall = np.asarray(recall, dtype=np.float64)
    report.per_class_f1 = np.asarray(f1, dtype=np.float64)
    return report


def evaluate(spec: ModelSpec, params: ParamStore, dataset: LabelledSet, batch_size: int = 256) -> EvalReport:
    """
    推理模式评估（不修改参数）

    Raises:
        EmptyDataset: 数据集为空
    """
    if len(dataset) == 0:
        raise EmptyDataset("评估数据集为空")
    probs = predict(spec, params, dataset.features, batch_size=batch_size)
    return report_from_predictions(dataset.labels, np.argmax(probs, axis=1), spec.num_classes)
