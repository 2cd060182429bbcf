"""
训练、调度、早停与评估测试
"""
import numpy as np
import pandas as pd
import pytest
from sklearn.preprocessing import StandardScaler

from core.exceptions import EmptyDataset, TrainingDiverged
from services.datastore import FeatureCache, FeatureRecord
from services.neuralnet import build_model
from services.training import (
    EarlyStopping,
    LabelledSet,
    PlateauScheduler,
    Standardizer,
    StopDecision,
    TrainConfig,
    TrainingService,
    early_stop_check,
    evaluate,
    lr_schedule_step,
    report_from_confusion,
    report_from_predictions,
    train,
    write_classification_report,
    write_confusion_csv,
    write_history_csv,
)


def toy_set(n: int, dim: int = 32, seed: int = 0) -> LabelledSet:
    """按类别平移均值的高斯特征"""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 7
    features = rng.standard_normal((n, dim)) * 0.3 + labels[:, None] * 0.5
    return LabelledSet(features=features.astype(np.float32), labels=labels)


def toy_cache(clips_per_class: int = 10, variants: int = 2, dim: int = 8) -> FeatureCache:
    rng = np.random.default_rng(1)
    records = [
        FeatureRecord(f"c{label}_{i}", v, label, rng.standard_normal(dim).astype(np.float32))
        for label in range(7)
        for i in range(clips_per_class)
        for v in range(variants)
    ]
    return FeatureCache(records=records, dim=dim)


# ---- 学习率调度与早停 ----

def test_plateau_single_reduction():
    """一次提升后连续5轮无提升，学习率减半为 0.0005"""
    cfg = TrainConfig()
    assert lr_schedule_step([0.5] + [0.5] * 4, cfg) == pytest.approx(0.001)
    assert lr_schedule_step([0.5] + [0.5] * 5, cfg) == pytest.approx(0.0005)


def test_plateau_repeated_reductions():
    """连续25轮无提升：每5轮减半一次，共5次"""
    assert lr_schedule_step([0.5] + [0.5] * 25, TrainConfig()) == pytest.approx(3.125e-5)


def test_plateau_respects_min_lr_and_delta():
    cfg = TrainConfig(lr0=1e-5, min_lr=4e-6)
    assert lr_schedule_step([0.5] * 30, cfg) == pytest.approx(4e-6)

    # 小于 min_delta 的增长不算提升
    scheduler = PlateauScheduler(TrainConfig())
    for acc in [0.5, 0.50005, 0.50009, 0.50001, 0.5, 0.50002]:
        lr = scheduler.update(acc)
    assert lr == pytest.approx(0.0005)


def test_early_stop_at_best_plus_patience():
    """峰值后持平，停止轮次 = 最佳轮次 + 10"""
    accs = [0.1, 0.2, 0.3] + [0.3] * 10
    cfg = TrainConfig()
    assert early_stop_check(accs[:12], cfg) is StopDecision.CONTINUE
    assert early_stop_check(accs, cfg) is StopDecision.STOP

    stopper = EarlyStopping(cfg)
    for epoch, acc in enumerate(accs):
        stopper.update(epoch, acc)
        if stopper.should_stop:
            break
    assert stopper.best_epoch == 2
    assert epoch == stopper.best_epoch + 10


def test_schedule_requires_history():
    with pytest.raises(ValueError):
        lr_schedule_step([], TrainConfig())
    with pytest.raises(ValueError):
        early_stop_check([], TrainConfig())


# ---- 评估指标 ----

@pytest.mark.parametrize(
    "confusion, wa, ua",
    [
        ([[8, 2], [4, 6]], 0.7, 0.7),
        ([[9, 1], [8, 2]], 0.55, 0.55),
        ([[18, 2], [4, 6]], 0.8, 0.75),
    ],
)
def test_wa_ua_from_confusion(confusion, wa, ua):
    report = report_from_confusion(np.array(confusion))
    assert report.weighted_accuracy == pytest.approx(wa)
    assert report.unweighted_accuracy == pytest.approx(ua)
    assert report.class_names == ["0", "1"]
    assert report.summary_line() == f"wa={wa:.6f} ua={ua:.6f}"


def test_constant_predictor_scores():
    """各类均衡时全部预测为类别0，UA 为 1/7"""
    y_true = np.repeat(np.arange(7), 5)
    report = report_from_predictions(y_true, np.zeros_like(y_true))
    assert report.weighted_accuracy == pytest.approx(1 / 7)
    assert report.unweighted_accuracy == pytest.approx(1 / 7)
    assert report.per_class_recall[0] == 1.0
    assert report.per_class_precision[0] == pytest.approx(1 / 7)
    assert report.class_names[0] == "neutral"


def test_ua_ignores_absent_classes():
    """没有样本的类别不参与 UA"""
    report = report_from_predictions(np.array([0, 0, 1, 1]), np.array([0, 0, 1, 0]))
    assert report.unweighted_accuracy == pytest.approx(0.75)
    assert report.support.tolist() == [2, 2, 0, 0, 0, 0, 0]


def test_empty_evaluation_fails():
    with pytest.raises(EmptyDataset):
        report_from_confusion(np.zeros((7, 7), dtype=int))
    with pytest.raises(EmptyDataset):
        report_from_predictions(np.array([]), np.array([]))


# ---- 标准化与数据准备 ----

def test_standardizer_constant_columns():
    features = np.array([[1.0, 5.0], [3.0, 5.0]])
    standardizer = Standardizer.fit(features)
    np.testing.assert_array_equal(standardizer.std, [1.0, 1.0])
    np.testing.assert_allclose(standardizer.apply(features), [[-1.0, 0.0], [1.0, 0.0]])


def test_standardizer_matches_standard_scaler():
    """统计量与 StandardScaler 一致，变换结果相同"""
    rng = np.random.default_rng(4)
    features = rng.standard_normal((50, 6)) * np.arange(1, 7) + 3.0
    standardizer = Standardizer.fit(features)
    scaler = StandardScaler().fit(features)
    np.testing.assert_allclose(standardizer.mean, scaler.mean_, rtol=1e-6)
    np.testing.assert_allclose(standardizer.std, scaler.scale_, rtol=1e-6)
    np.testing.assert_allclose(standardizer.apply(features), scaler.transform(features), atol=1e-5)


def test_prepare_split_by_clip():
    """验证集含全部变体，测试集只含变体0，三者按片段互不相交"""
    service = TrainingService(TrainConfig(seed=3))
    data = service.prepare(toy_cache())
    assert len(data.train) == 7 * 8 * 2
    assert len(data.val) == 7 * 1 * 2
    assert len(data.test) == 7
    split = data.split
    assert not (split.train & split.val or split.train & split.test or split.val & split.test)
    np.testing.assert_allclose(data.train.features.mean(axis=0), 0.0, atol=1e-5)


def test_prepare_falls_back_when_val_and_test_empty():
    service = TrainingService(TrainConfig())
    data = service.prepare(toy_cache(clips_per_class=1, variants=3))
    assert len(data.val) == len(data.train) == 21
    assert len(data.test) == 7


def test_prepare_rejects_empty_cache():
    with pytest.raises(EmptyDataset):
        TrainingService().prepare(FeatureCache(records=[], dim=8))


# ---- 训练循环 ----

def test_single_batch_training_runs(mini_model_config):
    """数据量小于一个批次时每轮只更新一次"""
    spec, params = build_model("relu", seed=0, config=mini_model_config)
    cfg = TrainConfig(max_epochs=2)
    best, history = train(spec, params, toy_set(14), toy_set(7, seed=1), cfg)
    assert len(history) == 2
    assert history.lrs() == [0.001, 0.001]
    assert 0 <= history.best_epoch < 2
    assert np.isfinite(history.records[-1].train_loss)


def test_training_is_deterministic(mini_model_config):
    """相同种子两次训练得到相同历史与参数"""
    cfg = TrainConfig(max_epochs=3, batch_size=8, seed=9)
    runs = []
    for _ in range(2):
        spec, params = build_model("elu", seed=2, config=mini_model_config)
        runs.append(train(spec, params, toy_set(28), toy_set(14, seed=1), cfg))
    (best_a, hist_a), (best_b, hist_b) = runs
    assert hist_a.model_dump() == hist_b.model_dump()
    for (_, _, a), (_, _, b) in zip(best_a.items(), best_b.items()):
        np.testing.assert_array_equal(a, b)


def test_best_snapshot_is_returned(mini_model_config):
    """返回参数在验证集上的准确率等于历史中的最佳验证准确率"""
    spec, params = build_model("relu", seed=1, config=mini_model_config)
    val = toy_set(21, seed=4)
    seen = []
    best, history = train(spec, params, toy_set(42), val, TrainConfig(max_epochs=5, batch_size=16), seen.append)
    assert len(seen) == len(history) == 5
    assert evaluate(spec, best, val).weighted_accuracy == pytest.approx(history.best_val_acc)
    assert history.best_val_acc == max(history.val_accuracies())


def test_divergence_and_empty_sets(mini_model_config):
    spec, params = build_model("relu", seed=0, config=mini_model_config)
    bad = toy_set(7)
    bad.features[0, 0] = np.inf
    with pytest.raises(TrainingDiverged):
        train(spec, params, bad, toy_set(7), TrainConfig(max_epochs=1))
    empty = LabelledSet(features=np.zeros((0, 32), dtype=np.float32), labels=np.zeros(0))
    with pytest.raises(EmptyDataset):
        train(spec, params, empty, toy_set(7), TrainConfig(max_epochs=1))


def test_service_fit_uses_cache_dimension(mini_model_config):
    service = TrainingService(TrainConfig(max_epochs=1), mini_model_config)
    data = service.prepare(toy_cache(dim=32))
    model = service.fit(data, conv_activation="elu")
    assert model.spec.feature_dim == 32
    assert model.spec.conv_activation.value == "elu"
    report = service.evaluate(model, data.test)
    assert report.total == 7


# ---- CSV 导出 ----

def test_report_writers(tmp_path, mini_model_config):
    spec, params = build_model("relu", seed=0, config=mini_model_config)
    _, history = train(spec, params, toy_set(14), toy_set(7), TrainConfig(max_epochs=2))
    frame = pd.read_csv(write_history_csv(history, tmp_path / "history.csv"))
    assert list(frame.columns) == ["epoch", "train_loss", "train_acc", "val_loss", "val_acc", "lr"]
    assert frame["epoch"].tolist() == [0, 1]

    report = report_from_predictions(np.repeat(np.arange(7), 2), np.repeat(np.arange(7), 2))
    lines = write_confusion_csv(report, tmp_path / "reports" / "confusion.csv").read_text().splitlines()
    assert lines[0].split(",") == ["true\\pred"] + report.class_names
    assert lines[1].startswith("neutral,2,0")
    assert lines[-1] == "wa=1.000000 ua=1.000000"

    classes = pd.read_csv(write_classification_report(report, tmp_path / "classes.csv"))
    assert classes["f1"].tolist() == [1.0] * 7
