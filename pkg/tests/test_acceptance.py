"""
合成语料过拟合验收（慢速，默认不运行：pytest -m slow）
"""
import pytest

from core.application import PipelineBuilder
from infrastructure.config import ModelConfig, PipelineConfig, TrainConfig
from services.datastore import FeatureCache, generate_corpus


@pytest.mark.slow
def test_synthetic_corpus_overfit(tmp_path):
    """140 个纯音片段：增强 -> 特征 -> 训练，训练集 >= 95%，留出集 >= 80%"""
    config = PipelineConfig(
        model=ModelConfig(conv_filters=(32, 64, 32), lstm_units=(32, 32), dense_units=(64, 32, 16)),
        train=TrainConfig(max_epochs=200, batch_size=32, early_stop_patience=20, seed=1),
    )
    pipeline = PipelineBuilder.create(config)
    entries = generate_corpus(tmp_path / "corpus", clips_per_class=20, seed=0)
    records = pipeline.extract(entries, seed=0, augment=True)
    assert len(records) == 1400

    service = pipeline.training
    data = service.prepare(FeatureCache(records=records, dim=len(records[0].values)))
    model = service.fit(data)

    train_report = service.evaluate(model, data.train)
    test_report = service.evaluate(model, data.test)
    assert train_report.weighted_accuracy >= 0.95, train_report.summary_line()
    assert test_report.weighted_accuracy >= 0.80, test_report.summary_line()
