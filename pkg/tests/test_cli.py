"""
命令行端到端测试（合成语料 + 窄网络）
"""
import json
import shutil

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from interfaces.cli.commands import cli
from services.datastore import FeatureRecord, read_cache, write_cache

SMALL_CONFIG = {
    "system": {"log_level": "WARNING"},
    "model": {"conv_filters": [8, 8, 8], "lstm_units": [8, 8], "dense_units": [16, 8, 8]},
    "train": {"max_epochs": 1, "batch_size": 32},
}


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """合成7个片段并提取不增强的特征缓存"""
    root = tmp_path_factory.mktemp("cli")
    config = root / "config.json"
    config.write_text(json.dumps(SMALL_CONFIG))
    runner = CliRunner()

    result = runner.invoke(cli, ["--config", str(config), "synth", "--out-dir", str(root / "corpus"),
                                 "--clips-per-class", "1", "--seed", "1"])
    assert result.exit_code == 0, result.output

    cache = root / "features.eafv"
    result = runner.invoke(cli, ["--config", str(config), "extract", "--manifest", str(root / "corpus" / "manifest.csv"),
                                 "--cache", str(cache), "--no-augment"])
    assert result.exit_code == 0, result.output
    assert "records=7 dim=2376" in result.output
    return root


def run(workspace, *args, env=None):
    return CliRunner().invoke(cli, ["--config", str(workspace / "config.json"), *args], env=env)


def subset_manifest(workspace, tmp_path, count: int):
    """取语料清单前 count 行，路径改为绝对路径"""
    frame = pd.read_csv(workspace / "corpus" / "manifest.csv").head(count)
    frame["path"] = [str(workspace / "corpus" / p) for p in frame["path"]]
    manifest = tmp_path / f"first_{count}.csv"
    frame.to_csv(manifest, index=False)
    return manifest


def wav_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.glob("*.wav"))}


def trained_checkpoint(workspace, activation: str):
    target = workspace / f"model_{activation}.eann"
    if not target.exists():
        result = run(workspace, "train", "--cache", str(workspace / "features.eafv"),
                     "--checkpoint-out", str(target), "--activation", activation)
        assert result.exit_code == 0, result.output
        assert "best_epoch=0" in result.output
    return target


def test_extract_without_augmentation(workspace):
    cache = read_cache(workspace / "features.eafv")
    assert len(cache) == 7
    assert {r.variant for r in cache.records} == {0}


def test_extract_refuses_overwrite(workspace):
    """目标已存在且未加 --force 时退出码为 4"""
    manifest = str(workspace / "corpus" / "manifest.csv")
    cache = str(workspace / "features.eafv")
    result = run(workspace, "extract", "--manifest", manifest, "--cache", cache, "--no-augment")
    assert result.exit_code == 4
    result = run(workspace, "extract", "--manifest", manifest, "--cache", cache, "--no-augment", "--force")
    assert result.exit_code == 0, result.output


def test_extract_with_augmentation(workspace, tmp_path):
    """3个片段增强后得到30条记录"""
    manifest = subset_manifest(workspace, tmp_path, 3)

    cache = tmp_path / "aug.eafv"
    result = run(workspace, "extract", "--manifest", str(manifest), "--cache", str(cache), "--augment", "--seed", "7")
    assert result.exit_code == 0, result.output
    assert "records=30 dim=2376" in result.output
    assert sorted({r.variant for r in read_cache(cache).records}) == list(range(10))


def test_augment_writes_ten_files(workspace, tmp_path):
    manifest = subset_manifest(workspace, tmp_path, 1)

    result = run(workspace, "augment", "--manifest", str(manifest), "--out-dir", str(tmp_path / "aug"), "--seed", "3")
    assert result.exit_code == 0, result.output
    assert "files=10" in result.output
    assert (tmp_path / "aug" / "neutral_000__v9.wav").exists()


def test_augment_thread_count_and_rerun_are_bitwise_identical(workspace, tmp_path):
    """--threads 4 与 --threads 1 输出逐字节一致，同种子重跑结果不变"""
    manifest = str(subset_manifest(workspace, tmp_path, 3))
    outputs = {}
    for name, threads in (("serial", "1"), ("parallel", "4"), ("rerun", "1")):
        result = run(workspace, "augment", "--manifest", manifest, "--out-dir", str(tmp_path / name),
                     "--seed", "4", "--threads", threads)
        assert result.exit_code == 0, result.output
        outputs[name] = wav_bytes(tmp_path / name)
    assert len(outputs["serial"]) == 30
    assert outputs["parallel"] == outputs["serial"]
    assert outputs["rerun"] == outputs["serial"]


def test_seed_precedence_flag_config_env(workspace, tmp_path):
    """种子优先级：--seed > 配置文件 > EMOAUG_SEED > 默认值0"""
    manifest = str(subset_manifest(workspace, tmp_path, 1))
    seeded_config = tmp_path / "seeded.json"
    seeded_config.write_text(json.dumps({**SMALL_CONFIG, "augment": {"seed": 6}}))

    def augment(name, *extra, env, config=None):
        config = config or workspace / "config.json"
        result = CliRunner().invoke(
            cli,
            ["--config", str(config), "augment", "--manifest", manifest, "--out-dir", str(tmp_path / name), *extra],
            env=env,
        )
        assert result.exit_code == 0, result.output
        return wav_bytes(tmp_path / name)

    from_env = augment("env5", env={"EMOAUG_SEED": "5"})
    assert augment("flag5", "--seed", "5", env={"EMOAUG_SEED": None}) == from_env
    flag6 = augment("flag6", "--seed", "6", env={"EMOAUG_SEED": "5"})
    assert flag6 != from_env
    assert augment("config6", env={"EMOAUG_SEED": "5"}, config=seeded_config) == flag6
    default = augment("default", env={"EMOAUG_SEED": None})
    assert default == augment("flag0", "--seed", "0", env={"EMOAUG_SEED": None})
    assert default != from_env


@pytest.mark.parametrize("activation, tag", [("relu", 0), ("elu", 1)])
def test_train_writes_tagged_checkpoint(workspace, activation, tag):
    """检查点文件头记录卷积激活函数，训练历史写在旁边"""
    target = trained_checkpoint(workspace, activation)
    data = target.read_bytes()
    assert data[:4] == b"EANN"
    assert data[6] == tag
    history = pd.read_csv(target.with_suffix(".history.csv"))
    assert len(history) == 1


def test_train_divergence_exit_code(workspace, tmp_path):
    """特征中出现 Inf 时训练发散，退出码5且不写检查点"""
    cache = read_cache(workspace / "features.eafv")
    poisoned = [
        FeatureRecord(r.clip_id, r.variant, r.label, r.values.copy()) for r in cache.records
    ]
    poisoned[0].values[0] = np.inf
    target = tmp_path / "poisoned.eafv"
    write_cache(poisoned, target, dim=cache.dim)

    checkpoint = tmp_path / "diverged.eann"
    result = run(workspace, "train", "--cache", str(target), "--checkpoint-out", str(checkpoint))
    assert result.exit_code == 5
    assert not checkpoint.exists()


def test_eval_writes_reports(workspace):
    checkpoint = trained_checkpoint(workspace, "relu")
    report_dir = workspace / "reports_eval"
    result = run(workspace, "eval", "--cache", str(workspace / "features.eafv"),
                 "--checkpoint", str(checkpoint), "--report-dir", str(report_dir))
    assert result.exit_code == 0, result.output
    assert "wa=" in result.output and "ua=" in result.output
    lines = (report_dir / "confusion.csv").read_text().splitlines()
    assert lines[0].startswith("true\\pred,neutral")
    assert lines[-1].startswith("wa=")
    assert (report_dir / "classification_report.csv").exists()

    again = run(workspace, "eval", "--cache", str(workspace / "features.eafv"),
                "--checkpoint", str(checkpoint), "--report-dir", str(report_dir))
    assert again.exit_code == 4


def test_infer_outputs_distribution(workspace):
    """概率之和为1，标签为七类之一"""
    checkpoint = trained_checkpoint(workspace, "elu")
    wav = workspace / "corpus" / "angry_000.wav"
    result = run(workspace, "infer", "--wav", str(wav), "--checkpoint", str(checkpoint))
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output[result.output.index("{"):])
    assert sum(payload["probabilities"].values()) == pytest.approx(1.0, abs=1e-5)
    assert payload["label"] in payload["probabilities"]
    assert len(payload["probabilities"]) == 7


def test_infer_error_codes(workspace, tmp_path):
    """损坏的检查点退出码6，缺失的音频退出码3"""
    checkpoint = trained_checkpoint(workspace, "relu")
    wav = str(workspace / "corpus" / "sad_000.wav")

    corrupted = tmp_path / "bad.eann"
    shutil.copy(checkpoint, corrupted)
    data = bytearray(corrupted.read_bytes())
    data[:4] = b"XXXX"
    corrupted.write_bytes(bytes(data))
    assert run(workspace, "infer", "--wav", wav, "--checkpoint", str(corrupted)).exit_code == 6
    assert run(workspace, "infer", "--wav", wav, "--checkpoint", str(tmp_path / "none.eann")).exit_code == 6

    missing = run(workspace, "infer", "--wav", str(tmp_path / "missing.wav"), "--checkpoint", str(checkpoint))
    assert missing.exit_code == 3


def test_compare_writes_both_activations(workspace):
    report_dir = workspace / "reports_compare"
    result = run(workspace, "compare", "--cache", str(workspace / "features.eafv"), "--report-dir", str(report_dir))
    assert result.exit_code == 0, result.output
    table = pd.read_csv(report_dir / "comparison.csv")
    assert table["activation"].tolist() == ["relu", "elu"]
    assert (report_dir / "confusion_relu.csv").exists()
    assert (report_dir / "confusion_elu.csv").exists()


def test_usage_errors(workspace, tmp_path):
    """未知参数、缺失清单、非法或无法解析的配置均以退出码2结束"""
    assert run(workspace, "extract", "--bogus").exit_code == 2
    missing = run(workspace, "extract", "--manifest", str(tmp_path / "none.csv"), "--cache", str(tmp_path / "x.eafv"))
    assert missing.exit_code == 2
    neither = run(workspace, "extract", "--cache", str(tmp_path / "x.eafv"))
    assert neither.exit_code == 2
    both = run(workspace, "extract", "--manifest", str(workspace / "corpus" / "manifest.csv"),
               "--in-dir", str(workspace / "corpus"), "--cache", str(tmp_path / "y.eafv"))
    assert both.exit_code == 2

    bad_config = tmp_path / "bad.json"
    bad_config.write_text(json.dumps({"train": {"lr0": -1}}))
    result = CliRunner().invoke(cli, ["--config", str(bad_config), "synth", "--out-dir", str(tmp_path / "s")])
    assert result.exit_code == 2

    for name, content in (("broken.json", "{ not json"), ("broken.toml", "[train\nlr0 = "), ("list.json", "[1, 2]")):
        malformed = tmp_path / name
        malformed.write_text(content)
        result = CliRunner().invoke(cli, ["--config", str(malformed), "synth", "--out-dir", str(tmp_path / "s")])
        assert result.exit_code == 2, result.output
        assert name in result.output


def test_show_config(workspace):
    result = run(workspace, "--show-config")
    assert result.exit_code == 0
    shown = json.loads(result.output[result.output.index("{"):])
    assert shown["model"]["conv_filters"] == [8, 8, 8]
