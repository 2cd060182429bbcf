"""
命令行接口实现
augment / extract / train / eval / infer / compare / synth

退出码：0 成功，2 用法/清单，3 音频，4 拒绝覆盖，5 训练发散，6 检查点不匹配
"""
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np
from pydantic import ValidationError

from core.application import Pipeline, PipelineBuilder
from core.exceptions import EmoAugError, OverwriteRefused, UsageError
from core.models import EmotionLabel, ManifestEntry
from infrastructure.config import PipelineConfig, load_config, print_current_config, resolve_seed
from infrastructure.logging import get_logger, setup_logging
from services.datastore import (
    FeatureCache,
    generate_corpus,
    load_manifest,
    read_cache,
    require_entries,
    scan_ravdess_dir,
    stratified_split,
    write_cache,
)
from services.neuralnet import build_spec, load_checkpoint, read_activation, save_checkpoint
from services.training import (
    CLASS_REPORT_FILE,
    COMPARISON_FILE,
    CONFUSION_FILE,
    LabelledSet,
    evaluate,
    write_classification_report,
    write_comparison_csv,
    write_confusion_csv,
    write_history_csv,
)

# 初始化模块logger
logger = get_logger(__name__)


def handle_errors(func):
    """把流水线异常转换为 stderr 消息与对应退出码"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except EmoAugError as e:
            click.echo(f"错误: {e}", err=True)
            sys.exit(e.exit_code)
        except ValidationError as e:
            click.echo(f"错误: 配置无效\n{e}", err=True)
            sys.exit(2)
        except FileNotFoundError as e:
            click.echo(f"错误: {e}", err=True)
            sys.exit(2)
        except KeyboardInterrupt:
            click.echo("\n操作已取消", err=True)
            sys.exit(130)

    return wrapper


def init_app(config_path: str | None, debug: bool = False) -> PipelineConfig:
    """
    加载配置并初始化日志

    Args:
        config_path: JSON/TOML 配置文件，为空时使用内置默认值
        debug: 启用 DEBUG 日志
    """
    config = load_config(config_path)
    setup_logging(
        log_level="DEBUG" if debug else config.system.log_level,
        log_file=config.logging.file_path,
        enable_console=config.logging.enable_console,
        enable_file=config.logging.enable_file,
    )
    return config


def _pipeline(ctx: click.Context, config_path: str | None = None) -> Pipeline:
    """子命令的 --config 优先于全局 --config"""
    path = config_path or ctx.obj.get("config_path")
    config = init_app(path, ctx.obj.get("debug", False))
    return PipelineBuilder.create(config)


def _refuse_overwrite(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise OverwriteRefused("目标已存在，使用 --force 覆盖", str(path))


def _feature_dim(pipeline: Pipeline) -> int:
    return pipeline.features.feature_dim(pipeline.window.n_samples)


def _progress(index: int, total: int, entry: ManifestEntry) -> None:
    click.echo(f"[{index + 1}/{total}] {entry.path}")


def _load_entries(
    pipeline: Pipeline, manifest: str | None, in_dir: str | None, drop_calm: bool
) -> list[ManifestEntry]:
    """两者都未指定时读取配置中的清单路径"""
    if manifest and in_dir:
        raise UsageError("--manifest 与 --in-dir 只能指定其一")
    if in_dir:
        return scan_ravdess_dir(in_dir, drop_calm=drop_calm)
    manifest = manifest or pipeline.config.paths.manifest
    return require_entries(load_manifest(manifest), manifest)


def _load_model(pipeline: Pipeline, checkpoint: str, dim: int):
    """按检查点中的激活标签构建网络结构并加载参数"""
    activation = read_activation(checkpoint)
    model_cfg = pipeline.config.model.model_copy(
        update={"conv_activation": activation.value, "input_length": dim}
    )
    spec = build_spec(model_cfg)
    return spec, load_checkpoint(checkpoint, spec)


@click.group(invoke_without_command=True)
@click.option("--config", "config_path", type=click.Path(), help="JSON/TOML 配置文件")
@click.option("--show-config", is_flag=True, help="显示当前配置")
@click.option("--debug", is_flag=True, help="启用调试日志")
@click.pass_context
@handle_errors
def cli(ctx: click.Context, config_path: str | None, show_config: bool, debug: bool):
    """
    EmoAugNet - 语音情感识别流水线

    数据增强、特征提取、Conv1D-LSTM 训练与评估

    使用示例:
    emoaugnet synth --out-dir data/synth
    emoaugnet extract --manifest data/synth/manifest.csv --cache data/features.eafv
    emoaugnet train --cache data/features.eafv --checkpoint-out models/emoaugnet.eann
    """
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["debug"] = debug

    if show_config:
        click.echo(print_current_config(init_app(config_path, debug)))
        return

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command()
@click.option("--manifest", help="数据清单 CSV（默认取配置 paths.manifest）")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="输出目录")
@click.option("--seed", type=int, help="基础种子（默认取配置或 EMOAUG_SEED）")
@click.option("--threads", type=click.IntRange(min=1), help="工作线程数")
@click.pass_context
@handle_errors
def augment(ctx: click.Context, manifest: str | None, out_dir: str, seed: int | None, threads: int | None):
    """
    为清单中每个片段写出10个增强变体 <stem>__v<k>.wav
    """
    pipeline = _pipeline(ctx)
    entries = _load_entries(pipeline, manifest, None, False)
    seed = resolve_seed(seed, pipeline.config)
    written = pipeline.augment_to_dir(
        entries, out_dir, seed, threads or pipeline.config.system.threads, _progress
    )
    click.echo(f"files={len(written)}")


@cli.command()
@click.option("--manifest", help="数据清单 CSV（两者都未指定时取配置 paths.manifest）")
@click.option("--in-dir", type=click.Path(file_okay=False), help="RAVDESS 语料目录")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), help="输出特征缓存（默认取配置 paths.cache）")
@click.option("--augment/--no-augment", "do_augment", default=True, help="是否在内存中先做10变体增强")
@click.option("--seed", type=int, help="基础种子（默认取配置或 EMOAUG_SEED）")
@click.option("--force", is_flag=True, help="覆盖已存在的缓存")
@click.option("--threads", type=click.IntRange(min=1), help="工作线程数")
@click.option("--drop-calm", is_flag=True, help="--in-dir 时跳过 calm 片段（默认并入 neutral）")
@click.pass_context
@handle_errors
def extract(
    ctx: click.Context,
    manifest: str | None,
    in_dir: str | None,
    cache_path: str | None,
    do_augment: bool,
    seed: int | None,
    force: bool,
    threads: int | None,
    drop_calm: bool,
):
    """
    提取特征并写出特征缓存
    """
    pipeline = _pipeline(ctx)
    target = Path(cache_path or pipeline.config.paths.cache)
    _refuse_overwrite(target, force)
    entries = _load_entries(pipeline, manifest, in_dir, drop_calm)
    seed = resolve_seed(seed, pipeline.config)
    records = pipeline.extract(
        entries, seed, do_augment, threads or pipeline.config.system.threads, _progress
    )
    dim = _feature_dim(pipeline)
    write_cache(records, target, dim=dim)
    click.echo(f"records={len(records)} dim={dim}")


@cli.command()
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), help="特征缓存（默认取配置 paths.cache）")
@click.option("--config", "config_path", type=click.Path(), help="JSON/TOML 配置文件")
@click.option("--checkpoint-out", type=click.Path(dir_okay=False), help="输出检查点（默认取配置 paths.checkpoint）")
@click.option("--activation", type=click.Choice(["relu", "elu"]), help="卷积层激活函数")
@click.option("--force", is_flag=True, help="覆盖已存在的检查点")
@click.pass_context
@handle_errors
def train(
    ctx: click.Context,
    cache_path: str | None,
    config_path: str | None,
    checkpoint_out: str | None,
    activation: str | None,
    force: bool,
):
    """
    训练网络并写出检查点与训练历史 CSV
    """
    pipeline = _pipeline(ctx, config_path)
    paths = pipeline.config.paths
    target = Path(checkpoint_out or paths.checkpoint)
    _refuse_overwrite(target, force)
    cache = read_cache(cache_path or paths.cache, expected_dim=_feature_dim(pipeline))

    data = pipeline.training.prepare(cache)
    model = pipeline.training.fit(data, activation)
    save_checkpoint(target, model.spec, model.params, model.standardizer.mean, model.standardizer.std)
    history_path = write_history_csv(model.history, target.with_suffix(".history.csv"))

    logger.info("train", f"训练历史已写入 {history_path}")
    click.echo(f"best_epoch={model.history.best_epoch} best_val_acc={model.history.best_val_acc:.6f}")


def _subset(pipeline: Pipeline, cache: FeatureCache, subset: str) -> FeatureCache:
    """评估只使用变体0；非 all 时按训练使用的划分取子集"""
    if subset == "all":
        return cache.select({r.clip_id for r in cache.records}, variant=0)
    cfg = pipeline.config.train
    split = stratified_split(cache.records, cfg.split_ratios, cfg.seed)
    return cache.select(getattr(split, subset), variant=0)


@cli.command(name="eval")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), help="特征缓存（默认取配置 paths.cache）")
@click.option("--checkpoint", type=click.Path(dir_okay=False), help="检查点（默认取配置 paths.checkpoint）")
@click.option("--report-dir", type=click.Path(file_okay=False), help="报告输出目录（默认取配置 paths.reports）")
@click.option(
    "--subset",
    type=click.Choice(["all", "train", "val", "test"]),
    default="all",
    show_default=True,
    help="评估的数据子集（原始片段）",
)
@click.option("--force", is_flag=True, help="覆盖已存在的报告")
@click.pass_context
@handle_errors
def eval_command(
    ctx: click.Context,
    cache_path: str | None,
    checkpoint: str | None,
    report_dir: str | None,
    subset: str,
    force: bool,
):
    """
    评估检查点，写出混淆矩阵与逐类报告
    """
    pipeline = _pipeline(ctx)
    paths = pipeline.config.paths
    out = Path(report_dir or paths.reports)
    _refuse_overwrite(out / CONFUSION_FILE, force)
    cache = read_cache(cache_path or paths.cache, expected_dim=_feature_dim(pipeline))
    spec, ckpt = _load_model(pipeline, checkpoint or paths.checkpoint, cache.dim)

    chosen = _subset(pipeline, cache, subset)
    features = (chosen.matrix() - ckpt.mean) / ckpt.std
    report = evaluate(spec, ckpt.params, LabelledSet(features.astype(np.float32), chosen.labels()))

    write_confusion_csv(report, out / CONFUSION_FILE)
    write_classification_report(report, out / CLASS_REPORT_FILE)
    click.echo(report.summary_line())


@cli.command()
@click.option("--wav", required=True, help="待识别的 WAV 文件")
@click.option("--checkpoint", type=click.Path(dir_okay=False), help="检查点（默认取配置 paths.checkpoint）")
@click.option("--format", "-f", "fmt", type=click.Choice(["json", "text"]), default="json", help="输出格式")
@click.pass_context
@handle_errors
def infer(ctx: click.Context, wav: str, checkpoint: str | None, fmt: str):
    """
    识别单个文件，输出7类概率与预测标签
    """
    pipeline = _pipeline(ctx)
    model = _load_model(pipeline, checkpoint or pipeline.config.paths.checkpoint, _feature_dim(pipeline))
    prediction = pipeline.predict_file(wav, model)

    probabilities = {
        name: float(p) for name, p in zip(EmotionLabel.names(), prediction.probabilities)
    }
    if fmt == "json":
        result = {"path": prediction.path, "label": prediction.label, "probabilities": probabilities}
        click.echo(json.dumps(result, ensure_ascii=False, indent=2))
    else:
        for name, p in probabilities.items():
            click.echo(f"{name:<9} {p:.6f}")
        click.echo(f"label={prediction.label}")


@cli.command()
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), help="特征缓存（默认取配置 paths.cache）")
@click.option("--config", "config_path", type=click.Path(), help="JSON/TOML 配置文件")
@click.option("--report-dir", type=click.Path(file_okay=False), help="报告输出目录（默认取配置 paths.reports）")
@click.option("--force", is_flag=True, help="覆盖已存在的报告")
@click.pass_context
@handle_errors
def compare(
    ctx: click.Context,
    cache_path: str | None,
    config_path: str | None,
    report_dir: str | None,
    force: bool,
):
    """
    以相同种子与划分分别训练 ReLU / ELU 卷积激活并比较 WA / UA
    """
    pipeline = _pipeline(ctx, config_path)
    paths = pipeline.config.paths
    out = Path(report_dir or paths.reports)
    _refuse_overwrite(out / COMPARISON_FILE, force)
    cache = read_cache(cache_path or paths.cache, expected_dim=_feature_dim(pipeline))
    data = pipeline.training.prepare(cache)

    rows = []
    for activation in ("relu", "elu"):
        model = pipeline.training.fit(data, activation)
        report = pipeline.training.evaluate(model, data.test)
        write_confusion_csv(report, out / f"confusion_{activation}.csv")
        rows.append(
            {
                "activation": activation,
                "best_epoch": model.history.best_epoch,
                "val_acc": model.history.best_val_acc,
                "wa": report.weighted_accuracy,
                "ua": report.unweighted_accuracy,
            }
        )
        click.echo(f"{activation}: {report.summary_line()}")
    write_comparison_csv(rows, out / COMPARISON_FILE)


@cli.command()
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="输出目录")
@click.option("--clips-per-class", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--seed", type=int, help="噪声种子（默认取配置或 EMOAUG_SEED）")
@click.pass_context
@handle_errors
def synth(ctx: click.Context, out_dir: str, clips_per_class: int, seed: int | None):
    """
    生成合成的7类纯音语料及其 manifest.csv
    """
    pipeline = _pipeline(ctx)
    entries = generate_corpus(
        out_dir,
        clips_per_class=clips_per_class,
        seed=resolve_seed(seed, pipeline.config),
        rate=pipeline.config.audio.rate,
    )
    click.echo(f"clips={len(entries)} manifest={Path(out_dir) / 'manifest.csv'}")


if __name__ == "__main__":
    cli()
