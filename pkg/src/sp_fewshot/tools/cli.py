#
# SP Few-Shot - Command Line Interface
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Click-based CLI wiring data generation, both training stages, evaluation,
# gradient checking, attention maps and the desk-scale studies.
#
# Exit codes: 0 success, 1 runtime or check failure, 2 usage error.
#

import difflib
import functools
import json
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import click

from sp_fewshot import __version__
from sp_fewshot.common.config import (
    Activation, ClassifierKind, EvalConfig, Mechanism, ModelConfig, OptimizerKind, Pooling,
    ProjectorKind, PromptConfig, SyntheticConfig, TrainConfig, config_to_dict, parse_int_list,
)
from sp_fewshot.common.errors import MissingEmbeddingError, SPFewShotError
from sp_fewshot.common.log import setup_logging

from .manifest import RunManifest, read_manifest, write_manifest

PARAMS_KEY = "sp_fewshot.params"

MECHANISMS = [m.value for m in Mechanism]
POOLINGS = [p.value for p in Pooling]
PROJECTORS = [p.value for p in ProjectorKind]
CLASSIFIERS = [c.value for c in ClassifierKind]
OPTIMIZERS = [o.value for o in OptimizerKind]
ACTIVATIONS = [a.value for a in Activation]
SPLITS = ["base", "validation", "novel"]


# =============================================================================
# Helpers
# =============================================================================

def run_command(f):
    """Record the resolved options for the manifest and map library errors to exit 1."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        click.get_current_context().meta[PARAMS_KEY] = dict(kwargs)
        try:
            return f(*args, **kwargs)
        except SPFewShotError as e:
            raise click.ClickException(str(e)) from e
    return wrapper


def record_run(
    ctx: click.Context,
    path: Path,
    seed: int,
    config: Optional[dict] = None,
    artifacts: Optional[dict] = None,
) -> Path:
    manifest = RunManifest(
        command=ctx.command.name,
        params=ctx.meta[PARAMS_KEY],
        seed=seed,
        config=config or {},
        artifacts={k: str(v) for k, v in (artifacts or {}).items()},
    )
    return write_manifest(path, manifest)


@contextmanager
def progress_view(title: str, quiet: bool):
    """Yield a progress callback backed by a live view, or None when quiet."""
    if quiet:
        yield None
        return
    from .live import TrainingView

    with TrainingView(title) as view:
        yield view


def load_split_dataset(data: str):
    from sp_fewshot.data.dataset import load_dataset

    ds = load_dataset(data)
    if not ds.all_records():
        raise click.ClickException(f"no records in dataset {data}")
    return ds


def model_config_for(ds, depth: int, width: int, heads: int, patch_size: int,
                     mlp_ratio: int, init_std: float) -> ModelConfig:
    height, width_px, channels = ds.image_shape
    if height != width_px:
        raise click.ClickException(f"images must be square, got {height}x{width_px}")
    cfg = ModelConfig(
        image_size=height, channels=channels, patch_size=patch_size, depth=depth,
        width=width, num_heads=heads, mlp_ratio=mlp_ratio, init_std=init_std,
    )
    cfg.validate()
    return cfg


def model_options(f):
    for decorator in reversed([
        click.option("--depth", default=4, type=click.IntRange(min=1), help="Transformer layers"),
        click.option("--width", default=64, type=click.IntRange(min=1), help="Token width C_z"),
        click.option("--heads", default=4, type=click.IntRange(min=1), help="Attention heads"),
        click.option("--patch-size", default=4, type=click.IntRange(min=1), help="Patch side P"),
        click.option("--mlp-ratio", default=4, type=click.IntRange(min=1), help="MLP hidden / width"),
        click.option("--init-std", default=0.02, type=click.FloatRange(min=0), help="Init std"),
    ]):
        f = decorator(f)
    return f


def prompt_options(f):
    for decorator in reversed([
        click.option("--mechanism", default="both", type=click.Choice(MECHANISMS),
                     help="Prompt interaction"),
        click.option("--inject-layer", default=None, type=click.IntRange(min=1),
                     help="1-based injection layer (default: start of the final third)"),
        click.option("--projector", default="linear", type=click.Choice(PROJECTORS),
                     help="Embedding projector"),
        click.option("--pooling", default="all", type=click.Choice(POOLINGS),
                     help="Output pooling"),
        click.option("--ci-activation", default="sigmoid", type=click.Choice(ACTIVATIONS),
                     help="Inner activation of the channel MLP"),
    ]):
        f = decorator(f)
    return f


def meta_options(f):
    for decorator in reversed([
        click.option("--tau", default=0.2, type=click.FloatRange(min=0, min_open=True),
                     help="Logit temperature"),
        click.option("--lr-encoder", default=1e-4, type=click.FloatRange(min=0)),
        click.option("--lr-projectors", default=1e-3, type=click.FloatRange(min=0)),
        click.option("--meta-epochs", default=10, type=click.IntRange(min=0)),
        click.option("--episodes", "episodes_per_epoch", default=100, type=click.IntRange(min=0),
                     help="Training episodes per epoch"),
    ]):
        f = decorator(f)
    return f


def episode_options(f):
    for decorator in reversed([
        click.option("--ways", default=5, type=click.IntRange(min=1), help="N"),
        click.option("--shots", default=1, type=click.IntRange(min=1), help="K"),
        click.option("--queries", default=15, type=click.IntRange(min=1), help="Queries per class"),
    ]):
        f = decorator(f)
    return f


def make_prompt_config(mechanism, inject_layer, projector, pooling, ci_activation,
                       semantic_dim: int) -> PromptConfig:
    return PromptConfig(
        mechanism=Mechanism(mechanism),
        inject_layer=inject_layer,
        projector_kind=ProjectorKind(projector),
        pooling=Pooling(pooling),
        semantic_dim=semantic_dim,
        ci_inner_activation=Activation(ci_activation),
    )


# =============================================================================
# Command Group
# =============================================================================

@click.group()
@click.version_option(version=__version__)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON file of option defaults keyed by command name")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool):
    """SP Few-Shot - semantic prompt few-shot learning at desk scale.

    Typical run:
      sp-fewshot gen-data -o data
      sp-fewshot pretrain --data data -o runs/pre
      sp-fewshot metatrain --data data --embeddings data/embeddings.txt
                           --checkpoint runs/pre/pretrain.spt -o runs/meta
      sp-fewshot eval --data data --embeddings data/embeddings.txt
                      --checkpoint runs/meta/metatrain.spt
    """
    setup_logging(verbose)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as f:
                defaults = json.load(f)
        except json.JSONDecodeError as e:
            raise click.BadParameter(f"{e.msg} (line {e.lineno})", param_hint="--config")
        if not isinstance(defaults, dict):
            raise click.BadParameter("expected a JSON object", param_hint="--config")
        ctx.default_map = defaults


@cli.command("gen-data")
@click.option("--classes", "num_classes", default=20, type=click.IntRange(min=4), help="Total classes")
@click.option("--per-class", default=60, type=click.IntRange(min=1), help="Images per class")
@click.option("--size", "image_size", default=16, type=click.IntRange(min=1), help="Image side")
@click.option("--cell-size", default=4, type=click.IntRange(min=1), help="Motif cell side")
@click.option("--embed-dim", default=32, type=click.IntRange(min=2), help="Embedding width D_g")
@click.option("--aligned/--hashed", default=True, help="Embeddings derived from class motifs")
@click.option("--seed", default=0, help="Generator seed")
@click.option("-o", "--out", required=True, type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@run_command
def gen_data(ctx, num_classes, per_class, image_size, cell_size, embed_dim, aligned, seed, out):
    """Generate a synthetic motif dataset and class-name embeddings.

    Example:
      sp-fewshot gen-data --classes 20 --seed 7 -o data
    """
    from sp_fewshot.data.dataset import save_dataset
    from sp_fewshot.data.embeddings import save_embeddings, synth_embeddings
    from sp_fewshot.data.synthetic import generate_synthetic_dataset

    out_dir = Path(out)
    cfg = SyntheticConfig(image_size=image_size, cell_size=cell_size)
    ds = generate_synthetic_dataset(num_classes, per_class, cfg, seed)
    save_dataset(ds, out_dir)
    table = synth_embeddings(ds.class_names(), embed_dim, seed,
                             aligned_motifs=ds.class_motifs if aligned else None)
    emb_path = save_embeddings(table, out_dir / "embeddings.txt")

    record_run(ctx, out_dir, seed, {"synthetic": config_to_dict(cfg)},
               {"dataset": out_dir, "embeddings": emb_path})
    click.echo(f"Wrote {num_classes} classes "
               f"({len(ds.base)} base / {len(ds.validation)} val / {len(ds.novel)} novel records) "
               f"to {out_dir}")


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(file_okay=False))
@model_options
@click.option("--epochs", default=50, type=click.IntRange(min=0))
@click.option("--batch-size", default=64, type=click.IntRange(min=1))
@click.option("--lr", default=1e-3, type=click.FloatRange(min=0))
@click.option("--optimizer", default="adamw", type=click.Choice(OPTIMIZERS))
@click.option("--weight-decay", default=5e-2, type=click.FloatRange(min=0))
@click.option("--semantic-dim", default=32, type=click.IntRange(min=1))
@click.option("--seed", default=0)
@click.option("-q", "--quiet", is_flag=True, help="No live view")
@click.pass_context
@run_command
def pretrain(ctx, data, out, depth, width, heads, patch_size, mlp_ratio, init_std,
             epochs, batch_size, lr, optimizer, weight_decay, semantic_dim, seed, quiet):
    """Supervised pre-training of the encoder on the base split."""
    from sp_fewshot.model.checkpoint import save_checkpoint
    from sp_fewshot.model.prompt import SemanticPromptModel
    from sp_fewshot.training.trainer import pretrain as run_pretrain
    from .export import export_curve_csv

    prompt_cfg = PromptConfig(mechanism=Mechanism.NONE, semantic_dim=semantic_dim)
    train_cfg = TrainConfig(
        lr_pretrain=lr, optimizer=OptimizerKind(optimizer), weight_decay=weight_decay,
        pretrain_epochs=epochs, batch_size=batch_size, seed=seed, prompt=prompt_cfg,
    )
    train_cfg.validate()
    ds = load_split_dataset(data)
    model_cfg = model_config_for(ds, depth, width, heads, patch_size, mlp_ratio, init_std)
    model = SemanticPromptModel.build(model_cfg, prompt_cfg, seed)

    with progress_view("Pre-training", quiet) as view:
        result = run_pretrain(model, None, ds, train_cfg, view.update if view else None)

    out_dir = Path(out)
    accuracy = result.final("accuracy") if result.curve else float("nan")
    ckpt = save_checkpoint(model, out_dir / "pretrain.spt",
                           extra={"stage": "pretrain", "train_accuracy": repr(accuracy)})
    curve = out_dir / "pretrain_curve.csv"
    export_curve_csv(result.curve, curve)
    record_run(ctx, out_dir, seed,
               {"model": config_to_dict(model_cfg), "train": config_to_dict(train_cfg)},
               {"checkpoint": ckpt, "curve": curve})
    click.echo(f"Base training accuracy: {accuracy:.4f}")
    click.echo(f"Checkpoint: {ckpt}")


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--embeddings", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Pre-trained checkpoint")
@click.option("-o", "--out", required=True, type=click.Path(file_okay=False))
@prompt_options
@meta_options
@episode_options
@click.option("--val-episodes", default=100, type=click.IntRange(min=0),
              help="Validation episodes per epoch")
@click.option("--optimizer", default="adamw", type=click.Choice(OPTIMIZERS))
@click.option("--weight-decay", default=5e-2, type=click.FloatRange(min=0))
@click.option("--keep-best/--keep-last", default=True, help="Restore the best validation epoch")
@click.option("--seed", default=0)
@click.option("-q", "--quiet", is_flag=True, help="No live view")
@click.pass_context
@run_command
def metatrain(ctx, data, embeddings, checkpoint, out, mechanism, inject_layer, projector, pooling,
              ci_activation, tau, lr_encoder, lr_projectors, meta_epochs, episodes_per_epoch,
              val_episodes, ways, shots, queries, optimizer, weight_decay, keep_best, seed, quiet):
    """Episodic meta-training with semantic prompts."""
    from sp_fewshot.data.embeddings import load_embeddings
    from sp_fewshot.model.checkpoint import load_checkpoint, save_checkpoint
    from sp_fewshot.training.trainer import attach_prompt, meta_train
    from .export import export_curve_csv

    train_cfg = TrainConfig(
        temperature=tau, lr_encoder=lr_encoder, lr_projectors=lr_projectors,
        weight_decay=weight_decay, optimizer=OptimizerKind(optimizer), meta_epochs=meta_epochs,
        episodes_per_epoch=episodes_per_epoch, ways=ways, shots=shots, queries=queries,
        val_episodes=val_episodes, keep_best=keep_best, seed=seed,
    )
    train_cfg.validate()

    table = load_embeddings(embeddings)
    prompt_cfg = make_prompt_config(mechanism, inject_layer, projector, pooling, ci_activation,
                                    table.dim)
    base = load_checkpoint(checkpoint)
    prompt_cfg = prompt_cfg.resolved(base.model_cfg.depth)
    train_cfg.prompt = prompt_cfg
    ds = load_split_dataset(data)
    model = attach_prompt(base, prompt_cfg, seed)

    with progress_view("Meta-training", quiet) as view:
        result = meta_train(model, ds, table, train_cfg, view.update if view else None)

    out_dir = Path(out)
    ckpt = save_checkpoint(model, out_dir / "metatrain.spt", extra={
        "stage": "metatrain",
        "best_epoch": str(result.best_epoch),
        "best_val_accuracy": repr(result.best_val_accuracy),
    })
    curve = out_dir / "metatrain_curve.csv"
    export_curve_csv(result.curve, curve)
    record_run(ctx, out_dir, seed,
               {"model": config_to_dict(model.model_cfg), "train": config_to_dict(train_cfg)},
               {"checkpoint": ckpt, "curve": curve})
    click.echo(f"Best validation accuracy: {result.best_val_accuracy:.4f} (epoch {result.best_epoch})")
    click.echo(f"Checkpoint: {ckpt}")


@cli.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--embeddings", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Needed unless the mechanism is none")
@click.option("--split", default="novel", type=click.Choice(SPLITS))
@episode_options
@click.option("--episodes", default=2000, type=click.IntRange(min=1))
@click.option("--classifier", default="nn", type=click.Choice(CLASSIFIERS))
@click.option("--mechanism", default=None, type=click.Choice(MECHANISMS),
              help="Override the checkpoint's mechanism")
@click.option("--seed", default=0)
@click.option("--threads", default=1, type=click.IntRange(min=1), help="Episode worker threads")
@click.option("-o", "--out", default=None, type=click.Path(file_okay=False),
              help="Write report.txt, episodes.csv, report.json and manifest.json here")
@click.pass_context
@run_command
def evaluate_cmd(ctx, checkpoint, data, embeddings, split, ways, shots, queries, episodes,
                 classifier, mechanism, seed, threads, out):
    """Episodic few-shot evaluation; prints `mean ± halfwidth`."""
    from sp_fewshot.data.embeddings import ClassEmbeddingTable, load_embeddings
    from sp_fewshot.evaluation.protocol import evaluate
    from sp_fewshot.model.checkpoint import load_checkpoint
    from .export import export_report

    ecfg = EvalConfig(ways=ways, shots=shots, queries=queries, episodes=episodes,
                      classifier=ClassifierKind(classifier), seed=seed, threads=threads)
    ecfg.validate()
    model = load_checkpoint(checkpoint)
    pcfg = model.with_prompt_config(mechanism=Mechanism(mechanism)) if mechanism else None
    resolved = model.resolve(pcfg)
    if embeddings is not None:
        table = load_embeddings(embeddings)
    elif resolved.mechanism == Mechanism.NONE:
        table = ClassEmbeddingTable(resolved.semantic_dim, {})
    else:
        raise click.UsageError(f"--embeddings is required for mechanism '{resolved.mechanism.value}'")

    ds = load_split_dataset(data)
    report = evaluate(model, ds.split(split), table, ecfg, pcfg)
    click.echo(report.summary())

    if out is not None:
        out_dir = Path(out)
        artifacts = {}
        for name in ("report.txt", "episodes.csv", "report.json"):
            export_report(report, out_dir / name)
            artifacts[name] = out_dir / name
        record_run(ctx, out_dir, seed, {"eval": config_to_dict(ecfg)}, artifacts)


@cli.command()
@click.option("--epsilon", default=1e-4, type=click.FloatRange(min=0, min_open=True))
@click.option("--threshold", default=1e-4, type=click.FloatRange(min=0, min_open=True))
@click.option("--seed", default=0)
@click.option("--corrupt", is_flag=True, hidden=True)
@click.pass_context
@run_command
def gradcheck(ctx, epsilon, threshold, seed, corrupt):
    """Finite-difference check of every gradient on a toy model.

    Exits 1 when the worst relative error exceeds the threshold.
    """
    from sp_fewshot.training.gradcheck import corrupt_gradient, run_gradcheck

    report = run_gradcheck(epsilon, seed, corrupt_gradient if corrupt else None)
    for name, err in report.worst_first():
        click.echo(f"{err:.3e}  {name}")
    worst = report.max_relative_error
    status = "PASS" if report.passed(threshold) else "FAIL"
    click.echo(f"{status}: worst relative error {worst:.3e} "
               f"({report.entries_checked} entries, threshold {threshold:g})")
    if status != "PASS":
        ctx.exit(1)


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--image", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Dataset record file (.spt)")
@click.option("--class-name", required=True, help="Class name to prompt with")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False),
              help="Output stem; writes <out>.csv and <out>.pgm")
@click.pass_context
@run_command
def attention(ctx, checkpoint, embeddings, image, class_name, out):
    """Dump the prompted attention heatmap of one image."""
    from sp_fewshot.data.dataset import load_record
    from sp_fewshot.data.embeddings import load_embeddings
    from sp_fewshot.evaluation.attention import dump_attention
    from sp_fewshot.model.checkpoint import load_checkpoint

    table = load_embeddings(embeddings)
    try:
        table.vector(class_name, compose_words=True)
    except MissingEmbeddingError:
        close = difflib.get_close_matches(class_name, table.names, n=5)
        hint = f" Did you mean: {', '.join(close)}?" if close else ""
        raise click.ClickException(
            f"unknown class '{class_name}'.{hint} Available: {', '.join(sorted(table.names))}"
        ) from None

    model = load_checkpoint(checkpoint)
    record = load_record(image)
    out_path = Path(out)
    heat = dump_attention(model, record.image, class_name, table, out_path)
    record_run(ctx, out_path.with_suffix(".manifest.json"), 0, {},
               {"csv": out_path.with_suffix(".csv"), "pgm": out_path.with_suffix(".pgm")})
    click.echo(f"Heatmap {heat.shape[0]}x{heat.shape[1]} -> {out_path.with_suffix('.pgm')}")


# =============================================================================
# Studies
# =============================================================================

def study_options(f):
    for decorator in reversed([
        click.option("--data", required=True, type=click.Path(exists=True, file_okay=False)),
        click.option("--embeddings", required=True, type=click.Path(exists=True, dir_okay=False)),
        click.option("-o", "--out", required=True, type=click.Path(file_okay=False)),
        click.option("--seeds", default="0,1,2,3,4", help="Comma-separated seeds"),
        click.option("--pretrain-epochs", default=50, type=click.IntRange(min=0)),
        click.option("--lr", default=1e-3, type=click.FloatRange(min=0), help="Pre-training lr"),
        click.option("--eval-episodes", default=200, type=click.IntRange(min=1)),
        click.option("-q", "--quiet", is_flag=True, help="No live view"),
    ]):
        f = decorator(f)
    return f


def _study_configs(ds, depth, width, heads, patch_size, mlp_ratio, init_std,
                   prompt_cfg, tau, lr, lr_encoder, lr_projectors, pretrain_epochs, meta_epochs,
                   episodes_per_epoch, ways, shots, queries, eval_episodes):
    model_cfg = model_config_for(ds, depth, width, heads, patch_size, mlp_ratio, init_std)
    train_cfg = TrainConfig(
        temperature=tau, lr_pretrain=lr, lr_encoder=lr_encoder, lr_projectors=lr_projectors,
        pretrain_epochs=pretrain_epochs, meta_epochs=meta_epochs,
        episodes_per_epoch=episodes_per_epoch, val_episodes=0, keep_best=False,
        ways=ways, shots=shots, queries=queries, prompt=prompt_cfg,
    )
    train_cfg.validate()
    eval_cfg = EvalConfig(ways=ways, shots=shots, queries=queries, episodes=eval_episodes)
    return model_cfg, train_cfg, eval_cfg


def _finish_study(ctx, rows, out: str, name: str, seeds, configs) -> None:
    from sp_fewshot.evaluation.studies import summarize_study
    from .export import export_study_csv, export_study_summary

    out_dir = Path(out)
    table_path = out_dir / f"{name}.csv"
    summary_path = out_dir / f"{name}.txt"
    export_study_csv(rows, table_path)
    export_study_summary(rows, summary_path)
    model_cfg, train_cfg, eval_cfg = configs
    record_run(ctx, out_dir, seeds[0] if seeds else 0, {
        "model": config_to_dict(model_cfg),
        "train": config_to_dict(train_cfg),
        "eval": config_to_dict(eval_cfg),
    }, {"rows": table_path, "summary": summary_path})
    for variant, mean in summarize_study(rows).items():
        click.echo(f"{variant:10s} {mean:.4f}")


@cli.command()
@study_options
@model_options
@prompt_options
@meta_options
@episode_options
@click.option("--mechanisms", default="none,si,ci,both", help="Comma-separated mechanisms")
@click.pass_context
@run_command
def ablate(ctx, data, embeddings, out, seeds, pretrain_epochs, lr, eval_episodes, quiet,
           depth, width, heads, patch_size, mlp_ratio, init_std,
           mechanism, inject_layer, projector, pooling, ci_activation,
           tau, lr_encoder, lr_projectors, meta_epochs, episodes_per_epoch,
           ways, shots, queries, mechanisms):
    """Mechanism ablation: pre-train baseline vs none / si / ci / both."""
    from sp_fewshot.data.embeddings import load_embeddings
    from sp_fewshot.evaluation.studies import run_ablation

    seed_list = parse_int_list(seeds)
    try:
        mech_list = [Mechanism(m.strip()) for m in mechanisms.split(",") if m.strip()]
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--mechanisms") from None
    ds = load_split_dataset(data)
    table = load_embeddings(embeddings)
    prompt_cfg = make_prompt_config(mechanism, inject_layer, projector, pooling, ci_activation,
                                    table.dim)
    configs = _study_configs(ds, depth, width, heads, patch_size, mlp_ratio, init_std,
                             prompt_cfg, tau, lr, lr_encoder, lr_projectors, pretrain_epochs,
                             meta_epochs, episodes_per_epoch, ways, shots, queries, eval_episodes)

    with progress_view("Ablation", quiet) as view:
        rows = run_ablation(ds, table, seed_list, *configs, mechanisms=mech_list,
                            progress=view.study_update if view else None)
    _finish_study(ctx, rows, out, "ablation", seed_list, configs)


@cli.command("layer-sweep")
@study_options
@model_options
@prompt_options
@meta_options
@episode_options
@click.option("--layers", default=None, help="Comma-separated inject layers (default: all)")
@click.pass_context
@run_command
def layer_sweep(ctx, data, embeddings, out, seeds, pretrain_epochs, lr, eval_episodes, quiet,
                depth, width, heads, patch_size, mlp_ratio, init_std,
                mechanism, inject_layer, projector, pooling, ci_activation,
                tau, lr_encoder, lr_projectors, meta_epochs, episodes_per_epoch,
                ways, shots, queries, layers):
    """Injection-layer sweep of the chosen mechanism."""
    from sp_fewshot.data.embeddings import load_embeddings
    from sp_fewshot.evaluation.studies import run_layer_sweep

    seed_list = parse_int_list(seeds)
    layer_list = parse_int_list(layers) if layers else list(range(1, depth + 1))
    ds = load_split_dataset(data)
    table = load_embeddings(embeddings)
    prompt_cfg = make_prompt_config(mechanism, inject_layer, projector, pooling, ci_activation,
                                    table.dim)
    configs = _study_configs(ds, depth, width, heads, patch_size, mlp_ratio, init_std,
                             prompt_cfg, tau, lr, lr_encoder, lr_projectors, pretrain_epochs,
                             meta_epochs, episodes_per_epoch, ways, shots, queries, eval_episodes)

    with progress_view("Layer sweep", quiet) as view:
        rows = run_layer_sweep(ds, table, seed_list, layer_list, *configs,
                               progress=view.study_update if view else None)
    _finish_study(ctx, rows, out, "layer_sweep", seed_list, configs)


@cli.command()
@click.argument("manifest", type=click.Path(exists=True))
@click.pass_context
@run_command
def replay(ctx, manifest):
    """Re-run a command from its manifest.json.

    Example:
      sp-fewshot replay runs/meta/manifest.json
    """
    m = read_manifest(manifest)
    cmd = cli.get_command(ctx, m.command)
    if cmd is None or m.command == "replay":
        raise click.ClickException(f"manifest names an unknown command '{m.command}'")
    click.echo(f"Replaying '{m.command}' from {manifest}")
    ctx.invoke(cmd, **m.params)


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == '__main__':
    main()
