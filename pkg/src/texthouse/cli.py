"""Command line front end for every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import numpy as np

from . import dataset as ds
from . import evalmetrics as ev
from . import layout as lo
from . import pipeline
from . import texture as tx
from .parsing import encode_layout_features
from .vocab import Vocabularies


@click.group()
def cli():
    """Text-described houses: data, training, generation, evaluation, serving."""


@cli.command("gen-data")
@click.option("--out", required=True, type=click.Path())
@click.option("--houses", default=100, show_default=True)
@click.option("--textures", default=64, show_default=True)
@click.option("--texture-size", default=32, show_default=True)
@click.option("--seed", default=0, show_default=True)
def gen_data(out, houses, textures, texture_size, seed):
    """Write a synthetic corpus of house layouts and textures."""
    ds.write_corpus(out, n_houses=houses, seed=seed, n_textures=textures,
                    texture_size=texture_size)
    click.echo(f"wrote {houses} houses and {textures} textures to {out}")


def _ensure_parent(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_trace(path, rows, header):
    _ensure_parent(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


@cli.command("train-layout")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--epochs", default=40, show_default=True)
@click.option("--lr", default=0.0002, show_default=True)
@click.option("--hidden", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--trace", type=click.Path(), default=None)
@click.option("--gcn/--no-gcn", default=True, show_default=True)
@click.option("--softmax/--no-softmax", default=True, show_default=True)
def train_layout(corpus, out, epochs, lr, hidden, seed, trace, gcn, softmax):
    """Train the layout regressor on a corpus's training split."""
    vocab = Vocabularies()
    houses, split = ds.load_corpus(corpus)
    samples = []
    for idx in split["train"]:
        house = houses[idx]
        x, a = encode_layout_features(house.spec, vocab)
        gt = np.array([b.as_array() for b in house.gt_boxes])
        samples.append((x, a, gt))
    cfg = lo.TrainConfig(lr=lr, epochs=epochs, seed=seed, hidden=hidden,
                         gcn_on=gcn, softmax_on=softmax)
    params, losses = lo.train_gclpn(samples, cfg)
    params.save(_ensure_parent(out))
    if trace:
        _write_trace(trace, [(i, v) for i, v in enumerate(losses)], ["epoch", "loss"])
    click.echo(f"trained {epochs} epochs on {len(samples)} layouts; saved {out}")


@cli.command("train-texture")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out-gen", required=True, type=click.Path())
@click.option("--out-disc", required=True, type=click.Path())
@click.option("--iters", default=500, show_default=True)
@click.option("--base-width", default=16, show_default=True)
@click.option("--batch-size", default=24, show_default=True)
@click.option("--lr", default=0.0002, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--trace", type=click.Path(), default=None)
@click.option("--material-loss/--no-material-loss", default=True, show_default=True)
@click.option("--colour-loss/--no-colour-loss", default=True, show_default=True)
def train_texture(corpus, out_gen, out_disc, iters, base_width, batch_size, lr,
                  seed, trace, material_loss, colour_loss):
    """Train the conditional texture generator on a texture corpus."""
    vocab = Vocabularies()
    tex_dir = Path(corpus) / "textures"
    raw = ds.load_texture_corpus(tex_dir if tex_dir.is_dir() else corpus)
    data = [
        (img, tx.make_condition(vocab.material_index(m), vocab.colour_index(c)))
        for img, m, c in raw
    ]
    cfg = tx.TextureTrainConfig(
        f=base_width, iterations=iters, batch_size=batch_size, lr=lr, seed=seed,
        use_material=material_loss, use_colour=colour_loss,
    )
    gen, disc, traces = tx.train_lctgan(data, cfg)
    gen.save(_ensure_parent(out_gen))
    disc.save(_ensure_parent(out_disc))
    if trace:
        rows = [
            (i, traces["d_adv"][i], traces["g_adv"][i], traces["material"][i],
             traces["colour"][i])
            for i in range(len(traces["d_adv"]))
        ]
        _write_trace(trace, rows, ["iter", "d_adv", "g_adv", "material", "colour"])
    click.echo(f"trained {iters} iterations on {len(data)} textures; saved {out_gen}")


@cli.command("generate")
@click.option("--text", default=None)
@click.option("--text-file", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--layout-params", required=True, type=click.Path(exists=True))
@click.option("--gen-params", required=True, type=click.Path(exists=True))
@click.option("--seed", default=pipeline.DEFAULT_SEED, show_default=True)
def generate(text, text_file, out, layout_params, gen_params, seed):
    """Run the full pipeline on a description and write all artifacts."""
    if (text is None) == (text_file is None):
        raise click.UsageError("provide exactly one of --text or --text-file")
    if text_file is not None:
        text = Path(text_file).read_text()
    layout = lo.GcLpnParams.load(layout_params)
    gen = tx.GeneratorParams.load(gen_params)
    result = pipeline.run_generation(text, layout, gen, seed=seed)
    pipeline.write_result(result, out)
    click.echo(f"wrote plan, mesh and {2 * len(result.plan.rooms)} textures to {out}")


@cli.command("evaluate")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--split", default="test", type=click.Choice(["train", "test"]),
              show_default=True)
@click.option("--layout-params", required=True, type=click.Path(exists=True))
@click.option("--gen-params", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--seed", default=0, show_default=True)
def evaluate(corpus, split, layout_params, gen_params, out, seed):
    """Score layout IoU, and texture metrics when a generator is given."""
    vocab = Vocabularies()
    houses, splits = ds.load_corpus(corpus)
    params = lo.GcLpnParams.load(layout_params)

    predictions, truth = [], []
    for idx in splits[split]:
        house = houses[idx]
        x, a = encode_layout_features(house.spec, vocab)
        predictions.append([lo.clamp_box(b) for b in lo.gclpn_predict(x, a, params)])
        truth.append(house.gt_boxes)
    per_room = ev.per_room_iou(predictions, truth)
    miou = ev.mean_iou(predictions, truth)

    ssim = float("nan")
    mat_acc = col_acc = float("nan")
    probe_acc = (float("nan"), float("nan"))
    if gen_params:
        gen = tx.GeneratorParams.load(gen_params)
        raw = ds.load_texture_corpus(Path(corpus) / "textures")
        data = [
            (img, vocab.material_index(m), vocab.colour_index(c))
            for img, m, c in raw
        ]
        probe, probe_acc = ev.train_probe(data, seed=seed)
        seen = sorted({(m, c) for _, m, c in data})
        conds = [tx.make_condition(m, c) for m, c in seen]
        mat_acc, col_acc = ev.alignment_accuracy(gen, conds, probe, seed=seed)
        ssim = ev.diversity_score(gen, conds[0], n=6, seed=seed)

    report = ev.EvalReport(
        mean_iou=miou, per_room_iou=per_room, ms_ssim=ssim,
        material_acc=mat_acc, colour_acc=col_acc, probe_real_acc=probe_acc,
        n_samples=len(predictions),
    )
    click.echo(ev.format_report(report))
    if out:
        Path(_ensure_parent(out)).write_text(report.to_json())


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--checkpoint-dir", type=click.Path(), default=None)
def serve(host, port, checkpoint_dir):
    """Start the HTTP API."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(checkpoint_dir), host=host, port=port)


def main():
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        ctx = exc.ctx
        if ctx is not None:
            click.echo(ctx.get_usage(), err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except Exception as exc:  # runtime failure
        click.echo(f"failed: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
