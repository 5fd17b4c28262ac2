"""Command-line surface: train, suggest, evaluate, serve, synth.

Exit codes: 0 ok, 2 I/O problem, 3 bad target, 4 bad configuration.
Failures print a single machine-parsable line on stderr.
"""
from __future__ import annotations

import csv
import difflib
import json
import sys
import time
from pathlib import Path

import click

from . import artifact, evaluate, service, synth
from .bayesnet import BnConfig
from .builder import build
from .errors import DataError, PreprocessError, SchemaError, TargetError
from .preprocess import PreprocessConfig
from .schema import load_dataset, load_schema
from .suggest import SuggestionRequest, suggest

EXIT_IO = 2
EXIT_TARGET = 3
EXIT_CONFIG = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_config(path: str | None) -> tuple[PreprocessConfig, BnConfig, dict]:
    if path is None:
        return PreprocessConfig(), BnConfig(), {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(EXIT_IO, f"config: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_CONFIG, f"config: invalid JSON: {exc.msg}")
    try:
        pre = PreprocessConfig(**doc.get("preprocess", {}))
        bn = BnConfig(**doc.get("bn", {}))
    except (TypeError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"config: {exc}")
    return pre, bn, doc


@click.group()
def main():
    """Form-filling suggestion engine."""


@main.command()
@click.option("--data", "data_path", required=True, help="historical data CSV")
@click.option("--schema", "schema_path", required=True, help="form schema JSON")
@click.option("--config", "config_path", default=None, help="training config JSON")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, help="model artifact output path")
def train(data_path, schema_path, config_path, seed, out_path):
    """Train a model bundle from historical submissions."""
    pre_cfg, bn_cfg, doc = _parse_config(config_path)
    try:
        schema = load_schema(schema_path)
        dataset = load_dataset(schema, data_path)
    except (SchemaError, DataError) as exc:
        _fail(EXIT_IO, str(exc))
    started = time.perf_counter()
    try:
        bundle = build(
            dataset,
            pre_cfg=pre_cfg,
            bn_cfg=bn_cfg,
            seed=seed,
            k_max=int(doc.get("k_max", 100)),
            min_cluster_rows=int(doc.get("min_cluster_rows", 30)),
        )
    except PreprocessError as exc:
        _fail(EXIT_CONFIG, str(exc))
    elapsed = time.perf_counter() - started
    artifact.save_bundle(bundle, out_path)

    click.echo(f"model written to {out_path}")
    click.echo(f"training wall time: {elapsed:.2f}s")
    click.echo(f"instances: {len(dataset.instances)}")
    for name, reason in bundle.preprocess.removed_fields:
        click.echo(f"removed field: {name} ({reason})")
    click.echo(f"independent fields: {', '.join(bundle.independent_fields) or '(none)'}")
    k = bundle.clusters.k if bundle.clusters else 0
    click.echo(f"clusters: k={k}")
    nets = [("global", bundle.global_net)] + [
        (f"local-{i + 1}", net) for i, net in enumerate(bundle.locals)
    ]
    for name, net in nets:
        click.echo(f"model {name}: {len(net.dag.nodes)} nodes, {len(net.dag.edges)} edges")


@main.command()
@click.option("--model", "model_path", required=True, help="model artifact path")
@click.option("--target", required=True, help="field to suggest values for")
@click.option("--filled", "filled_pairs", multiple=True, help="filled field as name=value")
@click.option("--theta", default=0.7, show_default=True, type=float)
@click.option("--top-percent", default=5.0, show_default=True, type=float)
def suggest_cmd(model_path, target, filled_pairs, theta, top_percent):
    """Print ranked value suggestions for a partially filled form."""
    try:
        bundle = artifact.load_bundle(model_path)
    except DataError as exc:
        _fail(EXIT_IO, str(exc))
    filled = {}
    for pair in filled_pairs:
        if "=" not in pair:
            _fail(EXIT_CONFIG, f"--filled expects name=value, got {pair!r}")
        name, _, value = pair.partition("=")
        filled[name.strip()] = value

    try:
        request = SuggestionRequest(
            filled=filled, target=target, theta=theta, top_percent=top_percent
        )
        result = suggest(bundle, request)
    except (TargetError, ValueError) as exc:
        hint = difflib.get_close_matches(target, bundle.schema.field_names, n=1)
        extra = f" (did you mean {hint[0]!r}?)" if hint else ""
        _fail(EXIT_TARGET, f"{exc}{extra}")

    click.echo(f"model_used: {result.model_used}")
    click.echo(
        f"check_dep: {result.check_dep}  check_prob: {result.check_prob}  "
        f"top_mass: {result.top_mass:.4f}"
    )
    if result.endorsed:
        for value, prob in result.items:
            click.echo(f"{value}\t{prob:.4f}")
    else:
        click.echo("no suggestion (not endorsed)")


main.add_command(suggest_cmd, name="suggest")


@main.command()
@click.option("--data", "data_path", required=True)
@click.option("--schema", "schema_path", required=True)
@click.option("--scenario", default="sequential", show_default=True,
              type=click.Choice(evaluate.SCENARIOS))
@click.option("--algorithms", default="fieldsense,mfm", show_default=True,
              help="comma-separated algorithm names")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--min-candidates", default=10, show_default=True, type=int)
@click.option("--out", "out_path", required=True, help="report path prefix")
def evaluate_cmd(data_path, schema_path, scenario, algorithms, seed, min_candidates, out_path):
    """Benchmark algorithms on a time-split dataset; write JSON + CSV reports."""
    try:
        schema = load_schema(schema_path)
        dataset = load_dataset(schema, data_path)
    except (SchemaError, DataError) as exc:
        _fail(EXIT_IO, str(exc))
    names = [a.strip() for a in algorithms.split(",") if a.strip()]
    for name in names:
        try:
            evaluate.make_algorithm(name)
        except ValueError as exc:
            _fail(EXIT_CONFIG, str(exc))
    try:
        result = evaluate.run_benchmark(
            dataset, names, scenario=scenario, seed=seed, min_candidates=min_candidates
        )
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))

    out = Path(out_path)
    json_path = out.with_suffix(".json")
    csv_path = out.with_suffix(".csv")
    json_path.write_text(
        json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["algorithm", "scenario", "target", "mrr", "pcr",
                            "provided", "total"]
        )
        writer.writeheader()
        for name in sorted(result.reports):
            for row in result.reports[name].flat_rows():
                writer.writerow(row)
    click.echo(f"reports written to {json_path} and {csv_path}")
    for name in sorted(result.reports):
        report = result.reports[name]
        if report.error:
            click.echo(f"{name}: {report.error}")
        else:
            mrr = f"{report.mrr:.4f}" if report.mrr is not None else "n/a"
            click.echo(f"{name}: mrr={mrr} pcr={report.pcr:.4f} "
                       f"provided={report.provided}/{report.total}")


main.add_command(evaluate_cmd, name="evaluate")


@main.command()
@click.option("--model", "model_path", required=True)
@click.option("--bind", default="127.0.0.1:8040", show_default=True,
              help="host:port to listen on")
def serve(model_path, bind):
    """Serve schema and live suggestions over HTTP."""
    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        _fail(EXIT_CONFIG, f"--bind expects host:port, got {bind!r}")
    try:
        service.run(model_path, host=host, port=int(port_text))
    except DataError as exc:
        _fail(EXIT_IO, str(exc))


@main.command()
@click.option("--out", "out_dir", required=True, help="directory for schema.json + data.csv")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--instances", default=20_000, show_default=True, type=int)
def synth_cmd(out_dir, seed, instances):
    """Write a synthetic schema + dataset with planted dependencies."""
    dataset = synth.make_synthetic(seed=seed, n_instances=instances)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "schema.json").write_text(
        json.dumps(dataset.schema.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    field_names = dataset.schema.field_names
    with (out / "data.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(field_names + ["submission_time"])
        for inst in dataset.instances:
            writer.writerow(
                ["" if inst.values[f] is None else inst.values[f] for f in field_names]
                + [inst.submitted_at]
            )
    click.echo(f"wrote {out / 'schema.json'} and {out / 'data.csv'}")


main.add_command(synth_cmd, name="synth")


if __name__ == "__main__":
    main()
