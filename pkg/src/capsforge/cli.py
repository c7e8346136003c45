"""Command-line pipeline: ingest, fuse, filter, stats, score, export, eval.

Exit codes: 0 success, 1 usage or configuration error, 2 partial
failure (some records failed at the backend but the run completed and
the report was written). Reports are line-delimited JSON on stdout so
every stage is scriptable.

Configuration precedence: built-in defaults < --config file < explicit
flags.
"""

from __future__ import annotations

import glob as globlib
import json
import sys
from pathlib import Path

import click

from .backend import BackendConfig
from .cider import cider_d
from .errors import CapsforgeError, ConfigError
from .evalservice import (
    EvalStore,
    SystemOutput,
    create_session,
    make_server,
)
from .filters import FilterConfig, filter_corpus
from .fusion import fuse_corpus
from .records import FusionStatus
from .sampledata import demo_records
from .shardio import DedupKey, dedup, read_fused_shard, read_shard, write_shard
from .stats import (
    DEFAULT_HASH_SEED,
    DEFAULT_PRECISION,
    StatsMode,
    caption_stats,
    merge_stats,
)
from .triplets import emit_training_config, export_triplets, triplets_from_records

_CONFIG_SCHEMA = {
    "input_glob": None,
    "output_dir": None,
    "seed": None,
    "backend": {
        "endpoint_url": None,
        "model_name": None,
        "api_key_env": None,
        "max_in_flight": None,
        "timeout_ms": None,
        "temperature": None,
        "max_retries": None,
    },
    "filter": {
        "concat_containment_threshold": None,
        "min_words": None,
        "max_words": None,
        "copy_similarity_threshold": None,
    },
    "stats": {
        "mode": None,
        "precision": None,
        "hash_seed": None,
    },
}


def load_pipeline_config(path: str | Path | None) -> dict:
    """Parse the config file, rejecting unknown keys by name."""
    if path is None:
        return {}
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ConfigError("config file must hold a JSON object")

    def check(section: dict, schema: dict, prefix: str) -> None:
        for key, value in section.items():
            if key not in schema:
                raise ConfigError(f"unknown config key: {prefix}{key}")
            subschema = schema[key]
            if isinstance(subschema, dict):
                if not isinstance(value, dict):
                    raise ConfigError(f"config key {prefix}{key} must be an object")
                check(value, subschema, f"{prefix}{key}.")

    check(obj, _CONFIG_SCHEMA, "")
    return obj


def _cfg(config: dict, section: str, key: str, flag_value, default):
    """Effective value for one option: flag wins, then config, then default."""
    if flag_value is not None:
        return flag_value
    table = config.get(section, {}) if section else config
    value = table.get(key)
    return default if value is None else value


def _expand_glob(pattern: str) -> list[Path]:
    paths = sorted(Path(p) for p in globlib.glob(pattern))
    if not paths:
        raise ConfigError(f"no files match {pattern!r}")
    return paths


def _emit(obj: dict) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False))


@click.group()
def cli():
    """Caption-fusion corpus refinery."""


@cli.command()
@click.option("--input", "input_glob", default=None, help="Glob of source .jsonl/.rlc files.")
@click.option("--demo", type=int, default=None, help="Generate N synthetic demo records instead.")
@click.option("--output-dir", default=None)
@click.option("--shard-size", type=int, default=10_000, show_default=True)
@click.option(
    "--dedup-key",
    type=click.Choice(["id", "image_ref", "none"]),
    default="id",
    show_default=True,
)
@click.option("--seed", type=int, default=None, help="Seed for --demo generation.")
@click.option("--config", "config_path", default=None, help="Pipeline config file.")
def ingest(input_glob, demo, output_dir, shard_size, dedup_key, seed, config_path):
    """Normalize source data into canonical record-line shards."""
    config = load_pipeline_config(config_path)
    input_glob = _cfg(config, "", "input_glob", input_glob, None)
    output_dir = Path(_cfg(config, "", "output_dir", output_dir, "ingested"))
    seed = int(_cfg(config, "", "seed", seed, 0))
    if demo is None and input_glob is None:
        raise click.UsageError("either --input or --demo is required")

    if demo is not None:
        records = demo_records(demo, seed=seed)
    else:
        from .ingest import read_source_files

        records = read_source_files(_expand_glob(input_glob))
    if dedup_key != "none":
        records = dedup(records, DedupKey(dedup_key))

    total = 0
    shard_idx = 0
    batch = []
    manifests = []
    for record in records:
        batch.append(record)
        if len(batch) >= shard_size:
            manifests.append(write_shard(batch, output_dir / f"part-{shard_idx:05d}.rlc"))
            total += len(batch)
            batch = []
            shard_idx += 1
    if batch or shard_idx == 0:
        manifests.append(write_shard(batch, output_dir / f"part-{shard_idx:05d}.rlc"))
        total += len(batch)
    _emit(
        {
            "command": "ingest",
            "records": total,
            "shards": len(manifests),
            "output_dir": str(output_dir),
        }
    )
    return 0


@cli.command()
@click.option("--input", "input_glob", default=None, help="Glob of input .rlc shards.")
@click.option("--output-dir", default=None)
@click.option("--endpoint", default=None, help="Chat-completion endpoint URL.")
@click.option("--model", default=None)
@click.option("--api-key-env", default=None, show_default="CAPSFORGE_API_KEY")
@click.option("--max-in-flight", type=int, default=None, show_default="8")
@click.option("--timeout-ms", type=int, default=None, show_default="30000")
@click.option("--temperature", type=float, default=None, show_default="0.0")
@click.option("--max-retries", type=int, default=None, show_default="3")
@click.option("--cache-dir", default=None, help="Fusion cache directory (default: <output>/cache).")
@click.option("--resume", is_flag=True, help="Skip output shards whose manifest verifies.")
@click.option("--config", "config_path", default=None, help="Pipeline config file.")
def fuse(
    input_glob,
    output_dir,
    endpoint,
    model,
    api_key_env,
    max_in_flight,
    timeout_ms,
    temperature,
    max_retries,
    cache_dir,
    resume,
    config_path,
):
    """Fuse raw and synthetic captions through a chat-completion backend."""
    config = load_pipeline_config(config_path)
    input_glob = _cfg(config, "", "input_glob", input_glob, None)
    output_dir = Path(_cfg(config, "", "output_dir", output_dir, "fused"))
    if input_glob is None:
        raise click.UsageError("--input is required")
    endpoint = _cfg(config, "backend", "endpoint_url", endpoint, None)
    model = _cfg(config, "backend", "model_name", model, None)
    if endpoint is None or model is None:
        raise click.UsageError("--endpoint and --model are required")
    backend_config = BackendConfig(
        endpoint_url=endpoint,
        model_name=model,
        api_key_env=_cfg(config, "backend", "api_key_env", api_key_env, "CAPSFORGE_API_KEY"),
        max_in_flight=int(_cfg(config, "backend", "max_in_flight", max_in_flight, 8)),
        timeout_ms=int(_cfg(config, "backend", "timeout_ms", timeout_ms, 30_000)),
        temperature=float(_cfg(config, "backend", "temperature", temperature, 0.0)),
        max_retries=int(_cfg(config, "backend", "max_retries", max_retries, 3)),
    )
    try:
        backend_config.validate()
    except ValueError as exc:
        raise click.UsageError(str(exc))
    shards = _expand_glob(input_glob)
    cache = Path(cache_dir) if cache_dir else output_dir / "cache"
    report = fuse_corpus(
        shards, output_dir, backend_config, cache_dir=cache, resume=resume
    )
    _emit({"command": "fuse", **report.as_dict()})
    return 2 if report.failures else 0


@cli.command("filter")
@click.option("--input", "input_glob", default=None, help="Glob of fused .rlc shards.")
@click.option("--output-dir", default=None)
@click.option("--write-rejected", is_flag=True, help="Also write rejected records.")
@click.option("--report", "report_path", default=None, show_default="<output>/filter_report")
@click.option("--config", "config_path", default=None, help="Pipeline config file.")
def filter_cmd(input_glob, output_dir, write_rejected, report_path, config_path):
    """Reject degenerate fusions with the heuristic rule set."""
    config = load_pipeline_config(config_path)
    input_glob = _cfg(config, "", "input_glob", input_glob, None)
    output_dir = Path(_cfg(config, "", "output_dir", output_dir, "filtered"))
    if input_glob is None:
        raise click.UsageError("--input is required")
    fcfg_table = config.get("filter", {})
    fcfg = FilterConfig(
        concat_containment_threshold=float(
            fcfg_table.get("concat_containment_threshold", 0.85)
        ),
        min_words=int(fcfg_table.get("min_words", 3)),
        max_words=int(fcfg_table.get("max_words", 128)),
        copy_similarity_threshold=float(fcfg_table.get("copy_similarity_threshold", 0.95)),
    )
    try:
        fcfg.validate()
    except ValueError as exc:
        raise click.UsageError(str(exc))
    shards = _expand_glob(input_glob)
    _, report = filter_corpus(shards, fcfg, output_dir, write_rejected=write_rejected)
    payload = {"command": "filter", **report.as_dict()}
    _emit(payload)
    report_file = Path(report_path) if report_path else output_dir / "filter_report"
    report_file.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


@cli.command()
@click.option("--input", "input_glob", default=None, help="Glob of .rlc shards.")
@click.option("--mode", type=click.Choice(["exact", "sketch"]), default=None, show_default="exact")
@click.option("--precision", type=int, default=None, show_default=str(DEFAULT_PRECISION))
@click.option(
    "--field",
    type=click.Choice(["raw", "synthetic", "fused"]),
    default="raw",
    show_default=True,
)
@click.option("--hash-seed", type=int, default=None, show_default=str(DEFAULT_HASH_SEED))
@click.option("--config", "config_path", default=None, help="Pipeline config file.")
def stats(input_glob, mode, precision, field, hash_seed, config_path):
    """Average caption length and unique-trigram count."""
    config = load_pipeline_config(config_path)
    input_glob = _cfg(config, "", "input_glob", input_glob, None)
    if input_glob is None:
        raise click.UsageError("--input is required")
    mode = StatsMode(_cfg(config, "stats", "mode", mode, "exact"))
    precision = int(_cfg(config, "stats", "precision", precision, DEFAULT_PRECISION))
    hash_seed = int(_cfg(config, "stats", "hash_seed", hash_seed, DEFAULT_HASH_SEED))

    def captions(path):
        if field == "fused":
            for record in read_fused_shard(path):
                if record.status is FusionStatus.FUSED:
                    yield record.fused_caption
        else:
            attr = "raw_caption" if field == "raw" else "synthetic_caption"
            for record in read_shard(path):
                yield getattr(record, attr)

    shards = _expand_glob(input_glob)
    total = None
    for shard in shards:
        part = caption_stats(captions(shard), mode, precision, hash_seed)
        total = part if total is None else merge_stats(total, part)
    assert total is not None
    _emit({"command": "stats", "field": field, **total.as_dict()})
    return 0


@cli.command("score-cider")
@click.option("--candidates", required=True, help="Record-line file: one candidate per id.")
@click.option("--references", required=True, help="Record-line file: one line per reference.")
@click.option("--per-image/--no-per-image", default=True, show_default=True)
def score_cider(candidates, references, per_image):
    """Consensus caption score of candidates against references."""
    from .scorefiles import read_caption_file

    cand_map = {}
    for record_id, caption in read_caption_file(candidates):
        cand_map[record_id] = caption
    ref_map: dict[str, list[str]] = {}
    for record_id, caption in read_caption_file(references):
        ref_map.setdefault(record_id, []).append(caption)
    score = cider_d(cand_map, ref_map)
    if per_image:
        for image_id in sorted(score.per_image):
            _emit({"id": image_id, "cider_d": round(score.per_image[image_id], 6)})
    _emit(
        {
            "command": "score-cider",
            "images": len(score.per_image),
            "corpus_mean": round(score.corpus_mean, 6),
            "display": round(score.display, 2),
        }
    )
    return 0


@cli.command("export-triplets")
@click.option("--input", "input_glob", default=None, help="Glob of filtered fused shards.")
@click.option("--out-dir", default=None)
@click.option("--val-fraction", type=float, default=None, show_default="0.01")
@click.option("--seed", type=int, default=None, show_default="0")
@click.option("--config", "config_path", default=None, help="Pipeline config file.")
def export_triplets_cmd(input_glob, out_dir, val_fraction, seed, config_path):
    """Export (raw, synthetic, fused) triplets as chat finetuning data."""
    config = load_pipeline_config(config_path)
    input_glob = _cfg(config, "", "input_glob", input_glob, None)
    out_dir = Path(_cfg(config, "", "output_dir", out_dir, "triplets"))
    seed = int(_cfg(config, "", "seed", seed, 0))
    val_fraction = float(val_fraction if val_fraction is not None else 0.01)
    if input_glob is None:
        raise click.UsageError("--input is required")
    if not 0.0 <= val_fraction < 1.0:
        raise click.UsageError("--val-fraction must be in [0, 1)")

    def triplet_stream():
        for shard in _expand_glob(input_glob):
            yield from triplets_from_records(read_fused_shard(shard))

    result = export_triplets(triplet_stream(), out_dir, val_fraction, seed)
    config_path_out = emit_training_config(Path(out_dir) / "training_config.txt")
    _emit(
        {
            "command": "export-triplets",
            "train": result.train_count,
            "val": result.val_count,
            "train_path": str(result.train_path),
            "val_path": str(result.val_path),
            "training_config": str(config_path_out),
        }
    )
    return 0


@cli.group()
def eval():
    """Blinded pairwise human evaluation."""


def _system_outputs(pattern: str) -> dict[str, SystemOutput]:
    outputs: dict[str, SystemOutput] = {}
    for shard in _expand_glob(pattern):
        for record in read_fused_shard(shard):
            if record.status is not FusionStatus.FUSED:
                continue
            outputs[record.base.id] = SystemOutput(
                id=record.base.id,
                raw_caption=record.base.raw_caption,
                synthetic_caption=record.base.synthetic_caption,
                image_ref=record.base.image_ref,
                output=record.fused_caption,
            )
    return outputs


@eval.command("create")
@click.option("--outputs-a", required=True, help="Glob of system A fused shards.")
@click.option("--outputs-b", required=True, help="Glob of system B fused shards.")
@click.option("--name-a", default="system_a", show_default=True)
@click.option("--name-b", default="system_b", show_default=True)
@click.option("--n", "sample_n", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--state-dir", required=True)
def eval_create(outputs_a, outputs_b, name_a, name_b, sample_n, seed, state_dir):
    """Create a blinded session from two systems' outputs."""
    store = EvalStore(state_dir)
    session = create_session(
        _system_outputs(outputs_a),
        _system_outputs(outputs_b),
        sample_n=sample_n,
        seed=seed,
        system_a_name=name_a,
        system_b_name=name_b,
    )
    session = store.add_session(session)
    _emit(
        {
            "command": "eval-create",
            "session_id": session.session_id,
            "total": len(session.items),
        }
    )
    return 0


@eval.command("serve")
@click.option("--port", type=int, default=8325, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--state-dir", required=True)
@click.option("--ui-dir", default=None, help="Directory of built UI assets to serve at /.")
def eval_serve(port, host, state_dir, ui_dir):
    """Serve the judgment API (and UI assets, when provided)."""
    store = EvalStore(state_dir)
    server = make_server(store, host=host, port=port, ui_dir=ui_dir, quiet=False)
    click.echo(f"serving on http://{host}:{port}/ (state: {state_dir})", err=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


@eval.command("report")
@click.argument("session_id")
@click.option("--state-dir", required=True)
def eval_report(session_id, state_dir):
    """Print the unblinded tally for a session."""
    store = EvalStore(state_dir)
    session = store.get_session(session_id)
    tally = store.tally(session_id)
    _emit(
        {
            "command": "eval-report",
            "session_id": session_id,
            "system_a": session.system_a_name,
            "system_b": session.system_b_name,
            "total_items": len(session.items),
            **tally.as_dict(),
        }
    )
    return 0


def main(argv=None) -> int:
    try:
        result = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        return 1
    except CapsforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return int(result) if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
