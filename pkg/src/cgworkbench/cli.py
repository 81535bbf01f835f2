"""Batch command line: import, validate, stats, agree, predict, eval, serve.

Every command is deterministic given its files and flags, prints
newline-terminated output, and has a ``--json`` variant. Exit codes:
0 success, 1 domain error, 2 usage error. Defaults can be supplied in a
``cgw.toml`` key/value file in the working directory; the embedding
endpoint can also come from the ``CGW_EMBED_URL`` environment variable.
"""

from __future__ import annotations

import functools
import json
import os
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click

from . import corpusio, evaluation, heuristics, similarity
from .agreement import EventSetPair, LabelTable, embert, fleiss_kappa, pairwise_report
from .engine import DialogueState, Severity
from .errors import CGError
from .evaluation import (
    BELIEF_MACRO_CLASSES,
    CG_MACRO_CLASSES,
    EvalReport,
    final_labels,
    score,
    speaker_avg,
)
from .model import Speaker
from .similarity import LexicalSimilarity, PrecomputedVectors, RemoteEmbeddings

CONFIG_FILE = "cgw.toml"
ENV_EMBED_URL = "CGW_EMBED_URL"

PROVIDERS = ("lexical", "precomputed", "remote")


def load_config(path: Path = Path(CONFIG_FILE)) -> Dict[str, str]:
    """Parse a flat ``key = value`` config file; quotes optional, # comments."""
    config: Dict[str, str] = {}
    if not path.exists():
        return config
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CGError(f"bad config line {lineno}: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        config[key] = value.strip("\"'")
    return config


def domain_errors(fn):
    """Convert domain failures into exit code 1 with the message on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CGError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def build_provider(
    provider: str,
    vectors: Optional[str],
    embed_url: Optional[str],
    cosine_mode: str,
    fallback_lexical: bool,
    config: Dict[str, str],
) -> similarity.SimilarityProvider:
    if provider == "lexical":
        return LexicalSimilarity()
    if provider == "precomputed":
        vectors = vectors or config.get("vectors")
        if not vectors:
            raise click.UsageError("--vectors is required with --provider precomputed")
        return PrecomputedVectors.from_jsonl(vectors, mode=cosine_mode)
    url = embed_url or os.environ.get(ENV_EMBED_URL) or config.get("embed_url")
    if not url:
        raise click.UsageError(
            f"--embed-url (or {ENV_EMBED_URL}) is required with --provider remote"
        )
    fallback = LexicalSimilarity() if fallback_lexical else None
    return RemoteEmbeddings(url, mode=cosine_mode, fallback=fallback)


def provider_options(fn):
    fn = click.option(
        "--provider",
        type=click.Choice(PROVIDERS),
        default=None,
        help="Similarity provider (default from config, else lexical).",
    )(fn)
    fn = click.option("--vectors", type=click.Path(exists=True), default=None,
                      help="Precomputed vectors file (.vec.jsonl).")(fn)
    fn = click.option("--embed-url", default=None, help="Embedding service base URL.")(fn)
    fn = click.option(
        "--cosine-clamp",
        "cosine_mode",
        type=click.Choice(list(similarity.COSINE_MODES)),
        default="clamp",
        help="Map cosine onto [0,1] by clamping negatives or affine rescaling.",
    )(fn)
    fn = click.option("--fallback-lexical", is_flag=True,
                      help="Fall back to lexical similarity if the service fails.")(fn)
    return fn


@click.group()
@click.pass_context
def cli(ctx: click.Context) -> None:
    """Common ground annotation workbench."""
    ctx.obj = load_config()


@cli.command("import")
@click.argument("annotations", type=click.Path(exists=True))
@click.argument("transcript", type=click.Path(exists=True), required=False)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--id", "dialogue_id", default=None, help="Dialogue id (default: file stem).")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def import_cmd(annotations, transcript, output, dialogue_id, as_json):
    """Convert a transcript + annotation TSV into canonical dialogue JSON."""
    path = Path(annotations)
    stem = path.name[: -len(corpusio.ANNOTATION_EXT)] if path.name.endswith(
        corpusio.ANNOTATION_EXT
    ) else path.stem
    state = corpusio.parse_annotation_tsv(
        path.read_text(encoding="utf-8"), dialogue_id=dialogue_id or stem
    )
    if transcript:
        expected = corpusio.parse_transcript(Path(transcript).read_text(encoding="utf-8"))
        if expected != state.utterances:
            raise CGError("transcript does not match the annotation table's utterances")
    out_path = Path(output) if output else path.with_name(f"{stem}{corpusio.CANONICAL_EXT}")
    out_path.write_bytes(corpusio.to_json(state))
    warnings = [d for d in state.validate() if d.severity is Severity.WARNING]
    if as_json:
        click.echo(json.dumps({
            "path": str(out_path),
            "utterances": state.num_utterances,
            "events": len(state.events),
            "records": len(state.record_log),
            "warnings": len(warnings),
        }, sort_keys=True))
    else:
        click.echo(
            f"wrote {out_path} ({state.num_utterances} utterances, "
            f"{len(state.events)} events, {len(state.record_log)} records)"
        )


@cli.command("validate")
@click.argument("dialogue", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def validate_cmd(dialogue, as_json):
    """Check a dialogue's annotation consistency; exit 1 on errors."""
    state = corpusio.load_state(dialogue)
    diagnostics = state.validate()
    if as_json:
        click.echo(json.dumps([
            {"severity": d.severity.value, "code": d.code, "event": d.event, "message": d.message}
            for d in diagnostics
        ], sort_keys=True))
    elif not diagnostics:
        click.echo("ok: no diagnostics")
    else:
        for d in diagnostics:
            click.echo(f"{d.severity.value} {d.code} {d.event}: {d.message}")
    if any(d.severity is Severity.ERROR for d in diagnostics):
        raise click.exceptions.Exit(1)


@cli.command("stats")
@click.argument("dialogues", type=click.Path(exists=True), nargs=-1, required=True)
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def stats_cmd(dialogues, as_json):
    """Annotation-type distribution over one or more dialogues."""
    report = evaluation.distribution(corpusio.load_state(p) for p in dialogues)
    click.echo(json.dumps(report.to_dict(), sort_keys=True) if as_json else report.to_text())


def _read_event_lines(path: str) -> List[str]:
    return [line for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]


def _annotator_name(path: str) -> str:
    name = Path(path).name
    for ext in (corpusio.CANONICAL_EXT, corpusio.ANNOTATION_EXT, ".events"):
        if name.endswith(ext):
            return name[: -len(ext)]
    return Path(path).stem


def _annotator_names(paths: Sequence[str]) -> List[str]:
    names: List[str] = []
    for path in paths:
        base = _annotator_name(path)
        name = base
        n = 2
        while name in names:
            name = f"{base}#{n}"
            n += 1
        names.append(name)
    return names


def _label_tasks(state: DialogueState, event_order: Sequence[str]) -> Dict[str, List[str]]:
    per_speaker = {sp: final_labels(state, sp) for sp in (Speaker.A, Speaker.B)}
    return {
        "Bel(A)": [per_speaker[Speaker.A][e][0] for e in event_order],
        "Bel(B)": [per_speaker[Speaker.B][e][0] for e in event_order],
        "CG(A)": [per_speaker[Speaker.A][e][1] for e in event_order],
        "CG(B)": [per_speaker[Speaker.B][e][1] for e in event_order],
    }


@cli.command("agree")
@click.option("--metric", type=click.Choice(["embert", "cohen", "fleiss"]), required=True)
@click.argument("inputs", type=click.Path(exists=True), nargs=-1, required=True)
@click.option("--json", "as_json", is_flag=True)
@provider_options
@click.pass_obj
@domain_errors
def agree_cmd(config, metric, inputs, as_json, provider, vectors, embed_url, cosine_mode,
              fallback_lexical):
    """Inter-annotator agreement over event files or annotated dialogues."""
    if len(inputs) < 2:
        raise click.UsageError("need at least two input files")
    names = _annotator_names(inputs)
    if metric == "embert":
        provider = provider or config.get("provider") or "lexical"
        sim = build_provider(provider, vectors, embed_url, cosine_mode, fallback_lexical, config)
        event_lists = [_read_event_lines(p) for p in inputs]
        matrix = [
            [
                1.0 if i == j else embert(EventSetPair.of(event_lists[i], event_lists[j]), sim)
                for j in range(len(inputs))
            ]
            for i in range(len(inputs))
        ]
        if as_json:
            click.echo(json.dumps({"metric": "embert", "names": names, "matrix": matrix},
                                  sort_keys=True))
        else:
            width = max(len(n) for n in names) + 2
            click.echo("".ljust(width) + "".join(n.rjust(width) for n in names))
            for name, row in zip(names, matrix):
                click.echo(name.ljust(width) + "".join(f"{v:.2f}".rjust(width) for v in row))
        return

    states = [corpusio.load_state(p) for p in inputs]
    event_order = list(states[0].events)
    for name, state in zip(names, states):
        if set(state.events) != set(event_order):
            raise CGError(f"event sets differ: {name} does not match {names[0]}")
    annotations = {name: _label_tasks(state, event_order) for name, state in zip(names, states)}

    if metric == "cohen":
        report = pairwise_report(annotations)
        if as_json:
            click.echo(json.dumps({
                "metric": "cohen",
                "names": names,
                "matrix": report.matrix(),
                "per_task": {
                    f"{a}|{b}": kappas
                    for (a, b), kappas in report.per_task.items()
                },
            }, sort_keys=True))
        else:
            click.echo(report.to_text())
        return

    tasks = ["Bel(A)", "Bel(B)", "CG(A)", "CG(B)"]
    per_task = {
        task: fleiss_kappa(
            LabelTable.from_ratings({name: annotations[name][task] for name in names})
        )
        for task in tasks
    }
    overall = sum(per_task.values()) / len(per_task)
    if as_json:
        click.echo(json.dumps({"metric": "fleiss", "per_task": per_task, "mean": overall},
                              sort_keys=True))
    else:
        for task, value in per_task.items():
            click.echo(f"{task}: {value:.2f}")
        click.echo(f"mean: {overall:.2f}")


def _sweep_grid(spec_text: str) -> List[float]:
    try:
        grid = [float(tok) for tok in spec_text.split(",") if tok.strip() != ""]
    except ValueError:
        raise click.UsageError(f"bad sweep grid: {spec_text!r}") from None
    if not grid:
        raise click.UsageError("sweep grid is empty")
    return grid


def _cg_reports(
    state: DialogueState, predicted: Dict[str, Tuple[str, str]], accuracy_skip_null: bool
) -> EvalReport:
    gold = {sp: final_labels(state, sp) for sp in (Speaker.A, Speaker.B)}
    events = list(state.events)
    report_a = score(
        [gold[Speaker.A][e][1] for e in events],
        [predicted[e][0] for e in events],
        CG_MACRO_CLASSES,
        accuracy_skip_null=accuracy_skip_null,
    )
    report_b = score(
        [gold[Speaker.B][e][1] for e in events],
        [predicted[e][1] for e in events],
        CG_MACRO_CLASSES,
        accuracy_skip_null=accuracy_skip_null,
    )
    return speaker_avg(report_a, report_b)


@cli.command("predict")
@click.argument("dialogue", type=click.Path(exists=True))
@click.option("--threshold", type=float, default=None,
              help=f"Similarity threshold (default {heuristics.DEFAULT_THRESHOLD}).")
@click.option("--beliefs-at", type=click.Choice(list(heuristics.BELIEF_MODES)), default="final")
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Write predictions TSV here instead of stdout.")
@click.option("--sweep", default=None, help='Threshold grid, e.g. "0,0.2,0.4,...,1".')
@click.option("--accuracy-skip-null", is_flag=True,
              help="Drop gold-null events from sweep accuracy denominators.")
@click.option("--json", "as_json", is_flag=True)
@provider_options
@click.pass_obj
@domain_errors
def predict_cmd(config, dialogue, threshold, beliefs_at, output, sweep, accuracy_skip_null,
                as_json, provider, vectors, embed_url, cosine_mode, fallback_lexical):
    """Heuristic CG prediction from gold beliefs; --sweep scores a grid."""
    state = corpusio.load_state(dialogue)
    provider = provider or config.get("provider") or "lexical"
    sim = build_provider(provider, vectors, embed_url, cosine_mode, fallback_lexical, config)

    if sweep is not None:
        grid = _sweep_grid(sweep)
        rows = []
        for t in grid:
            records = heuristics.predict_dialogue(state, sim, threshold=t, beliefs_at=beliefs_at)
            predicted = corpusio.predictions_from_records(state, records)
            report = _cg_reports(state, predicted, accuracy_skip_null)
            in_count = sum(
                1 for labels in predicted.values() for token in labels if token == "IN"
            )
            rows.append({
                "threshold": t,
                "ja_f1": report.per_class_f1["JA"],
                "in_f1": report.per_class_f1["IN"],
                "rt_f1": report.per_class_f1["RT"],
                "macro_f1": report.macro_f1,
                "accuracy": report.accuracy,
                "in_predictions": in_count,
            })
        if as_json:
            click.echo(json.dumps({"sweep": rows}, sort_keys=True))
        else:
            header = ["Threshold", "JA F1", "IN F1", "RT F1", "Macro F1", "Accuracy"]
            click.echo("".join(h.rjust(11) for h in header))
            for row in rows:
                click.echo(
                    f"{row['threshold']:>11g}"
                    + "".join(
                        f"{row[k]:>11.2f}"
                        for k in ("ja_f1", "in_f1", "rt_f1", "macro_f1", "accuracy")
                    )
                )
        return

    if threshold is None:
        threshold = float(config.get("threshold", heuristics.DEFAULT_THRESHOLD))
    records = heuristics.predict_dialogue(state, sim, threshold=threshold, beliefs_at=beliefs_at)
    predicted = corpusio.predictions_from_records(state, records)
    body = corpusio.serialize_predictions({"cg": predicted})
    if output:
        Path(output).write_text(body, encoding="utf-8")
        if as_json:
            click.echo(json.dumps({
                "path": output,
                "threshold": threshold,
                "predictions": {e: list(v) for e, v in predicted.items()},
            }, sort_keys=True))
        else:
            click.echo(f"wrote {output} ({len(predicted)} events, threshold {threshold:g})")
    elif as_json:
        click.echo(json.dumps({
            "threshold": threshold,
            "predictions": {e: list(v) for e, v in predicted.items()},
        }, sort_keys=True))
    else:
        click.echo(body, nl=False)


@cli.command("eval")
@click.option("--task", type=click.Choice(["bel", "cg"]), required=True)
@click.option("--gold", type=click.Path(exists=True), required=True)
@click.option("--pred", type=click.Path(exists=True), required=True)
@click.option("--accuracy-skip-null", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def eval_cmd(task, gold, pred, accuracy_skip_null, as_json):
    """Score a predictions file against gold labels, speaker-averaged."""
    state = corpusio.load_state(gold)
    predictions = corpusio.parse_predictions(
        Path(pred).read_text(encoding="utf-8"), known_events=list(state.events)
    )
    by_event = predictions.get(task, {})
    events = list(state.events)
    gold_labels = {sp: final_labels(state, sp) for sp in (Speaker.A, Speaker.B)}
    column = 0 if task == "bel" else 1
    macro = BELIEF_MACRO_CLASSES if task == "bel" else CG_MACRO_CLASSES
    report_a = score(
        [gold_labels[Speaker.A][e][column] for e in events],
        [by_event.get(e, ("0", "0"))[0] for e in events],
        macro,
        accuracy_skip_null=accuracy_skip_null,
    )
    report_b = score(
        [gold_labels[Speaker.B][e][column] for e in events],
        [by_event.get(e, ("0", "0"))[1] for e in events],
        macro,
        accuracy_skip_null=accuracy_skip_null,
    )
    averaged = speaker_avg(report_a, report_b)
    if as_json:
        click.echo(json.dumps({
            "task": task,
            "speaker_a": report_a.to_dict(),
            "speaker_b": report_b.to_dict(),
            "average": averaged.to_dict(),
        }, sort_keys=True))
    else:
        click.echo(averaged.to_text())


@cli.command("serve")
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--data", "data_dir", type=click.Path(), default="dialogues")
@click.option("--embed-url", default=None)
@click.pass_obj
@domain_errors
def serve_cmd(config, port, host, data_dir, embed_url):
    """Run the annotation HTTP service over a directory of dialogues."""
    from .server import serve

    if port is None:
        port = int(config.get("port", 8777))
    embed_url = embed_url or os.environ.get(ENV_EMBED_URL) or config.get("embed_url")
    serve(data_dir, host=host, port=port, embed_url=embed_url)


def main() -> None:
    cli(auto_envvar_prefix="CGW")


if __name__ == "__main__":
    main()
