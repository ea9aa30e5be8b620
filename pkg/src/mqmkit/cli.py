"""Command-line entry point.

Every subcommand is a thin shell over a library operation. Tabular results
print as aligned text by default and as JSON with ``--format json`` (the
JSON shapes are pinned by the schemas shipped under ``mqmkit/schemas``).
Exit codes: 0 success, 1 data/validation errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import corpus as corpus_io
from . import mqm_format
from .experiments import DEFAULT_SIZES as EXPERIMENT_SIZES
from .experiments import InsufficientData, run_experiment_suite
from .features import MODES, MissingReference
from .metrics import BleuConfig, ChrfConfig, EmptyReference, chrf, sentence_bleu
from .providers import MockProvider, ProviderSpec, build_hypotheses
from .rank_correlation import (
    DegenerateInput,
    LengthMismatch,
    SampleTooSmall,
    agreement_report,
    correlation_matrix,
)
from .regressor import HEADS, RegressorConfig, TrainedModel, evaluate, train
from .scoring import score_dataset, score_unit
from .tables import format_tau, render_table
from .taxonomy import Corpus, validate_annotation

DATA_ERRORS = (
    mqm_format.MqmFormatError,
    corpus_io.ParseError,
    corpus_io.InsufficientUnits,
    InsufficientData,
    DegenerateInput,
    LengthMismatch,
    SampleTooSmall,
    MissingReference,
    EmptyReference,
    FileNotFoundError,
    ValueError,
)


def _emit(payload: dict, text: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _read_score_table(path: Path) -> dict[str, list]:
    """TSV with a header row; numeric columns parsed as floats."""
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{path} is empty")
    header = lines[0].split("\t")
    columns: dict[str, list] = {name: [] for name in header}
    for line_number, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise ValueError(f"{path}:{line_number}: expected {len(header)} columns")
        for name, cell in zip(header, cells):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return columns


# -- subcommand handlers -------------------------------------------------


def _cmd_parse(args) -> int:
    items = mqm_format.parse_document(Path(args.input).read_text(encoding="utf-8"))
    payload = {
        "units": [
            {"unit": corpus_io.unit_to_dict(unit), "annotation": ann.to_dict()}
            for unit, ann in items
        ]
    }
    rows = [
        [unit.id, str(len(ann.errors))]
        for unit, ann in items
    ]
    _emit(payload, render_table(["unit_id", "errors"], rows), args.format)
    return 0


def _cmd_validate(args) -> int:
    items = mqm_format.parse_document(Path(args.input).read_text(encoding="utf-8"))
    rows = []
    payload = {"units": []}
    hard_total = 0
    for unit, ann in items:
        violations = validate_annotation(unit, ann)
        hard_total += sum(1 for v in violations if not v.is_warning)
        payload["units"].append(
            {"unit_id": unit.id, "violations": [v.to_dict() for v in violations]}
        )
        for v in violations:
            rows.append(
                [unit.id, v.code.value, "warning" if v.is_warning else "error", v.message]
            )
    text = render_table(["unit_id", "code", "level", "message"], rows) if rows else "ok"
    _emit(payload, text, args.format)
    return 1 if hard_total else 0


def _load_scored_pairs(args):
    if args.annotations:
        items = mqm_format.parse_document(Path(args.annotations).read_text(encoding="utf-8"))
        return [(unit, ann) for unit, ann in items]
    pairs = corpus_io.load_annotated_jsonl(args.dataset)
    return [(unit, ann) for unit, ann in pairs if ann is not None]


def _cmd_score(args) -> int:
    pairs = _load_scored_pairs(args)
    report = score_dataset([ann for _, ann in pairs], top_k=args.top_k)
    rows = [
        [uid, str(s.accuracy), str(s.fluency), str(s.style), str(s.total)]
        for uid, s in zip(report.unit_ids, report.scores)
    ]
    text = render_table(["unit_id", "accuracy", "fluency", "style", "total"], rows)
    means = "  ".join(f"{k}={report.means[k]:.2f}" for k in ("accuracy", "fluency", "style", "total"))
    freq = ", ".join(f"{sub}/{dim}:{count}" for sub, dim, count in report.frequent_error_types)
    text += f"\n\nmeans: {means}\ntop error types: {freq or '-'}"
    _emit(report.to_dict(), text, args.format)
    return 0


def _variants(arg: str) -> tuple[str, ...]:
    return ("eq5", "tau_b") if arg == "both" else (arg,)


def _cmd_corr(args) -> int:
    table = _read_score_table(Path(args.input))
    names = args.columns.split(",") if args.columns else list(table)
    for name in names:
        if name not in table:
            raise ValueError(f"no column {name!r} in {args.input}")
        if not all(isinstance(v, float) for v in table[name]):
            raise ValueError(f"column {name!r} is not numeric")
    inverse = set(args.inverse.split(",")) if args.inverse else set()
    if not args.no_auto_inverse:
        inverse |= {n for n in names if "bleu" in n.lower() or "chrf" in n.lower()}

    payload: dict = {"columns": names, "inverse": sorted(inverse), "matrices": {}}
    texts = []
    for variant in _variants(args.variant):
        matrix = correlation_matrix(
            {n: table[n] for n in names}, variant=variant, inverse=sorted(inverse)
        )
        payload["matrices"][variant] = {
            a: {b: matrix[a][b].to_dict() for b in names} for a in names
        }
        rows = [
            [a] + [format_tau(matrix[a][b].tau, matrix[a][b].stars) for b in names]
            for a in names
        ]
        texts.append(f"Kendall tau ({variant})\n" + render_table([""] + names, rows))
    _emit(payload, "\n\n".join(texts), args.format)
    return 0


def _score_columns(path: Path) -> dict[str, dict[str, float]]:
    table = _read_score_table(path)
    if "unit_id" not in table:
        raise ValueError(f"{path} lacks a unit_id column")
    ids = [str(uid) for uid in table["unit_id"]]
    return {
        name: dict(zip(ids, values))
        for name, values in table.items()
        if name != "unit_id"
    }


def _cmd_agree(args) -> int:
    primary = _score_columns(Path(args.primary))
    validators = [_score_columns(Path(p)) for p in args.validators]
    texts = []
    payload: dict = {"dimensions": {}}
    for variant in _variants(args.variant):
        report = agreement_report(primary, validators, variant=variant)
        payload["dimensions"][variant] = {
            dim: result.to_dict() for dim, result in report.items()
        }
        rows = [
            [dim, format_tau(r.tau, r.stars), str(r.n)] for dim, r in report.items()
        ]
        texts.append(
            f"Annotator agreement ({variant})\n"
            + render_table(["dimension", "tau", "n"], rows)
        )
    _emit(payload, "\n\n".join(texts), args.format)
    return 0


def _cmd_stats(args) -> int:
    units = corpus_io.load_parallel(args.dataset, fmt="jsonl")
    sampled = corpus_io.load_parallel(args.sampled, fmt="jsonl") if args.sampled else None
    stats = corpus_io.corpus_stats(units, sampled)
    rows = []
    for key, row in stats.rows.items():
        rows.append(
            [
                key,
                str(row.total_pairs),
                str(row.sampled_pairs),
                "-" if row.avg_source_len is None else f"{row.avg_source_len:.2f}",
                "-" if row.avg_reference_len is None else f"{row.avg_reference_len:.2f}",
                "-" if row.avg_hypothesis_len is None else f"{row.avg_hypothesis_len:.2f}",
            ]
        )
    text = render_table(
        ["corpus", "total", "sampled", "avg_src_len", "avg_ref_len", "avg_hyp_len"], rows
    )
    _emit(stats.to_dict(), text, args.format)
    return 0


def _cmd_metrics(args) -> int:
    bleu_cfg = BleuConfig(max_ngram_order=args.bleu_order, tokenizer=args.tokenizer)
    chrf_cfg = ChrfConfig(char_ngram_order=args.chrf_order)
    rows = []
    if args.dataset:
        units = corpus_io.load_parallel(args.dataset, fmt="jsonl")
        for unit in units:
            if unit.reference is None or unit.hypothesis is None:
                raise ValueError(f"unit {unit.id!r} lacks a reference or hypothesis")
            rows.append(
                (
                    unit.id,
                    sentence_bleu(unit.hypothesis, unit.reference, bleu_cfg),
                    chrf(unit.hypothesis, unit.reference, chrf_cfg),
                )
            )
    else:
        if not args.references:
            raise ValueError("--hypotheses needs --references")
        hyps = Path(args.hypotheses).read_text(encoding="utf-8").splitlines()
        refs = Path(args.references).read_text(encoding="utf-8").splitlines()
        if len(hyps) != len(refs):
            raise ValueError(
                f"{len(hyps)} hypotheses but {len(refs)} references; files must align"
            )
        for i, (hyp, ref) in enumerate(zip(hyps, refs), start=1):
            rows.append((f"line-{i}", sentence_bleu(hyp, ref, bleu_cfg), chrf(hyp, ref, chrf_cfg)))
    payload = {
        "rows": [{"id": uid, "bleu": b, "chrf": c} for uid, b, c in rows]
    }
    text = render_table(
        ["id", "bleu", "chrf"],
        [[uid, f"{b:.4f}", f"{c:.4f}"] for uid, b, c in rows],
    )
    _emit(payload, text, args.format)
    return 0


def _cmd_split(args) -> int:
    units = corpus_io.load_parallel(args.dataset, fmt="jsonl")
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else None
    split = corpus_io.sample_and_split(units, seed=args.seed, sizes=sizes)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"seed": args.seed, "parts": {}}
    for name, part in split.parts.items():
        corpus_io.save_jsonl(part, out / f"{name}.jsonl")
        by_corpus: dict[str, int] = {}
        for unit in part:
            key = unit.corpus.value if unit.corpus else "<none>"
            by_corpus[key] = by_corpus.get(key, 0) + 1
        manifest["parts"][name] = {"size": len(part), "per_corpus": by_corpus}
    rows = [
        [name, str(info["size"]), json.dumps(info["per_corpus"], sort_keys=True)]
        for name, info in manifest["parts"].items()
    ]
    _emit(manifest, render_table(["part", "size", "per_corpus"], rows), args.format)
    return 0


def _regressor_config(args, mode: Optional[str] = None) -> RegressorConfig:
    return RegressorConfig(
        mode=mode or args.mode,
        head=args.head,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        l2_weight=args.l2_weight,
        seed=args.seed,
        standardize_features=not args.no_standardize,
        standardize_targets=args.standardize_targets,
    )


def _annotated_dataset(path: str):
    pairs = corpus_io.load_annotated_jsonl(path)
    scored = [(unit, score_unit(ann)) for unit, ann in pairs if ann is not None]
    if not scored:
        raise ValueError(f"{path} holds no annotated units")
    return scored


def _cmd_train(args) -> int:
    dataset = _annotated_dataset(args.dataset)
    model = train(dataset, _regressor_config(args))
    model.save(args.output)
    trace = model.estimator.loss_trace_
    payload = {
        "model": args.output,
        "n_train": len(dataset),
        "final_loss": trace[-1],
    }
    _emit(payload, f"trained on {len(dataset)} units; final loss {trace[-1]:.6f}\n"
          f"model written to {args.output}", args.format)
    return 0


def _cmd_eval(args) -> int:
    model = TrainedModel.load(args.model)
    dataset = _annotated_dataset(args.dataset)
    payload: dict = {"reports": {}}
    texts = []
    for variant in _variants(args.variant):
        report = evaluate(model, dataset, variant=variant)
        payload["reports"][variant] = report.to_dict()
        rows = [
            [key, format_tau(result.tau, result.stars)]
            for key, result in report.taus.items()
        ]
        texts.append(f"Kendall tau ({variant}), n={report.n}\n"
                     + render_table(["score", "tau"], rows))
    _emit(payload, "\n\n".join(texts), args.format)
    return 0


def _cmd_experiments(args) -> int:
    pairs = corpus_io.load_annotated_jsonl(args.dataset)
    units = [unit for unit, ann in pairs if ann is not None]
    targets = {unit.id: score_unit(ann) for unit, ann in pairs if ann is not None}
    sizes = tuple(int(s) for s in args.split_sizes.split(",")) if args.split_sizes else None
    split = corpus_io.sample_and_split(units, seed=args.split_seed, sizes=sizes)
    curve_sizes = tuple(int(s) for s in args.sizes.split(","))
    seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds else None
    tables = run_experiment_suite(
        split,
        targets,
        base_cfg=_regressor_config(args),
        sizes=curve_sizes,
        seeds=seeds,
    )
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "experiments.txt").write_text(tables.render_text(), encoding="utf-8")
        (out / "experiments.json").write_text(
            json.dumps(tables.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        (out / "size_curve.csv").write_text(tables.curve_csv(), encoding="utf-8")
    _emit(tables.to_dict(), tables.render_text(), args.format)
    return 0


def _cmd_build_dataset(args) -> int:
    corpus = Corpus.from_token(args.corpus) if args.corpus else None
    units = corpus_io.load_parallel(args.input, fmt=args.input_format, corpus=corpus)
    if args.provider == "mock":
        provider = MockProvider()
    else:
        provider = ProviderSpec(base_url=args.base_url, mock=False).build()
    report = build_hypotheses(
        units,
        provider,
        audit_log=args.audit,
        retries=args.retries,
        max_workers=args.workers,
    )
    corpus_io.save_jsonl(report.units, args.output)
    payload = {
        "output": args.output,
        "completed": len(report.completed),
        "failures": [
            {"unit_id": f.unit_id, "error": f.error, "attempts": f.attempts}
            for f in report.failures
        ],
    }
    text = (
        f"{len(report.completed)}/{len(report.units)} hypotheses written to {args.output}"
    )
    for failure in report.failures:
        text += f"\nfailed {failure.unit_id} after {failure.attempts} attempts: {failure.error}"
    _emit(payload, text, args.format)
    return 1 if report.failures and not report.completed else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import AnnotationStore, create_app

    units = corpus_io.load_parallel(args.dataset, fmt="jsonl")
    store = AnnotationStore(
        units,
        log_path=args.log,
        snapshot_path=args.snapshot,
        snapshot_every=args.snapshot_every,
    )
    app = create_app(store, cors_origins=args.cors_origin.split(","))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# -- parser ---------------------------------------------------------------


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json"), default="text")


def _add_regressor_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=MODES, default="qe")
    parser.add_argument("--head", choices=HEADS, default="multi")
    parser.add_argument("--learning-rate", type=float, default=1e-2)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--l2-weight", type=float, default=1e-4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--no-standardize", action="store_true")
    parser.add_argument("--standardize-targets", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqmkit",
        description="Multidimensional MT quality evaluation: annotation, scoring, "
        "meta-evaluation, regression and the annotation service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse an annotation text file")
    p.add_argument("--input", required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("validate", help="validate annotations against the taxonomy")
    p.add_argument("--input", required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("score", help="convert annotations into penalty scores")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--annotations", help="annotation text file")
    group.add_argument("--dataset", help="annotated dataset JSONL")
    p.add_argument("--top-k", type=int, default=5)
    _add_format(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("corr", help="correlation matrix over score columns")
    p.add_argument("--input", required=True, help="TSV with a header row")
    p.add_argument("--columns", help="comma-separated column names (default: all)")
    p.add_argument("--variant", choices=("eq5", "tau_b", "both"), default="both")
    p.add_argument("--inverse", help="columns to negate before correlating")
    p.add_argument(
        "--no-auto-inverse",
        action="store_true",
        help="do not auto-negate columns whose name contains bleu/chrf",
    )
    _add_format(p)
    p.set_defaults(func=_cmd_corr)

    p = sub.add_parser("agree", help="annotator agreement per dimension")
    p.add_argument("--primary", required=True, help="TSV: unit_id + dimension columns")
    p.add_argument("--validators", required=True, nargs="+")
    p.add_argument("--variant", choices=("eq5", "tau_b", "both"), default="both")
    _add_format(p)
    p.set_defaults(func=_cmd_agree)

    p = sub.add_parser("stats", help="corpus summary statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--sampled", help="JSONL subset counted as the sample")
    _add_format(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("metrics", help="sentence BLEU/chrF per unit")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--dataset", help="JSONL with reference and hypothesis")
    group.add_argument("--hypotheses", help="one hypothesis per line")
    p.add_argument("--references", help="one reference per line (with --hypotheses)")
    p.add_argument("--bleu-order", type=int, default=4)
    p.add_argument("--chrf-order", type=int, default=6)
    p.add_argument("--tokenizer", choices=("whitespace", "character"), default="whitespace")
    _add_format(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("split", help="balanced train/validation/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", help="train,validation,test (default 1000,100,100 scaled)")
    p.add_argument("--output-dir", required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("train", help="train a quality regressor")
    p.add_argument("--dataset", required=True, help="annotated dataset JSONL")
    p.add_argument("--output", required=True, help="model file path")
    _add_regressor_args(p)
    _add_format(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model (Kendall tau)")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True, help="annotated dataset JSONL")
    p.add_argument("--variant", choices=("eq5", "tau_b", "both"), default="both")
    _add_format(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiments", help="model grid, size curve, head comparison")
    p.add_argument("--dataset", required=True, help="annotated dataset JSONL")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--split-sizes", help="train,validation,test for the split")
    p.add_argument("--sizes", default=",".join(str(s) for s in EXPERIMENT_SIZES))
    p.add_argument("--seeds", help="comma-separated training seeds (default: 3 from --seed)")
    p.add_argument("--output-dir", help="write experiments.txt/.json and size_curve.csv")
    _add_regressor_args(p)
    _add_format(p)
    p.set_defaults(func=_cmd_experiments)

    p = sub.add_parser("build-dataset", help="fill hypotheses via a provider")
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", choices=("jsonl", "tsv"), default="jsonl")
    p.add_argument("--corpus", help="corpus tag for TSV input (gv/ted)")
    p.add_argument("--provider", choices=("mock", "http"), default="mock")
    p.add_argument("--base-url", help="http provider base URL (or PROVIDER_BASE_URL)")
    p.add_argument("--output", required=True)
    p.add_argument("--audit", help="audit log JSONL path")
    p.add_argument("--retries", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    _add_format(p)
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--dataset", required=True)
    p.add_argument("--log", required=True, help="append-only annotation log")
    p.add_argument("--snapshot", help="snapshot file path")
    p.add_argument("--snapshot-every", type=int, default=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--cors-origin", default="*")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
