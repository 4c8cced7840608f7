"""Command line front end.

Exit codes: 0 on success, 1 on data errors (bad files, bad labels, bad
config contents), 2 on usage errors (argparse handles those).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import classifier, corpus, evaluation, features, harness, normalizer
from .corpus import ColumnSchema, LabelVocab, Level, Register, Subtask
from .errors import DialectIdError, LengthMismatch
from .harness import ExperimentConfig, SelectionMetric


def _norm_config_from_flags(args: argparse.Namespace) -> normalizer.NormConfig:
    return normalizer.NormConfig(
        segment=args.segment,
        insert_spacing=not args.no_spacing,
        max_repeat=args.max_repeat,
    )


def _load_lexicon_flags(args: argparse.Namespace):
    lexicon = normalizer.load_lexicon(args.lexicon) if args.lexicon else None
    overrides = normalizer.load_presegmented(args.presegmented) if args.presegmented else None
    return lexicon, overrides


def _cmd_normalize(args: argparse.Namespace) -> int:
    config = _norm_config_from_flags(args)
    lexicon, overrides = _load_lexicon_flags(args)
    schema = ColumnSchema()
    with open(args.infile, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out_lines = []
    text_col: int | None = None
    for i, line in enumerate(lines):
        if line.endswith("\r"):
            line = line[:-1]
        cells = line.split("\t")
        if i == 0:
            if len(cells) >= 2 and cells[0] == schema.id and cells[1] == schema.text:
                text_col = 1
                out_lines.append("\t".join(cells))
                continue
            text_col = 1 if len(cells) >= 2 else 0
        cells[text_col] = normalizer.normalize(cells[text_col], config, lexicon, overrides)
        out_lines.append("\t".join(cells))
    with open(args.outfile, "w", encoding="utf-8", newline="") as fh:
        for line in out_lines:
            fh.write(line + "\n")
    return 0


def _default_vocab(vocab_path: str | None, level: Level) -> LabelVocab:
    if vocab_path:
        return LabelVocab.from_file(vocab_path)
    if level is Level.PROVINCE:
        raise DialectIdError("province-level runs need --vocab")
    return LabelVocab.countries_only()


def _cmd_stats(args: argparse.Namespace) -> int:
    level = Level(args.level)
    vocab = LabelVocab.from_file(args.vocab) if args.vocab else None
    records = corpus.load_corpus(args.infile, register=Register.DA, vocab=vocab)
    stats = corpus.corpus_stats(records, level, vocab)
    for label, count in stats.counts.items():
        print(f"{label}\t{count}")
    print(f"total\t{stats.total}")
    return 0


def _experiment_from_args(args: argparse.Namespace, subtask: Subtask) -> ExperimentConfig:
    if args.config:
        spec = harness.parse_benchmark_file(args.config)
        if args.seed is not None:
            spec = harness.override_seed(spec, args.seed)
        if args.experiment:
            for exp in spec.experiments:
                if exp.name == args.experiment:
                    return ExperimentConfig(
                        name=exp.name, subtask=subtask, norm=exp.norm,
                        features=exp.features, hp=exp.hp,
                    )
            raise DialectIdError(f"no experiment named {args.experiment!r} in {args.config}")
        exp = spec.experiments[0]
        return ExperimentConfig(
            name=exp.name, subtask=subtask, norm=exp.norm,
            features=exp.features, hp=exp.hp,
        )
    config = ExperimentConfig(name="default", subtask=subtask)
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, hp=replace(config.hp, rng_seed=args.seed))
    return config


def _cmd_train(args: argparse.Namespace) -> int:
    level = Level(args.level)
    register = Register(args.register)
    vocab = _default_vocab(args.vocab, level)
    subtask = Subtask(level=level, register=register)
    config = _experiment_from_args(args, subtask)
    records = corpus.load_corpus(args.infile, register=register, vocab=vocab)
    lexicon, overrides = _load_lexicon_flags(args)
    model, idf, _ = harness.fit_pipeline(records, config, vocab, lexicon, overrides)
    classifier.save_model(model, args.out_model)
    features.save_idf(idf, args.out_idf)
    print(f"trained {model.num_classes} classes on {len(records)} records")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    level = Level(args.level)
    vocab = _default_vocab(args.vocab, level)
    gold_records = corpus.load_corpus(args.gold, register=Register.DA, vocab=vocab)
    pairs = corpus.read_submission(args.pred)
    by_id = dict(pairs)
    if len(by_id) != len(pairs):
        raise DialectIdError(f"{args.pred}: duplicate prediction id")
    gold = []
    pred = []
    for record in gold_records:
        label = record.label(level)
        if label is None:
            raise DialectIdError(f"gold record {record.id!r} has no {level.value} label")
        if record.id not in by_id:
            raise LengthMismatch(f"no prediction for id {record.id!r}")
        gold.append(label)
        pred.append(by_id[record.id])
    if len(pairs) != len(gold_records):
        raise LengthMismatch(
            f"{len(pairs)} predictions for {len(gold_records)} gold records"
        )
    rep = evaluation.report(gold, pred, vocab.labels(level))
    sys.stdout.write(evaluation.render_report(rep))
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model = classifier.load_model(args.model)
    idf = features.load_idf(args.idf)
    subtask = Subtask(level=Level.COUNTRY, register=Register.DA)
    config = _experiment_from_args(args, subtask)
    feat = config.features
    if feat.dim != idf.dim:
        from dataclasses import replace
        if args.config:
            raise DialectIdError(
                f"config dim {feat.dim} does not match idf table dim {idf.dim}"
            )
        feat = replace(feat, dim=idf.dim)
    if model.dim != idf.dim:
        raise DialectIdError(f"model dim {model.dim} does not match idf dim {idf.dim}")
    lexicon, overrides = _load_lexicon_flags(args)
    records = corpus.load_corpus(args.infile, register=Register(args.register))
    predictions = []
    for record in records:
        text = classifier.truncate(
            normalizer.normalize(record.text, config.norm, lexicon, overrides),
            config.hp.max_seq_len,
        )
        vector = features.vectorize(text, feat, idf)
        predictions.append(classifier.predict(model, vector))
    corpus.write_submission([r.id for r in records], predictions, args.outfile)
    print(f"wrote {len(predictions)} predictions to {args.outfile}")
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    spec = harness.parse_benchmark_file(args.config_file or args.config or "")
    if args.seed is not None:
        spec = harness.override_seed(spec, args.seed)
    vocab = _default_vocab(spec.vocab_path, spec.subtask.level)
    register = spec.subtask.register
    train = corpus.load_corpus(spec.train_path, register=register, vocab=vocab)
    dev = corpus.load_corpus(spec.dev_path, register=register, vocab=vocab)
    test = corpus.load_corpus(spec.test_path, register=register, vocab=vocab)
    lexicon = normalizer.load_lexicon(args.lexicon) if args.lexicon else None
    overrides = normalizer.load_presegmented(args.presegmented) if args.presegmented else None

    grid = harness.run_grid(
        train, dev, list(spec.experiments), vocab, spec.selection, lexicon, overrides
    )
    sys.stdout.write(harness.render_grid(grid))

    os.makedirs(args.out_dir, exist_ok=True)
    harness.write_grid_tsv(grid, os.path.join(args.out_dir, "grid.tsv"))
    selected = next(c for c in spec.experiments if c.name == grid.selected)
    submission_path = os.path.join(args.out_dir, "submission.csv")
    result = harness.finalize(
        train, dev, test, selected, vocab, submission_path, lexicon, overrides
    )
    classifier.save_model(result.model, os.path.join(args.out_dir, "model.bin"))
    features.save_idf(result.idf, os.path.join(args.out_dir, "idf.bin"))
    if result.report is not None:
        evaluation.write_report(result.report, os.path.join(args.out_dir, "report.txt"))
        print(
            f"test macro_f1={result.report.macro_f1:.6f} "
            f"accuracy={result.report.accuracy:.6f}"
        )
    print(f"submission: {submission_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialectid",
        description="Arabic dialect identification pipeline",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the training RNG seed everywhere")
    parser.add_argument("--config", default=None,
                        help="benchmark config file supplying experiment settings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="clean the text column of a TSV file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--segment", action="store_true", help="enable clitic segmentation")
    p.add_argument("--no-spacing", action="store_true", help="disable boundary spacing")
    p.add_argument("--max-repeat", type=int, default=2)
    p.add_argument("--lexicon", default=None, help="clitic lexicon file")
    p.add_argument("--presegmented", default=None, help="token TSV overriding the lexicon")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("stats", help="per-label record counts of a split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--level", choices=[l.value for l in Level], required=True)
    p.add_argument("--vocab", default=None)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="fit a model and write model and idf files")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--level", choices=[l.value for l in Level], required=True)
    p.add_argument("--register", choices=[r.value for r in Register], required=True)
    p.add_argument("--vocab", default=None)
    p.add_argument("--experiment", default=None,
                   help="experiment name inside --config (default: first)")
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-idf", required=True)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--presegmented", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a submission against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--level", choices=[l.value for l in Level], required=True)
    p.add_argument("--vocab", default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="label a test split with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--idf", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--register", choices=[r.value for r in Register], default="da")
    p.add_argument("--experiment", default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--presegmented", default=None)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("benchmark", help="run the grid and finalize the best row")
    p.add_argument("config_file", nargs="?", default=None,
                   help="benchmark config (or use the global --config)")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--lexicon", default=None)
    p.add_argument("--presegmented", default=None)
    p.set_defaults(func=_cmd_benchmark)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if getattr(args, "command", None) == "benchmark" and not (
        args.config_file or args.config
    ):
        print("error: benchmark needs a config file", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except DialectIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        print(f"error: missing input file: {name}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
