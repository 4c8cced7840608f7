"""Experiment orchestration.

run_grid trains one model per configuration on the train split, scores
it on dev, and selects the best row; dev never reaches idf fitting or
the gradient updates.  finalize refits the chosen configuration on
train plus dev and writes the test submission.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from . import classifier, corpus, evaluation, features, normalizer
from .classifier import HyperParams, LinearModel
from .corpus import LabelVocab, Level, Register, Subtask, TweetRecord
from .errors import ConfigError, SubtaskMismatch, UnknownLabel
from .evaluation import EvaluationReport
from .features import FeatureConfig, IdfTable
from .normalizer import NormConfig, SegmentLexicon


class SelectionMetric(Enum):
    WEIGHTED_F1 = "weighted_f1"
    MACRO_F1 = "macro_f1"
    ACCURACY = "accuracy"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    subtask: Subtask
    norm: NormConfig = field(default_factory=NormConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    hp: HyperParams = field(default_factory=HyperParams)

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigError("experiment name must be non-empty")


@dataclass(frozen=True)
class GridRow:
    name: str
    weighted_f1: float
    accuracy: float
    macro_f1: float

    def metric(self, which: SelectionMetric) -> float:
        if which is SelectionMetric.WEIGHTED_F1:
            return self.weighted_f1
        if which is SelectionMetric.MACRO_F1:
            return self.macro_f1
        return self.accuracy


@dataclass(frozen=True)
class GridResult:
    rows: tuple[GridRow, ...]
    selected: str
    selection_metric: SelectionMetric


@dataclass(frozen=True)
class FinalizeResult:
    model: LinearModel
    idf: IdfTable
    predictions: tuple[str, ...]
    submission_path: str
    report: EvaluationReport | None


def _require_labels(records: Sequence[TweetRecord], subtask: Subtask, split: str) -> None:
    for record in records:
        if record.register is not subtask.register:
            raise SubtaskMismatch(
                f"{split} record {record.id!r} is {record.register.value}, "
                f"subtask wants {subtask.register.value}"
            )
        if record.label(subtask.level) is None:
            raise SubtaskMismatch(
                f"{split} record {record.id!r} has no {subtask.level.value} label"
            )


def _prepare_texts(
    records: Sequence[TweetRecord],
    config: ExperimentConfig,
    lexicon: SegmentLexicon | None,
    overrides: Mapping[str, str] | None,
) -> list[str]:
    return [
        classifier.truncate(
            normalizer.normalize(r.text, config.norm, lexicon, overrides),
            config.hp.max_seq_len,
        )
        for r in records
    ]


def _class_indices(
    records: Sequence[TweetRecord], level: Level, labels: Sequence[str]
) -> list[int]:
    index = {label: i for i, label in enumerate(labels)}
    out = []
    for record in records:
        label = record.label(level)
        if label not in index:
            raise UnknownLabel(f"record {record.id!r}: label {label!r} not in vocab")
        out.append(index[label])
    return out


def _majority_label(indices: Sequence[int], labels: Sequence[str]) -> str:
    counts = [0] * len(labels)
    for i in indices:
        counts[i] += 1
    best = max(range(len(labels)), key=lambda i: (counts[i], -i))
    return labels[best]


def fit_pipeline(
    train: Sequence[TweetRecord],
    config: ExperimentConfig,
    vocab: LabelVocab,
    lexicon: SegmentLexicon | None = None,
    overrides: Mapping[str, str] | None = None,
) -> tuple[LinearModel, IdfTable, str]:
    """Fit the idf table and the model on one split.

    Returns (model, idf, majority label of the split).
    """
    labels = vocab.labels(config.subtask.level)
    texts = _prepare_texts(train, config, lexicon, overrides)
    grams = [features.char_ngrams(t, config.features) for t in texts]
    idf = features.fit_idf(grams, config.features)
    vectors = [features.vectorize(t, config.features, idf) for t in texts]
    y = _class_indices(train, config.subtask.level, labels)
    model = classifier.train(
        list(zip(vectors, y)),
        config.hp,
        num_classes=len(labels),
        dim=config.features.dim,
        class_labels=labels,
        feature_fingerprint=features.config_fingerprint(config.features),
    )
    return model, idf, _majority_label(y, labels)


def _predict_records(
    records: Sequence[TweetRecord],
    config: ExperimentConfig,
    model: LinearModel,
    idf: IdfTable,
    majority: str,
    lexicon: SegmentLexicon | None,
    overrides: Mapping[str, str] | None,
) -> list[str]:
    # A text that normalizes to nothing has no features; fall back to the
    # majority class of the data the model was fitted on.
    out = []
    for text in _prepare_texts(records, config, lexicon, overrides):
        vector = features.vectorize(text, config.features, idf)
        if vector.nnz == 0:
            out.append(majority)
        else:
            out.append(classifier.predict(model, vector))
    return out


def run_grid(
    train: Sequence[TweetRecord],
    dev: Sequence[TweetRecord],
    configs: Sequence[ExperimentConfig],
    vocab: LabelVocab,
    selection: SelectionMetric = SelectionMetric.WEIGHTED_F1,
    lexicon: SegmentLexicon | None = None,
    overrides: Mapping[str, str] | None = None,
) -> GridResult:
    """Score every configuration on dev and pick the best row.

    All configurations must target the same subtask and carry unique
    names.  Ties on the selection metric go to the earliest row.  The
    idf table and the model of each row are fitted on train only.
    """
    if not configs:
        raise ConfigError("grid needs at least one experiment")
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate experiment name in grid")
    subtask = configs[0].subtask
    if any(c.subtask != subtask for c in configs):
        raise ConfigError("all experiments in a grid must share one subtask")
    if subtask.level is Level.PROVINCE and not vocab.provinces:
        raise SubtaskMismatch("province subtask needs a vocab with provinces")
    _require_labels(train, subtask, "train")
    _require_labels(dev, subtask, "dev")

    labels = vocab.labels(subtask.level)
    gold = [r.label(subtask.level) for r in dev]
    rows: list[GridRow] = []
    for config in configs:
        model, idf, majority = fit_pipeline(train, config, vocab, lexicon, overrides)
        pred = _predict_records(dev, config, model, idf, majority, lexicon, overrides)
        rep = evaluation.report(gold, pred, labels)
        rows.append(
            GridRow(
                name=config.name,
                weighted_f1=rep.weighted_f1,
                accuracy=rep.accuracy,
                macro_f1=rep.macro_f1,
            )
        )
    best = max(range(len(rows)), key=lambda i: (rows[i].metric(selection), -i))
    return GridResult(rows=tuple(rows), selected=rows[best].name, selection_metric=selection)


def finalize(
    train: Sequence[TweetRecord],
    dev: Sequence[TweetRecord],
    test: Sequence[TweetRecord],
    config: ExperimentConfig,
    vocab: LabelVocab,
    submission_path: str,
    lexicon: SegmentLexicon | None = None,
    overrides: Mapping[str, str] | None = None,
) -> FinalizeResult:
    """Refit on train plus dev, predict test in order, write submission.

    When every test record is labeled for the subtask the returned
    result also carries an evaluation report.
    """
    subtask = config.subtask
    _require_labels(train, subtask, "train")
    _require_labels(dev, subtask, "dev")
    combined = corpus.concat_splits(train, dev)
    labels = vocab.labels(subtask.level)
    if subtask.level is Level.PROVINCE and not vocab.provinces:
        raise SubtaskMismatch("province subtask needs a vocab with provinces")
    model, idf, majority = fit_pipeline(combined, config, vocab, lexicon, overrides)
    predictions = _predict_records(test, config, model, idf, majority, lexicon, overrides)
    corpus.write_submission([r.id for r in test], predictions, submission_path)
    rep = None
    if test and all(r.label(subtask.level) is not None for r in test):
        gold = [r.label(subtask.level) for r in test]
        rep = evaluation.report(gold, predictions, labels)
    return FinalizeResult(
        model=model,
        idf=idf,
        predictions=tuple(predictions),
        submission_path=submission_path,
        report=rep,
    )


def render_grid(result: GridResult) -> str:
    """Aligned text table of a grid, selected row marked with *."""
    headers = ["name", "weighted_f1", "accuracy", "macro_f1", ""]
    body = [
        [row.name, f"{row.weighted_f1:.6f}", f"{row.accuracy:.6f}", f"{row.macro_f1:.6f}",
         "*" if row.name == result.selected else ""]
        for row in result.rows
    ]
    widths = [max(len(r[i]) for r in [headers] + body) for i in range(len(headers))]
    lines = []
    for cells in [headers] + body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    lines.append(f"selected: {result.selected} (by {result.selection_metric.value})")
    return "\n".join(lines) + "\n"


def write_grid_tsv(result: GridResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("name\tweighted_f1\taccuracy\tmacro_f1\tselected\n")
        for row in result.rows:
            mark = "1" if row.name == result.selected else "0"
            fh.write(
                f"{row.name}\t{row.weighted_f1:.6f}\t{row.accuracy:.6f}"
                f"\t{row.macro_f1:.6f}\t{mark}\n"
            )


@dataclass(frozen=True)
class BenchmarkSpec:
    """Everything a benchmark run needs, parsed from one config file."""

    train_path: str
    dev_path: str
    test_path: str
    subtask: Subtask
    experiments: tuple[ExperimentConfig, ...]
    vocab_path: str | None = None
    selection: SelectionMetric = SelectionMetric.WEIGHTED_F1


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False}

_NORM_KEYS = {"strip_markup", "replace_entities", "remove_noise", "insert_spacing",
              "segment", "max_repeat"}
_FEATURE_KEYS = {"n_min", "n_max", "dim", "hash_seed", "pad_token"}
_HP_KEYS = {"learning_rate", "adam_epsilon", "max_seq_len", "batch_size", "epochs",
            "l2", "seed"}


def _parse_bool(key: str, value: str) -> bool:
    if value.lower() not in _BOOL_VALUES:
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    return _BOOL_VALUES[value.lower()]


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def _experiment_from_items(name: str, items: dict[str, str], subtask: Subtask) -> ExperimentConfig:
    norm_kwargs: dict = {}
    feat_kwargs: dict = {}
    hp_kwargs: dict = {}
    for key, value in items.items():
        if key in _NORM_KEYS:
            if key == "max_repeat":
                norm_kwargs[key] = _parse_int(key, value)
            else:
                norm_kwargs[key] = _parse_bool(key, value)
        elif key in _FEATURE_KEYS:
            if key == "pad_token":
                feat_kwargs["pad_token"] = value
            elif key == "hash_seed":
                feat_kwargs["seed"] = _parse_int(key, value)
            else:
                feat_kwargs[key] = _parse_int(key, value)
        elif key in _HP_KEYS:
            if key == "learning_rate":
                hp_kwargs["lr"] = _parse_float(key, value)
            elif key == "seed":
                hp_kwargs["rng_seed"] = _parse_int(key, value)
            elif key in ("max_seq_len", "batch_size", "epochs"):
                hp_kwargs[key] = _parse_int(key, value)
            else:
                hp_kwargs[key] = _parse_float(key, value)
        else:
            raise ConfigError(f"unknown experiment key {key!r}")
    try:
        return ExperimentConfig(
            name=name,
            subtask=subtask,
            norm=NormConfig(**norm_kwargs),
            features=FeatureConfig(**feat_kwargs),
            hp=HyperParams(**hp_kwargs),
        )
    except ValueError as exc:
        raise ConfigError(f"experiment {name!r}: {exc}") from None


def parse_benchmark_file(path: str) -> BenchmarkSpec:
    """Parse the benchmark config format.

    The first significant line must be `format=1`.  A `[data]` section
    names the split files, the label level, and the register; each
    `[experiment NAME]` section overrides pipeline defaults.  Lines
    starting with # are comments.
    """
    sections: list[tuple[str, dict[str, str]]] = []
    current: dict[str, str] | None = None
    saw_version = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not saw_version:
                if line != "format=1":
                    raise ConfigError(f"{path}:{lineno}: first line must be format=1")
                saw_version = True
                continue
            if line.startswith("[") and line.endswith("]"):
                header = line[1:-1].strip()
                current = {}
                sections.append((header, current))
                continue
            if current is None:
                raise ConfigError(f"{path}:{lineno}: key outside any section")
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key = key.strip()
            value = value.strip()
            if key in current:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            current[key] = value
    if not saw_version:
        raise ConfigError(f"{path}: empty config, missing format=1")

    data: dict[str, str] | None = None
    experiments: list[tuple[str, dict[str, str]]] = []
    for header, items in sections:
        if header == "data":
            if data is not None:
                raise ConfigError(f"{path}: more than one [data] section")
            data = items
        elif header.startswith("experiment"):
            name = header[len("experiment"):].strip()
            if not name:
                raise ConfigError(f"{path}: experiment section without a name")
            experiments.append((name, items))
        else:
            raise ConfigError(f"{path}: unknown section [{header}]")
    if data is None:
        raise ConfigError(f"{path}: missing [data] section")
    if not experiments:
        raise ConfigError(f"{path}: no [experiment NAME] sections")

    for required in ("train", "dev", "test", "level", "register"):
        if required not in data:
            raise ConfigError(f"{path}: [data] is missing {required!r}")
    extra = set(data) - {"train", "dev", "test", "vocab", "level", "register", "selection"}
    if extra:
        raise ConfigError(f"{path}: unknown [data] keys {sorted(extra)}")
    try:
        level = Level(data["level"])
        register = Register(data["register"])
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    selection = SelectionMetric.WEIGHTED_F1
    if "selection" in data:
        try:
            selection = SelectionMetric(data["selection"])
        except ValueError:
            raise ConfigError(f"{path}: unknown selection metric {data['selection']!r}") from None
    subtask = Subtask(level=level, register=register)
    configs = tuple(_experiment_from_items(name, items, subtask) for name, items in experiments)
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: duplicate experiment name")
    return BenchmarkSpec(
        train_path=data["train"],
        dev_path=data["dev"],
        test_path=data["test"],
        vocab_path=data.get("vocab"),
        subtask=subtask,
        experiments=configs,
        selection=selection,
    )


def override_seed(spec: BenchmarkSpec, seed: int) -> BenchmarkSpec:
    """Rebuild a spec with every experiment's RNG seed replaced."""
    experiments = tuple(
        replace(c, hp=replace(c.hp, rng_seed=seed)) for c in spec.experiments
    )
    return replace(spec, experiments=experiments)
