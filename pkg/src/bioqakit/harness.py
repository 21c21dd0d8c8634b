"""Sequential fine-tuning over a deterministic toy encoder.

The encoder stands in for a pretrained transformer: hashed character
trigrams feed an embedding table, a mean-pooled global vector is mixed into
every position, and one tanh layer produces the hidden states. Encoder
parameters carry over from stage to stage; heads are swapped per stage.
"""

import hashlib
import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from functools import lru_cache
from pathlib import Path
from typing import Any

import numpy as np

from .config import PipelineConfig
from .errors import BioqaError, SchemaError, StageError
from .formats import parse_binary, parse_pairs, parse_squad, write_predictions
from .formats.predictions import PredictionFile
from .heads import (
    Array,
    HiddenStates,
    SpanHead,
    YesNoHead,
    decode_spans,
    span_distributions,
    span_loss_and_grads,
    yes_probability,
    yesno_loss_and_grads,
)
from .metrics import MetricsReport, evaluate_corpus
from .models import BioasqQuestion, QuestionType
from .normalize import dedup_answers, normalize_answer
from .utils import dump_json, load_json, read_bytes, write_bytes

LOG = logging.getLogger(__name__)

_TOKEN = re.compile(r"\S+")
CLS, SEP = "[CLS]", "[SEP]"


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Whitespace tokens with their character offsets."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN.finditer(text)]


@lru_cache(maxsize=65536)
def _feature_ids(token: str, segment: str, seed: int, buckets: int) -> tuple[int, ...]:
    if token in (CLS, SEP):
        grams = [token]
    else:
        padded = f"<{token.lower()}>"
        grams = [padded[i : i + 3] for i in range(max(1, len(padded) - 2))]
    ids = []
    for gram in grams:
        digest = hashlib.sha256(f"{seed}:{segment}:{gram}".encode()).digest()
        ids.append(int.from_bytes(digest[:8], "little") % buckets)
    return tuple(ids)


@dataclass
class _Trace:
    """Forward-pass intermediates needed for backpropagation."""

    features: list[tuple[int, ...]]
    mixed: Array  # x_t + g
    hidden: Array


@dataclass
class ToyEncoder:
    """Hashed-trigram embeddings, global-mean mixing and one tanh layer."""

    embeddings: Array  # V x H
    weight: Array  # H x H
    bias: Array  # H
    seed: int = 13

    @classmethod
    def create(cls, buckets: int = 2048, hidden_size: int = 16, seed: int = 13) -> "ToyEncoder":
        if buckets < 1 or hidden_size < 1:
            raise ValueError("buckets and hidden_size must be >= 1")
        rng = np.random.default_rng(seed)
        return cls(
            embeddings=rng.normal(0.0, 0.1, (buckets, hidden_size)),
            weight=rng.normal(0.0, 1.0 / np.sqrt(hidden_size), (hidden_size, hidden_size)),
            bias=np.zeros(hidden_size),
            seed=seed,
        )

    @property
    def buckets(self) -> int:
        return self.embeddings.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.embeddings.shape[1]

    def checksum(self) -> str:
        h = hashlib.sha256()
        for array in (self.embeddings, self.weight, self.bias):
            h.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
        return h.hexdigest()

    def layout(self, question: str, context: str):
        """Token features and per-position context offsets for [CLS] Q [SEP] C [SEP]."""
        q_tokens = tokenize(question)
        c_tokens = tokenize(context)
        if not q_tokens or not c_tokens:
            raise ValueError("question and context must both contain tokens")

        def ids(token: str, segment: str) -> tuple[int, ...]:
            return _feature_ids(token, segment, self.seed, self.buckets)

        features = [ids(CLS, "s")]
        offsets: list[tuple[int, int] | None] = [None]
        for token, _, _ in q_tokens:
            features.append(ids(token, "q"))
            offsets.append(None)
        features.append(ids(SEP, "s"))
        offsets.append(None)
        for token, start, end in c_tokens:
            features.append(ids(token, "c"))
            offsets.append((start, end))
        features.append(ids(SEP, "s"))
        offsets.append(None)
        return features, tuple(offsets)

    def forward(self, features: list[tuple[int, ...]]) -> _Trace:
        x = np.stack([self.embeddings[list(f)].mean(axis=0) for f in features])
        mixed = x + x.mean(axis=0)
        hidden = np.tanh(mixed @ self.weight.T + self.bias)
        return _Trace(features, mixed, hidden)

    def backward(self, trace: _Trace, d_hidden: Array) -> tuple[Array, Array, Array]:
        """Gradients for (embeddings, weight, bias) given dLoss/dHidden."""
        d_pre = d_hidden * (1.0 - trace.hidden**2)
        d_weight = d_pre.T @ trace.mixed
        d_bias = d_pre.sum(axis=0)
        d_mixed = d_pre @ self.weight
        d_x = d_mixed + d_mixed.mean(axis=0)

        d_embeddings = np.zeros_like(self.embeddings)
        for t, ids in enumerate(trace.features):
            np.add.at(d_embeddings, list(ids), d_x[t] / len(ids))
        return d_embeddings, d_weight, d_bias


def encode(encoder: ToyEncoder, question: str, context: str) -> HiddenStates:
    """HiddenStates for [CLS] Q [SEP] C [SEP]; s = |Q| + |C| + 3 whitespace tokens.

    Raises:
        ValueError: If the question or the context is empty
    """
    features, offsets = encoder.layout(question, context)
    return HiddenStates(encoder.forward(features).hidden, offsets)


class TaskKind(StrEnum):
    PAIR = "pair"
    YESNO = "yesno"
    SPAN = "span"


HEAD_POLICIES = ("fresh", "reuse")


@dataclass(frozen=True)
class TrainingStage:
    name: str
    task_kind: TaskKind
    data: Path
    epochs: int = 1
    learning_rate: float = 1e-2  # 1e-6..9e-6 for BioBERT-sized encoders
    batch_size: int = 12
    seed: int = 13
    head_policy: str = "fresh"

    def __post_init__(self):
        if self.epochs < 1:
            raise SchemaError(f"Stage '{self.name}': epochs must be >= 1", field="epochs")
        # zero is allowed so a stage can be checked as a parameter no-op
        if self.learning_rate < 0:
            raise SchemaError(f"Stage '{self.name}': learning_rate must be >= 0", field="learning_rate")
        if self.batch_size < 1:
            raise SchemaError(f"Stage '{self.name}': batch_size must be >= 1", field="batch_size")
        if self.head_policy not in HEAD_POLICIES:
            raise SchemaError(f"Stage '{self.name}': unknown head policy", field="head_policy")


@dataclass(frozen=True)
class TransferPlan:
    stages: tuple[TrainingStage, ...]
    name: str = "plan"
    buckets: int = 2048
    hidden_size: int = 16
    encoder_seed: int = 13
    golden: Path | None = None  # BioASQ golden file scored after the last stage

    def __post_init__(self):
        if not self.stages:
            raise SchemaError("A transfer plan needs at least one stage", field="stages")

    @property
    def order(self) -> list[str]:
        return [stage.name for stage in self.stages]


def parse_plan(data: bytes, base: Path, default_seed: int = 13) -> TransferPlan:
    """Parse plan JSON; data paths are resolved relative to ``base``.

    Stages and the encoder without a ``seed`` use ``default_seed``.

    Raises:
        SchemaError: Missing stage fields, unknown task kinds or bad values
    """
    root = load_json(data)
    if not isinstance(root, dict) or not isinstance(root.get("stages"), list):
        raise SchemaError("Expected a top-level 'stages' array", field="stages")

    stages = []
    for index, raw in enumerate(root["stages"]):
        if not isinstance(raw, dict):
            raise SchemaError("Stage must be an object", index=index)
        for name in ("name", "task", "data"):
            if not isinstance(raw.get(name), str):
                raise SchemaError("Missing required field", field=name, index=index)
        try:
            kind = TaskKind(raw["task"])
        except ValueError:
            raise SchemaError(f"Unknown task '{raw['task']}'", field="task", index=index) from None
        stages.append(
            TrainingStage(
                name=raw["name"],
                task_kind=kind,
                data=base / raw["data"],
                epochs=int(raw.get("epochs", 1)),
                learning_rate=float(raw.get("learning_rate", 1e-2)),
                batch_size=int(raw.get("batch_size", 12)),
                seed=int(raw.get("seed", default_seed)),
                head_policy=str(raw.get("head_policy", "fresh")),
            )
        )

    encoder = root.get("encoder", {})
    golden = root.get("golden")
    return TransferPlan(
        stages=tuple(stages),
        name=str(root.get("name", "plan")),
        buckets=int(encoder.get("buckets", 2048)),
        hidden_size=int(encoder.get("hidden_size", 16)),
        encoder_seed=int(encoder.get("seed", default_seed)),
        golden=base / golden if isinstance(golden, str) else None,
    )


@dataclass(frozen=True)
class Example:
    """One encoded-pair training unit with its target."""

    first: str
    second: str
    label: bool = False
    span: tuple[int, int] | None = None  # token positions for span tasks


def _token_span(
    offsets: Sequence[tuple[int, int] | None], start_char: int, end_char: int
) -> tuple[int, int] | None:
    positions = [
        i for i, o in enumerate(offsets) if o is not None and o[1] > start_char and o[0] < end_char
    ]
    return (positions[0], positions[-1]) if positions else None


def load_examples(stage: TrainingStage, encoder: ToyEncoder) -> list[Example]:
    """Read a stage's data file as examples for its task kind.

    Raises:
        BioqaError: When the file cannot be read or does not fit the task
    """
    data = read_bytes(stage.data)
    match stage.task_kind:
        case TaskKind.PAIR:
            return [Example(p.premise, p.hypothesis, p.label) for p in parse_pairs(data)]
        case TaskKind.YESNO:
            return [Example(b.question, b.context, b.label) for b in parse_binary(data)]
        case TaskKind.SPAN:
            examples = []
            skipped = 0
            for inst in parse_squad(data).instances():
                if not inst.answers or inst.flagged:
                    skipped += 1
                    continue
                _, offsets = encoder.layout(inst.question, inst.context)
                first = inst.answers[0]
                span = _token_span(offsets, first.start_char, first.end_char)
                if span is None:
                    skipped += 1
                    continue
                examples.append(Example(inst.question, inst.context, span=span))
            if skipped:
                LOG.warning("Stage '%s': skipped %d span instance(s)", stage.name, skipped)
            return examples
    raise SchemaError(f"Unsupported task kind '{stage.task_kind}'")


Head = YesNoHead | SpanHead


@dataclass
class Model:
    encoder: ToyEncoder
    head: Head | None = None


def new_head(kind: TaskKind, hidden_size: int, config: PipelineConfig, seed: int) -> Head:
    rng = np.random.default_rng(seed)
    if kind == TaskKind.SPAN:
        if config.head_init == "normal":
            return SpanHead.normal(hidden_size, rng, use_bias=config.head_bias)
        return SpanHead.zeros(hidden_size, use_bias=config.head_bias)
    if config.head_init == "normal":
        return YesNoHead.normal(hidden_size, rng, use_bias=config.head_bias)
    return YesNoHead.zeros(hidden_size, use_bias=config.head_bias)


def _head_fits(head: Head | None, kind: TaskKind) -> bool:
    if kind == TaskKind.SPAN:
        return isinstance(head, SpanHead)
    return isinstance(head, YesNoHead)


def _example_loss(
    model: Model, kind: TaskKind, example: Example, backprop: bool
) -> tuple[float, tuple[Array, Array, Array] | None, tuple[Array, Any] | None]:
    features, _ = model.encoder.layout(example.first, example.second)
    trace = model.encoder.forward(features)
    head = model.head

    if kind == TaskKind.SPAN:
        assert isinstance(head, SpanHead) and example.span is not None
        loss, d_w, d_b, d_hidden = span_loss_and_grads(trace.hidden, head, *example.span)
    else:
        assert isinstance(head, YesNoHead)
        loss, d_w, d_b, d_cls = yesno_loss_and_grads(trace.hidden[0], head, example.label)
        d_hidden = np.zeros_like(trace.hidden)
        d_hidden[0] = d_cls

    if not backprop:
        return loss, None, None
    return loss, model.encoder.backward(trace, d_hidden), (d_w, d_b)


def dataset_loss(model: Model, kind: TaskKind, examples: Sequence[Example]) -> float:
    return float(np.mean([_example_loss(model, kind, ex, backprop=False)[0] for ex in examples]))


@dataclass
class StageResult:
    name: str
    task_kind: TaskKind
    initial_loss: float
    losses: list[float]  # full-data loss after each epoch
    start_checksum: str
    end_checksum: str
    examples: int

    def loss_csv(self) -> str:
        rows = ["epoch,loss", f"0,{self.initial_loss!r}"]
        rows += [f"{epoch},{loss!r}" for epoch, loss in enumerate(self.losses, start=1)]
        return "\n".join(rows) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "task": str(self.task_kind),
            "examples": self.examples,
            "initial_loss": self.initial_loss,
            "final_loss": self.losses[-1] if self.losses else self.initial_loss,
            "start_checksum": self.start_checksum,
            "end_checksum": self.end_checksum,
        }


def train_stage(
    model: Model,
    stage: TrainingStage,
    examples: Sequence[Example],
    config: PipelineConfig | None = None,
) -> StageResult:
    """Mini-batch gradient descent on one stage; the model is updated in place.

    The head is replaced at stage start unless the stage reuses a head of the
    matching shape. Batches follow a seeded permutation per epoch.

    Raises:
        StageError: Empty data or examples that do not fit the task
    """
    config = config or PipelineConfig()
    kind = stage.task_kind
    if not examples:
        raise StageError(stage.name, "no training examples")
    if (kind == TaskKind.SPAN) != all(ex.span is not None for ex in examples):
        raise StageError(stage.name, f"data does not match task '{kind}'")

    if stage.head_policy == "reuse" and _head_fits(model.head, kind):
        LOG.info("Stage '%s' reuses the previous head", stage.name)
    else:
        if stage.head_policy == "reuse":
            LOG.info("Stage '%s' cannot reuse the previous head; starting fresh", stage.name)
        model.head = new_head(kind, model.encoder.hidden_size, config, stage.seed)

    encoder, head = model.encoder, model.head
    assert head is not None
    start = encoder.checksum()
    initial = dataset_loss(model, kind, examples)
    rng = np.random.default_rng(stage.seed)
    losses = []

    for epoch in range(stage.epochs):
        order = rng.permutation(len(examples))
        for first in range(0, len(order), stage.batch_size):
            batch = [examples[i] for i in order[first : first + stage.batch_size]]
            grads_e = np.zeros_like(encoder.embeddings)
            grads_w = np.zeros_like(encoder.weight)
            grads_b = np.zeros_like(encoder.bias)
            head_w = np.zeros_like(head.weight)
            head_b = np.zeros_like(np.asarray(head.bias, dtype=np.float64))
            for example in batch:
                _, enc_grads, head_grads = _example_loss(model, kind, example, backprop=True)
                assert enc_grads is not None and head_grads is not None
                grads_e += enc_grads[0]
                grads_w += enc_grads[1]
                grads_b += enc_grads[2]
                head_w += head_grads[0]
                head_b += head_grads[1]

            step = stage.learning_rate / len(batch)
            encoder.embeddings -= step * grads_e
            encoder.weight -= step * grads_w
            encoder.bias -= step * grads_b
            head.weight = head.weight - step * head_w
            if head.use_bias:
                head.bias = head.bias - step * head_b

        losses.append(dataset_loss(model, kind, examples))
        LOG.debug("Stage '%s' epoch %d loss %.6f", stage.name, epoch + 1, losses[-1])

    return StageResult(
        name=stage.name,
        task_kind=kind,
        initial_loss=initial,
        losses=losses,
        start_checksum=start,
        end_checksum=encoder.checksum(),
        examples=len(examples),
    )


def predict(
    model: Model, questions: Sequence[BioasqQuestion], config: PipelineConfig | None = None
) -> PredictionFile:
    """Answer golden questions with the current head.

    A yes/no head answers yes/no questions from the mean snippet probability.
    A span head answers factoid and list questions: spans decoded per snippet
    are merged by best score and deduplicated; factoid keeps the top-k, list
    keeps candidates within ``list_threshold`` of the best score.
    """
    config = config or PipelineConfig()
    preds = PredictionFile()
    for question in questions:
        snippets = [s.text for s in question.snippets if s.text.strip()]
        if not snippets or not question.body.strip():
            continue
        if isinstance(model.head, YesNoHead) and question.qtype == QuestionType.YESNO:
            probs = [
                yes_probability(encode(model.encoder, question.body, s).cls, model.head)
                for s in snippets
            ]
            preds.yesno[question.id] = float(np.mean(probs)) >= 0.5
        elif isinstance(model.head, SpanHead) and question.qtype != QuestionType.YESNO:
            ranked = _ranked_spans(model, question.body, snippets, config)
            if not ranked:
                continue
            if question.qtype == QuestionType.FACTOID:
                preds.factoid[question.id] = tuple((text,) for text, _ in ranked[: config.top_k])
            else:
                cutoff = config.list_threshold * ranked[0][1]
                preds.lists[question.id] = tuple((t,) for t, score in ranked if score >= cutoff)
    return preds


def _ranked_spans(
    model: Model, question: str, snippets: Sequence[str], config: PipelineConfig
) -> list[tuple[str, float]]:
    assert isinstance(model.head, SpanHead)
    best: dict[str, tuple[str, float]] = {}
    for snippet in snippets:
        states = encode(model.encoder, question, snippet)
        p_start, p_end = span_distributions(states, model.head)
        # answers come from the context segment only
        in_context = np.array([o is not None for o in states.offsets])
        p_start, p_end = np.where(in_context, p_start, 0.0), np.where(in_context, p_end, 0.0)
        candidates = decode_spans(
            p_start, p_end, k=config.top_k * 4, max_len=config.max_answer_length
        )
        for cand in candidates:
            first, last = states.offsets[cand.start_index], states.offsets[cand.end_index]
            if first is None or last is None:
                continue
            text = snippet[first[0] : last[1]]
            key = normalize_answer(text)
            if key not in best or cand.score > best[key][1]:
                best[key] = (text, cand.score)

    ranked = sorted(best.values(), key=lambda item: (-item[1], item[0]))
    survivors = set(dedup_answers([text for text, _ in ranked]))
    return [(text, score) for text, score in ranked if text in survivors]


@dataclass
class PlanResult:
    plan: TransferPlan
    stages: list[StageResult] = field(default_factory=list)
    final_checksum: str = ""
    metrics: MetricsReport | None = None
    predictions: PredictionFile | None = None

    def checksum_chain(self) -> list[dict[str, str]]:
        return [
            {"stage": s.name, "start": s.start_checksum, "end": s.end_checksum}
            for s in self.stages
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "plan": self.plan.name,
            "order": self.plan.order,
            "stages": [s.to_dict() for s in self.stages],
            "final_checksum": self.final_checksum,
            "metrics": self.metrics.to_dict() if self.metrics else None,
        }


def run_plan(
    plan: TransferPlan,
    golden: Sequence[BioasqQuestion] | None = None,
    config: PipelineConfig | None = None,
    examples: dict[str, list[Example]] | None = None,
) -> PlanResult:
    """Run every stage in order on one encoder, then score the final model.

    Args:
        plan: Stages to run
        golden: Questions to evaluate the final head on
        config: Head initialisation and decoding settings
        examples: Pre-loaded examples by stage name; others are read from disk

    Raises:
        StageError: The first failing stage, by name
    """
    config = config or PipelineConfig()
    model = Model(ToyEncoder.create(plan.buckets, plan.hidden_size, plan.encoder_seed))
    result = PlanResult(plan)

    for stage in plan.stages:
        LOG.info("Running stage '%s' (%s)", stage.name, stage.task_kind)
        try:
            data = (examples or {}).get(stage.name)
            if data is None:
                data = load_examples(stage, model.encoder)
            result.stages.append(train_stage(model, stage, data, config))
        except StageError:
            raise
        except (BioqaError, ValueError) as e:
            message = e.message if isinstance(e, BioqaError) else str(e)
            raise StageError(stage.name, message) from e

    result.final_checksum = model.encoder.checksum()
    if golden:
        result.predictions = predict(model, golden, config)
        scored = [q for q in golden if _head_fits(model.head, _task_for(q.qtype))]
        if scored:
            result.metrics = evaluate_corpus(scored, result.predictions)
    return result


def _task_for(qtype: QuestionType) -> TaskKind:
    return TaskKind.YESNO if qtype == QuestionType.YESNO else TaskKind.SPAN


def compare_plans(a: PlanResult, b: PlanResult) -> dict[str, Any]:
    """Side-by-side summary of two runs, e.g. the same stages in two orders."""
    return {
        "plans": [a.to_dict(), b.to_dict()],
        "same_final_checksum": a.final_checksum == b.final_checksum,
        "macro_average": [
            a.metrics.macro_average if a.metrics else None,
            b.metrics.macro_average if b.metrics else None,
        ],
    }


def write_run(result: PlanResult, out_dir: Path) -> list[Path]:
    """Write loss CSVs, checksums and metrics into ``out_dir``; returns the files."""
    written = []
    for index, stage in enumerate(result.stages):
        path = out_dir / f"{index:02d}-{stage.name}.loss.csv"
        write_bytes(path, stage.loss_csv().encode())
        written.append(path)

    checksums = out_dir / "checksums.json"
    write_bytes(
        checksums,
        dump_json({"chain": result.checksum_chain(), "final": result.final_checksum}, pretty=True),
    )
    summary = out_dir / "metrics.json"
    write_bytes(summary, dump_json(result.to_dict(), pretty=True))
    written += [checksums, summary]

    if result.predictions is not None:
        preds = out_dir / "predictions.json"
        write_bytes(preds, write_predictions(result.predictions))
        written.append(preds)
    return written

