"""BioASQ Phase-B scoring for yes/no, factoid and list questions."""

import logging
from collections.abc import Collection, Mapping, Sequence
from dataclasses import asdict, dataclass
from statistics import fmean
from typing import Any

from .constants import MAX_FACTOID_CANDIDATES
from .errors import EvaluationError
from .formats.predictions import PredictionFile
from .models import BioasqQuestion, QuestionType
from .normalize import normalize_answer

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class YesNoScores:
    accuracy: float
    yes_f1: float
    no_f1: float
    macro_f1: float
    count: int


@dataclass(frozen=True)
class FactoidScores:
    sacc: float
    lacc: float
    mrr: float
    count: int


@dataclass(frozen=True)
class ListScores:
    precision: float
    recall: float
    f1: float
    count: int


def _check_ids(preds: Mapping[str, Any], golds: Mapping[str, Any]) -> None:
    if not golds:
        raise EvaluationError("No golden answers to evaluate against")
    for qid in preds:
        if qid not in golds:
            raise EvaluationError(f"Prediction for unknown question id '{qid}'", question_id=qid)


def _f1(tp: int, fp: int, fn: int) -> float:
    denominator = 2 * tp + fp + fn
    return 2 * tp / denominator if denominator else 0.0


def eval_yesno(preds: Mapping[str, bool], golds: Mapping[str, bool]) -> YesNoScores:
    """Accuracy and per-class F1; a missing prediction is wrong for its gold class.

    Raises:
        EvaluationError: Empty golds or a prediction id absent from golds
    """
    _check_ids(preds, golds)

    correct = 0
    # confusion counts per positive class
    tp = {True: 0, False: 0}
    fp = {True: 0, False: 0}
    fn = {True: 0, False: 0}
    for qid, gold in golds.items():
        pred = preds.get(qid)
        if pred == gold:
            correct += 1
            tp[gold] += 1
            continue
        fn[gold] += 1
        if pred is not None:
            fp[pred] += 1

    yes_f1 = _f1(tp[True], fp[True], fn[True])
    no_f1 = _f1(tp[False], fp[False], fn[False])
    return YesNoScores(
        accuracy=correct / len(golds),
        yes_f1=yes_f1,
        no_f1=no_f1,
        macro_f1=(yes_f1 + no_f1) / 2,
        count=len(golds),
    )


# A predicted answer: one string, or a group of synonyms matched if any one matches.
Answer = str | Sequence[str]


def _keys(answer: Answer, strict: bool) -> set[str]:
    synonyms = (answer,) if isinstance(answer, str) else answer
    return {normalize_answer(s, strict) for s in synonyms}


def first_correct_rank(ranked: Sequence[Answer], synonyms: Sequence[str], strict: bool = False) -> int | None:
    keys = _keys(synonyms, strict)
    for rank, candidate in enumerate(ranked, start=1):
        if _keys(candidate, strict) & keys:
            return rank
    return None


def eval_factoid(
    preds: Mapping[str, Sequence[Answer]],
    golds: Mapping[str, Sequence[str]],
    strict: bool = False,
) -> FactoidScores:
    """Strict accuracy, lenient accuracy and MRR over at most five candidates.

    Raises:
        EvaluationError: Empty golds, unknown ids, or a list longer than five
    """
    _check_ids(preds, golds)

    sacc = lacc = rr = 0.0
    for qid, synonyms in golds.items():
        ranked = preds.get(qid, ())
        if len(ranked) > MAX_FACTOID_CANDIDATES:
            raise EvaluationError(
                f"Factoid prediction for '{qid}' has {len(ranked)} candidates; "
                f"at most {MAX_FACTOID_CANDIDATES} are scored",
                question_id=qid,
            )
        rank = first_correct_rank(ranked, synonyms, strict)
        if rank is None:
            continue
        sacc += rank == 1
        lacc += 1
        rr += 1 / rank

    n = len(golds)
    return FactoidScores(sacc=sacc / n, lacc=lacc / n, mrr=rr / n, count=n)


def matched_items(
    predicted: Sequence[Answer], items: Sequence[Sequence[str]], strict: bool = False
) -> int:
    """Maximum number of predictions that can each claim a distinct gold item."""
    item_keys = [_keys(item, strict) for item in items]
    edges = [[j for j, keys in enumerate(item_keys) if _keys(p, strict) & keys] for p in predicted]
    owner: dict[int, int] = {}  # gold item -> prediction holding it

    def augment(i: int, visited: set[int]) -> bool:
        for j in edges[i]:
            if j in visited:
                continue
            visited.add(j)
            if j not in owner or augment(owner[j], visited):
                owner[j] = i
                return True
        return False

    return sum(augment(i, set()) for i in range(len(predicted)))


def eval_list(
    preds: Mapping[str, Collection[Answer]],
    golds: Mapping[str, Sequence[Sequence[str]]],
    strict: bool = False,
) -> ListScores:
    """Mean per-question precision, recall and F1.

    Each gold item is credited at most once, so a second prediction hitting
    the same item counts against precision.

    Raises:
        EvaluationError: Empty golds or unknown ids
    """
    _check_ids(preds, golds)

    precisions, recalls, f1s = [], [], []
    for qid, items in golds.items():
        predicted = list(preds.get(qid, ()))
        matched = matched_items(predicted, items, strict)
        p = matched / len(predicted) if predicted else 0.0
        r = matched / len(items) if items else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(2 * p * r / (p + r) if p + r else 0.0)

    return ListScores(
        precision=fmean(precisions),
        recall=fmean(recalls),
        f1=fmean(f1s),
        count=len(golds),
    )


def macro_average(yesno_macro_f1: float, factoid_mrr: float, list_f1: float) -> float:
    """Challenge-level score: unweighted mean of the three type scores."""
    return (yesno_macro_f1 + factoid_mrr + list_f1) / 3


@dataclass(frozen=True)
class MetricsReport:
    yesno: YesNoScores | None = None
    factoid: FactoidScores | None = None
    lists: ListScores | None = None

    @property
    def macro_average(self) -> float:
        """Mean over the question types present; all three when all are scored."""
        if self.yesno and self.factoid and self.lists:
            return macro_average(self.yesno.macro_f1, self.factoid.mrr, self.lists.f1)
        parts = [
            score
            for score in (
                self.yesno.macro_f1 if self.yesno else None,
                self.factoid.mrr if self.factoid else None,
                self.lists.f1 if self.lists else None,
            )
            if score is not None
        ]
        return fmean(parts) if parts else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "yesno": asdict(self.yesno) if self.yesno else None,
            "factoid": asdict(self.factoid) if self.factoid else None,
            "list": asdict(self.lists) if self.lists else None,
            "macro_average": self.macro_average,
        }


def evaluate_corpus(
    golden: Sequence[BioasqQuestion],
    preds: PredictionFile,
    strict: bool = False,
) -> MetricsReport:
    """Score a prediction file against golden questions of all three types.

    A ranked list given for a list question is read as its answer set.

    Raises:
        EvaluationError: Unknown prediction id or a prediction of the wrong shape
    """
    by_id = {q.id: q for q in golden}
    for qid in preds.ids:
        if qid not in by_id:
            raise EvaluationError(f"Prediction for unknown question id '{qid}'", question_id=qid)

    yesno_gold: dict[str, bool] = {}
    factoid_gold: dict[str, tuple[str, ...]] = {}
    list_gold: dict[str, tuple[tuple[str, ...], ...]] = {}
    for q in golden:
        match q.qtype:
            case QuestionType.YESNO if q.gold.yes_label is not None:
                yesno_gold[q.id] = q.gold.yes_label
            case QuestionType.FACTOID:
                factoid_gold[q.id] = q.gold.items[0] if q.gold.items else ()
            case QuestionType.LIST:
                list_gold[q.id] = q.gold.items

    yesno_pred = dict(preds.yesno)
    factoid_pred = dict(preds.factoid)
    list_pred = dict(preds.lists)
    for qid in list(factoid_pred):
        if qid in list_gold:
            list_pred[qid] = factoid_pred.pop(qid)
    mismatched = [
        *((qid, "yes/no") for qid in yesno_pred if qid not in yesno_gold),
        *((qid, "factoid") for qid in factoid_pred if qid not in factoid_gold),
        *((qid, "list") for qid in list_pred if qid not in list_gold),
    ]
    if mismatched:
        qid, bucket = mismatched[0]
        raise EvaluationError(
            f"Prediction for '{qid}' is a {bucket} answer but the question is {by_id[qid].qtype}",
            question_id=qid,
        )

    predicted = set(preds.ids)
    missing = sum(1 for q in golden if q.id not in predicted)
    if missing:
        LOG.warning("%d golden question(s) have no prediction and score zero", missing)

    return MetricsReport(
        yesno=eval_yesno(yesno_pred, yesno_gold) if yesno_gold else None,
        factoid=eval_factoid(factoid_pred, factoid_gold, strict) if factoid_gold else None,
        lists=eval_list(list_pred, list_gold, strict) if list_gold else None,
    )
