"""Yes/no and span heads, their losses, span decoding and gradient checking.

Everything runs in float64. The yes/no head scores the sequence vector at
position 0 with a single row M; the span head holds a start row and an end
row and takes an independent softmax over positions for each.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

Array = NDArray[np.float64]
Offsets = tuple[int, int] | None


def _require_finite(values: Array, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite values")


@dataclass(frozen=True, eq=False)
class HiddenStates:
    """s x H encoder output plus, per position, character offsets into the context."""

    vectors: Array
    offsets: tuple[Offsets, ...] = ()

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1 or vectors.shape[1] < 1:
            raise ValueError(f"hidden states must be s x H with s, H >= 1, got {vectors.shape}")
        _require_finite(vectors, "hidden states")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        if self.offsets and len(self.offsets) != vectors.shape[0]:
            raise ValueError("offsets must have one entry per position")

    @property
    def cls(self) -> Array:
        return self.vectors[0]

    @property
    def seq_len(self) -> int:
        return self.vectors.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.vectors.shape[1]


@dataclass
class YesNoHead:
    """1 x H weights; the bias stays at zero unless ``use_bias`` is set."""

    weight: Array
    bias: float = 0.0
    use_bias: bool = False

    @classmethod
    def zeros(cls, hidden_size: int, use_bias: bool = False) -> "YesNoHead":
        return cls(np.zeros(hidden_size), 0.0, use_bias)

    @classmethod
    def normal(
        cls, hidden_size: int, rng: np.random.Generator, scale: float = 0.02, use_bias: bool = False
    ) -> "YesNoHead":
        return cls(rng.normal(0.0, scale, hidden_size), 0.0, use_bias)

    def logit(self, cls_vector: Array) -> float:
        return float(cls_vector @ self.weight + self.bias)


@dataclass
class SpanHead:
    """2 x H weights, row 0 scores start positions and row 1 end positions."""

    weight: Array
    bias: Array = field(default_factory=lambda: np.zeros(2))
    use_bias: bool = False

    @classmethod
    def zeros(cls, hidden_size: int, use_bias: bool = False) -> "SpanHead":
        return cls(np.zeros((2, hidden_size)), np.zeros(2), use_bias)

    @classmethod
    def normal(
        cls, hidden_size: int, rng: np.random.Generator, scale: float = 0.02, use_bias: bool = False
    ) -> "SpanHead":
        return cls(rng.normal(0.0, scale, (2, hidden_size)), np.zeros(2), use_bias)

    def logits(self, vectors: Array) -> Array:
        """(s, 2) start/end logits."""
        return vectors @ self.weight.T + self.bias


def sigmoid(z: ArrayLike) -> Array:
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def yes_probability(cls_vector: ArrayLike, head: YesNoHead) -> float:
    """sigmoid(C . M); stable across the whole float64 logit range.

    Raises:
        ValueError: Non-finite input or weights
    """
    c = np.asarray(cls_vector, dtype=np.float64)
    _require_finite(c, "sequence vector")
    _require_finite(head.weight, "yes/no head")
    return float(sigmoid(head.logit(c)))


def bce_loss(p: float, label: bool) -> float:
    """-(a log p + (1 - a) log(1 - p)) for a probability p in (0, 1).

    Raises:
        ValueError: If p is outside the open interval
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    a = float(label)
    return float(-(a * np.log(p) + (1.0 - a) * np.log1p(-p)))


def bce_with_logits(z: ArrayLike, labels: ArrayLike) -> Array:
    """Elementwise BCE computed from logits: softplus(z) - a*z. Gradient is p - a."""
    z = np.asarray(z, dtype=np.float64)
    a = np.asarray(labels, dtype=np.float64)
    return np.logaddexp(0.0, z) - a * z


def log_softmax(logits: ArrayLike, axis: int = -1) -> Array:
    x = np.asarray(logits, dtype=np.float64)
    shifted = x - x.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def softmax(logits: ArrayLike, axis: int = -1) -> Array:
    x = np.asarray(logits, dtype=np.float64)
    e = np.exp(x - x.max(axis=axis, keepdims=True))
    return e / e.sum(axis=axis, keepdims=True)


def span_distributions(h: HiddenStates, head: SpanHead) -> tuple[Array, Array]:
    """Start and end distributions over the s positions.

    Raises:
        ValueError: If any logit is non-finite
    """
    logits = head.logits(h.vectors)
    _require_finite(logits, "span logits")
    return softmax(logits[:, 0]), softmax(logits[:, 1])


def _check_gold(gold: Sequence[tuple[int, int]], seq_len: int) -> None:
    for a_s, a_e in gold:
        if not 0 <= a_s <= a_e < seq_len:
            raise ValueError(f"gold span ({a_s}, {a_e}) out of range for sequence length {seq_len}")


def span_loss(p_start: ArrayLike, p_end: ArrayLike, gold: Sequence[tuple[int, int]]) -> float:
    """Mean of the start and end negative log-likelihoods over a batch.

    ``p_start``/``p_end`` are (N, s), or (s,) for a single item.

    Raises:
        ValueError: If a gold index is out of range or the batch sizes differ
    """
    ps = np.atleast_2d(np.asarray(p_start, dtype=np.float64))
    pe = np.atleast_2d(np.asarray(p_end, dtype=np.float64))
    if ps.shape != pe.shape or ps.shape[0] != len(gold):
        raise ValueError("start, end and gold batch sizes differ")
    _check_gold(gold, ps.shape[1])

    rows = np.arange(len(gold))
    starts = np.array([g[0] for g in gold])
    ends = np.array([g[1] for g in gold])
    loss_start = -np.mean(np.log(ps[rows, starts]))
    loss_end = -np.mean(np.log(pe[rows, ends]))
    return float((loss_start + loss_end) / 2)


@dataclass(frozen=True, slots=True)
class SpanPrediction:
    start_index: int
    end_index: int
    score: float


def decode_spans(
    p_start: ArrayLike, p_end: ArrayLike, k: int = 5, max_len: int = 30
) -> list[SpanPrediction]:
    """Top-k spans i <= j < i + max_len by P_start[i] * P_end[j].

    Ties go to the smaller start, then the smaller end.
    """
    if k < 1 or max_len < 1:
        raise ValueError("k and max_len must be >= 1")
    ps = np.asarray(p_start, dtype=np.float64)
    pe = np.asarray(p_end, dtype=np.float64)

    i, j = np.indices((ps.size, pe.size))
    band = (j >= i) & (j < i + max_len)
    starts, ends = i[band], j[band]
    scores = ps[starts] * pe[ends]
    order = np.lexsort((ends, starts, -scores))[:k]
    return [SpanPrediction(int(starts[n]), int(ends[n]), float(scores[n])) for n in order]


# Loss and gradients used by training and by the gradient checks


def yesno_loss_and_grads(
    cls_vector: Array, head: YesNoHead, label: bool
) -> tuple[float, Array, float, Array]:
    """Loss plus gradients for the head weight, head bias and the sequence vector."""
    z = head.logit(cls_vector)
    loss = float(bce_with_logits(z, float(label)))
    dz = float(sigmoid(z)) - float(label)
    return loss, dz * cls_vector, dz, dz * head.weight


def span_loss_and_grads(
    vectors: Array, head: SpanHead, a_s: int, a_e: int
) -> tuple[float, Array, Array, Array]:
    """Loss plus gradients for the head weight, head bias and every hidden vector."""
    _check_gold([(a_s, a_e)], vectors.shape[0])
    logits = head.logits(vectors)
    log_ps = log_softmax(logits[:, 0])
    log_pe = log_softmax(logits[:, 1])
    loss = float(-(log_ps[a_s] + log_pe[a_e]) / 2)

    dlogits = np.stack([np.exp(log_ps), np.exp(log_pe)], axis=1)
    dlogits[a_s, 0] -= 1.0
    dlogits[a_e, 1] -= 1.0
    dlogits /= 2.0
    return loss, dlogits.T @ vectors, dlogits.sum(axis=0), dlogits @ head.weight


Objective = Callable[[Array], tuple[float, Array]]


def yesno_objective(cls_vectors: ArrayLike, labels: Sequence[bool]) -> Objective:
    """Mean BCE over a batch as a function of the flat head weight."""
    x = np.asarray(cls_vectors, dtype=np.float64)
    a = np.asarray(labels, dtype=np.float64)

    def objective(weight: Array) -> tuple[float, Array]:
        z = x @ weight
        loss = float(np.mean(bce_with_logits(z, a)))
        grad = x.T @ (sigmoid(z) - a) / len(a)
        return loss, grad

    return objective


def span_objective(batch: Sequence[Array], gold: Sequence[tuple[int, int]]) -> Objective:
    """Mean span loss over a batch as a function of the flattened 2 x H head weight."""
    hidden = batch[0].shape[1]

    def objective(weight: Array) -> tuple[float, Array]:
        head = SpanHead(weight.reshape(2, hidden))
        total, grad = 0.0, np.zeros((2, hidden))
        for vectors, (a_s, a_e) in zip(batch, gold, strict=True):
            loss, dw, _, _ = span_loss_and_grads(vectors, head, a_s, a_e)
            total += loss
            grad += dw
        return total / len(gold), grad.ravel() / len(gold)

    return objective


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    max_abs_error: float
    passed: bool


def grad_check(
    loss_fn: Objective,
    params: ArrayLike,
    step: float = 1e-5,
    tolerance: float = 1e-4,
) -> GradCheckResult:
    """Compare analytic gradients against central differences, coordinate by coordinate.

    Args:
        loss_fn: Returns (loss, analytic gradient) at the given flat parameters
        params: Point to check at
        step: Finite-difference step
        tolerance: Pass threshold on the max relative error

    Raises:
        ValueError: Non-positive step or a non-finite loss
    """
    if step <= 0:
        raise ValueError("step must be positive")
    theta = np.array(params, dtype=np.float64).ravel()
    loss, analytic = loss_fn(theta.copy())
    if not np.isfinite(loss):
        raise ValueError("loss is not finite at the check point")
    analytic = np.asarray(analytic, dtype=np.float64).ravel()

    numeric = np.empty_like(theta)
    for n in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[n] += step
        minus[n] -= step
        f_plus, _ = loss_fn(plus)
        f_minus, _ = loss_fn(minus)
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise ValueError(f"loss is not finite near coordinate {n}")
        numeric[n] = (f_plus - f_minus) / (2 * step)

    abs_err = np.abs(analytic - numeric)
    rel_err = abs_err / np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    max_rel = float(rel_err.max(initial=0.0))
    return GradCheckResult(
        max_rel_error=max_rel,
        max_abs_error=float(abs_err.max(initial=0.0)),
        passed=max_rel < tolerance,
    )
