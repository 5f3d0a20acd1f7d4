"""Word-analogy scoring, neighbor inspection, norm reports, linear probes.

Analogy scoring follows the additive-offset protocol: the prediction for
"a : b :: c : ?" is the vocabulary word maximizing cosine similarity to
u_b - u_a + u_c over L2-normalized copies of the embeddings, with a, b, c
themselves excluded and the candidate pool restricted to the most frequent
words. Classification runs on a small multinomial logistic-regression
implementation so the package has no solver dependency.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary
from .errors import CorpusError, ParameterError
from .model import ModelParams

GRAD_TOL = 1e-4
MAX_ITER = 500


@dataclass
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str
    category: str


@dataclass
class CategoryScore:
    scored: int = 0
    correct: int = 0
    skipped: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.scored if self.scored else 0.0


@dataclass
class AnalogyReport:
    categories: dict[str, CategoryScore] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(c.scored + c.skipped for c in self.categories.values())

    @property
    def scored(self) -> int:
        return sum(c.scored for c in self.categories.values())

    @property
    def skipped(self) -> int:
        return sum(c.skipped for c in self.categories.values())

    @property
    def overall_accuracy(self) -> float:
        n = self.scored
        return sum(c.correct for c in self.categories.values()) / n if n else 0.0

    def to_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "scored": self.scored,
            "skipped": self.skipped,
            "categories": {
                name: {"accuracy": c.accuracy, "scored": c.scored,
                       "correct": c.correct, "skipped": c.skipped}
                for name, c in self.categories.items()
            },
        }


def load_analogy_questions(path) -> list[AnalogyQuestion]:
    """Parse ": category" sections of 4-token lines, lowercasing everything."""
    questions: list[AnalogyQuestion] = []
    category = "default"
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(":"):
                category = line[1:].strip().lower() or "default"
                continue
            parts = line.lower().split()
            if len(parts) != 4:
                raise CorpusError(
                    f"line {lineno}: expected 4 tokens or ': category', got {line!r}")
            questions.append(AnalogyQuestion(*parts, category=category))
    return questions


def _normalized(mat: np.ndarray) -> np.ndarray:
    out = mat.astype(np.float64)
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    np.divide(out, norms, out=out, where=norms > 0)
    return out


def _lowercase_index(vocab: Vocabulary) -> dict[str, int]:
    # first (most frequent) id wins when case folding collides
    index: dict[str, int] = {}
    for i, w in enumerate(vocab.words):
        index.setdefault(w.lower(), i)
    return index


def analogy_eval(params: ModelParams, vocab: Vocabulary,
                 questions: list[AnalogyQuestion],
                 restrict_top: int = 30000, batch: int = 256) -> AnalogyReport:
    """Top-1 additive-offset accuracy, per category and overall.

    A question is skipped (and counted) when any of its four words is
    missing from the vocabulary or falls outside the ``restrict_top`` most
    frequent words.
    """
    limit = min(restrict_top, len(vocab))
    normed = _normalized(params.input_vectors[:limit])
    index = _lowercase_index(vocab)

    report = AnalogyReport()
    usable: list[tuple[AnalogyQuestion, int, int, int, int]] = []
    for qn in questions:
        score = report.categories.setdefault(qn.category, CategoryScore())
        ids = [index.get(w) for w in (qn.a, qn.b, qn.c, qn.d)]
        if any(i is None or i >= limit for i in ids):
            score.skipped += 1
            continue
        usable.append((qn, *ids))

    for start in range(0, len(usable), batch):
        chunk = usable[start:start + batch]
        targets = np.stack([
            normed[b] - normed[a] + normed[c] for _, a, b, c, _d in chunk])
        scores = targets @ normed.T
        for row, (qn, a, b, c, d) in enumerate(chunk):
            scores[row, [a, b, c]] = -np.inf
            predicted = int(np.argmax(scores[row]))
            cs = report.categories[qn.category]
            cs.scored += 1
            if predicted == d:
                cs.correct += 1
    return report


def nearest_neighbors(params: ModelParams, vocab: Vocabulary, word: str,
                      n: int = 10) -> list[tuple[str, float]]:
    """Top-n cosine neighbors of ``word`` over the input vectors."""
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    wid = vocab.id_of(word)
    normed = _normalized(params.input_vectors)
    sims = normed @ normed[wid]
    sims[wid] = -np.inf
    top = np.argsort(-sims, kind="stable")[:n]
    return [(vocab.words[i], float(sims[i])) for i in top]


def norm_report(params: ModelParams, vocab: Vocabulary,
                bottom_n: int = 30) -> list[tuple[str, float, int]]:
    """The ``bottom_n`` words by ascending embedding L2 norm, with counts.

    Ties keep vocabulary (frequency) order; the report reads only the model,
    so retraining on a reshuffled corpus with identical parameters yields
    the identical report.
    """
    norms = np.linalg.norm(params.input_vectors.astype(np.float64), axis=1)
    order = np.argsort(norms, kind="stable")[:bottom_n]
    return [(vocab.words[i], float(norms[i]), int(vocab.counts[i])) for i in order]


@dataclass
class LinearClassifier:
    weights: np.ndarray
    bias: np.ndarray
    l2: float
    classes: np.ndarray

    @property
    def n_classes(self) -> int:
        return len(self.classes)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    np.exp(shifted, out=shifted)
    shifted /= shifted.sum(axis=1, keepdims=True)
    return shifted


def _objective(x, y_onehot, w, b, l2):
    probs = _softmax(x @ w.T + b)
    n = len(x)
    # clip only inside the log; the gradient uses the exact probabilities
    ll = -np.log(np.clip(probs[np.arange(n), y_onehot.argmax(axis=1)], 1e-300, None)).mean()
    return ll + 0.5 * l2 * float((w * w).sum()), probs


def fit_linear(features: np.ndarray, labels, l2: float = 0.0) -> LinearClassifier:
    """Multinomial logistic regression by gradient descent with step halving.

    Runs until the gradient max-norm drops below 1e-4 or 500 accepted steps.
    The loss never increases across accepted steps. L2 applies to the weight
    matrix only, not the bias.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ParameterError(f"features must be 2-d, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ParameterError("features contain non-finite values")
    if l2 < 0:
        raise ParameterError(f"l2 strength must be >= 0, got {l2}")
    y_raw = np.asarray(labels)
    classes, y = np.unique(y_raw, return_inverse=True)
    if len(classes) < 2:
        raise ParameterError("need at least 2 distinct classes to fit a classifier")
    if len(y) != len(x):
        raise ParameterError(f"{len(x)} feature rows but {len(y)} labels")

    n, h = x.shape
    c = len(classes)
    y_onehot = np.zeros((n, c))
    y_onehot[np.arange(n), y] = 1.0
    w = np.zeros((c, h))
    b = np.zeros(c)

    loss, probs = _objective(x, y_onehot, w, b, l2)
    step = 1.0
    for _ in range(MAX_ITER):
        resid = (probs - y_onehot) / n
        grad_w = resid.T @ x + l2 * w
        grad_b = resid.sum(axis=0)
        gmax = max(np.abs(grad_w).max(), np.abs(grad_b).max())
        if gmax <= GRAD_TOL:
            break
        while step > 1e-12:
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            loss_new, probs_new = _objective(x, y_onehot, w_new, b_new, l2)
            if loss_new <= loss:
                break
            step *= 0.5
        else:
            break
        w, b, loss, probs = w_new, b_new, loss_new, probs_new
        step *= 1.3
    return LinearClassifier(w, b, l2, classes)


def classify(clf: LinearClassifier, feature: np.ndarray):
    """Argmax-logit label for one feature row or a batch of rows."""
    x = np.asarray(feature, dtype=np.float64)
    single = x.ndim == 1
    logits = np.atleast_2d(x) @ clf.weights.T + clf.bias
    picks = clf.classes[np.argmax(logits, axis=1)]
    return picks[0] if single else picks
