"""Inter-annotator agreement: event-matched similarity scores and kappas.

The event-matching score pairs up two annotators' event lists with an
optimal injective assignment and averages the matched similarities over
the larger list, so disagreeing on the *number* of events is punished
before disagreeing on their wording.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AgreementError
from .similarity import SimilarityProvider

#: Tolerance for "achieves the optimal total" when breaking assignment ties.
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class EventSetPair:
    """Two annotators' event strings for the same stretch of dialogue."""

    reference: Tuple[str, ...]
    compared: Tuple[str, ...]

    @classmethod
    def of(cls, reference: Sequence[str], compared: Sequence[str]) -> "EventSetPair":
        return cls(tuple(reference), tuple(compared))


def _max_total(scores: np.ndarray) -> float:
    if 0 in scores.shape:
        return 0.0
    rows, cols = linear_sum_assignment(scores, maximize=True)
    return float(scores[rows, cols].sum())


def best_mapping(scores) -> Set[Tuple[int, int]]:
    """Injective mapping of size min(n, m) maximizing the total score.

    Ties are broken deterministically: among all maximizing mappings, the
    one whose sorted pair list is lexicographically smallest is returned.
    """
    S = np.asarray(scores, dtype=float)
    if S.ndim != 2:
        raise AgreementError("score matrix must be 2-d")
    if S.size and (S.min() < 0.0 or S.max() > 1.0):
        raise AgreementError("scores must lie in [0, 1]")
    n, m = S.shape
    need = min(n, m)
    if need == 0:
        return set()

    chosen: List[Tuple[int, int]] = []
    rows = list(range(n))
    cols = list(range(m))
    remaining_total = _max_total(S)
    while need > 0:
        placed = False
        for i in rows:
            rows_after = [r for r in rows if r > i]
            if len(rows_after) < need - 1:
                # Later pairs may only use rows after i; not enough left.
                continue
            for j in cols:
                cols_after = [c for c in cols if c != j]
                sub = S[np.ix_(rows_after, cols_after)]
                if S[i, j] + _max_total(sub) >= remaining_total - _TIE_TOL:
                    chosen.append((i, j))
                    remaining_total -= S[i, j]
                    rows, cols = rows_after, cols_after
                    need -= 1
                    placed = True
                    break
            if placed:
                break
        if not placed:  # pragma: no cover - defensive; optimum is always reachable
            raise AgreementError("assignment search failed to reach the optimal total")
    return set(chosen)


def embert(pair: EventSetPair, provider: SimilarityProvider) -> float:
    """Event-matched agreement between a reference and a compared event list.

    Empty vs empty is vacuous agreement (1.0). Otherwise the optimal
    assignment matches min(n, m) pairs and every unmatched event on either
    side contributes a zero, i.e. the mean runs over max(n, m) terms.
    """
    n, m = len(pair.reference), len(pair.compared)
    if n == 0 and m == 0:
        return 1.0
    if n == 0 or m == 0:
        return 0.0
    scores = np.array(
        [[provider.similarity(r, c) for c in pair.compared] for r in pair.reference],
        dtype=float,
    )
    return _max_total(scores) / max(n, m)


@dataclass(frozen=True)
class LabelTable:
    """A complete items x raters table of categorical labels."""

    items: Tuple[str, ...]
    raters: Tuple[str, ...]
    labels: Mapping[Tuple[str, str], str]

    def __post_init__(self) -> None:
        for item in self.items:
            for rater in self.raters:
                if (item, rater) not in self.labels:
                    raise AgreementError(f"incomplete table: missing ({item}, {rater})")

    @classmethod
    def from_ratings(cls, ratings: Mapping[str, Sequence[str]]) -> "LabelTable":
        """Build from per-rater label sequences aligned on the same items."""
        raters = tuple(ratings)
        lengths = {len(seq) for seq in ratings.values()}
        if len(lengths) != 1:
            raise AgreementError("incomplete table: raters labeled different item counts")
        (count,) = lengths
        items = tuple(f"i{k}" for k in range(count))
        labels = {
            (items[k], rater): str(seq[k]) for rater, seq in ratings.items() for k in range(count)
        }
        return cls(items, raters, labels)

    def column(self, rater: str) -> List[str]:
        return [self.labels[(item, rater)] for item in self.items]


def cohen_kappa(table: LabelTable) -> float:
    """Chance-corrected agreement between exactly two raters."""
    if len(table.raters) != 2:
        raise AgreementError(f"cohen_kappa needs exactly 2 raters, got {len(table.raters)}")
    if not table.items:
        raise AgreementError("cohen_kappa needs at least one item")
    a = table.column(table.raters[0])
    b = table.column(table.raters[1])
    total = len(a)
    p_o = sum(x == y for x, y in zip(a, b)) / total
    categories = set(a) | set(b)
    p_e = sum((a.count(c) / total) * (b.count(c) / total) for c in categories)
    if p_e == 1.0:
        if p_o == 1.0:
            return 1.0
        raise AgreementError("degenerate marginals")
    return (p_o - p_e) / (1.0 - p_e)


def fleiss_kappa(table: LabelTable) -> float:
    """Chance-corrected agreement for two or more raters."""
    n = len(table.raters)
    if n < 2:
        raise AgreementError(f"fleiss_kappa needs >= 2 raters, got {n}")
    if not table.items:
        raise AgreementError("fleiss_kappa needs at least one item")
    categories = sorted({label for label in table.labels.values()})
    counts = np.zeros((len(table.items), len(categories)), dtype=float)
    cat_index = {c: k for k, c in enumerate(categories)}
    for i, item in enumerate(table.items):
        for rater in table.raters:
            counts[i, cat_index[table.labels[(item, rater)]]] += 1
    p_item = ((counts**2).sum(axis=1) - n) / (n * (n - 1))
    p_bar = float(p_item.mean())
    p_cat = counts.sum(axis=0) / (len(table.items) * n)
    p_e = float((p_cat**2).sum())
    if p_e == 1.0:
        if p_bar == 1.0:
            return 1.0
        raise AgreementError("degenerate marginals")
    return (p_bar - p_e) / (1.0 - p_e)


#: The four label tasks a pairwise report averages over.
LABEL_TASKS = ("Bel(A)", "Bel(B)", "CG(A)", "CG(B)")


@dataclass(frozen=True)
class AgreementReport:
    """Pairwise mean-kappa matrix over annotators, with per-task detail."""

    annotators: Tuple[str, ...]
    tasks: Tuple[str, ...]
    per_task: Mapping[Tuple[str, str], Mapping[str, float]]
    mean: Mapping[Tuple[str, str], float]

    def matrix(self) -> List[List[float]]:
        return [
            [self.mean[(a, b)] if a != b else 1.0 for b in self.annotators]
            for a in self.annotators
        ]

    def to_text(self) -> str:
        width = max(len(a) for a in self.annotators) + 2
        lines = ["".ljust(width) + "".join(a.rjust(width) for a in self.annotators)]
        for a, row in zip(self.annotators, self.matrix()):
            lines.append(a.ljust(width) + "".join(f"{v:.2f}".rjust(width) for v in row))
        return "\n".join(lines)


def pairwise_report(
    annotations: Mapping[str, Mapping[str, Sequence[str]]],
    tasks: Sequence[str] = LABEL_TASKS,
) -> AgreementReport:
    """Mean pairwise Cohen's kappa across the label tasks.

    ``annotations`` maps annotator -> task -> labels over the same gold
    events. Every annotator must cover every task with the same item count.
    """
    annotators = tuple(annotations)
    if len(annotators) < 2:
        raise AgreementError("pairwise_report needs at least 2 annotators")
    for name, by_task in annotations.items():
        missing = [t for t in tasks if t not in by_task]
        if missing:
            raise AgreementError(f"task coverage mismatch: {name} lacks {missing}")
    for task in tasks:
        lengths = {len(annotations[name][task]) for name in annotators}
        if len(lengths) != 1:
            raise AgreementError(f"task coverage mismatch: unequal item counts for {task}")

    per_task: Dict[Tuple[str, str], Dict[str, float]] = {}
    mean: Dict[Tuple[str, str], float] = {}
    for i, a in enumerate(annotators):
        for b in annotators[i + 1 :]:
            kappas = {
                task: cohen_kappa(
                    LabelTable.from_ratings({a: annotations[a][task], b: annotations[b][task]})
                )
                for task in tasks
            }
            per_task[(a, b)] = kappas
            per_task[(b, a)] = kappas
            mean[(a, b)] = mean[(b, a)] = sum(kappas.values()) / len(kappas)
    for a in annotators:
        mean[(a, a)] = 1.0
    return AgreementReport(annotators, tuple(tasks), per_task, mean)
