"""Agreement metrics between annotators.

Event extraction is scored with an assignment-based, size-penalized match
score; label tasks with Cohen's and Fleiss' kappa.
"""

from cgworkbench import (
    EventSetPair,
    LabelTable,
    LexicalSimilarity,
    best_mapping,
    cohen_kappa,
    embert,
    fleiss_kappa,
    pairwise_report,
)

lexical = LexicalSimilarity()

# Two annotators read "I thought I was going to get to see everybody".
annotator_1 = [
    "A thought A was going to get to see everybody",
    "A was going to get to see everybody",
    "A got to see everybody",
]
annotator_2 = [
    "A thought A would get to see everybody",
    "A got to see everybody",
]

pair = EventSetPair.of(annotator_1, annotator_2)
print(f"event-matched agreement: {embert(pair, lexical):.3f}")
print("identical lists score", embert(EventSetPair.of(annotator_1, annotator_1), lexical))
print("finding a different number of events is punished hard:")
print("  3 vs 2 events caps the score at 2/3 even with perfect matches")

scores = [[lexical.similarity(r, c) for c in annotator_2] for r in annotator_1]
print("optimal assignment:", sorted(best_mapping(scores)))

# Label agreement. Four shared items, two raters.
table = LabelTable.from_ratings({
    "rater1": ["JA", "JA", "RT", "JA"],
    "rater2": ["JA", "IN", "RT", "JA"],
})
print(f"\ncohen kappa: {cohen_kappa(table):.3f}")
print(f"fleiss kappa (same table): {fleiss_kappa(table):.3f}")

# The reporting convention: per annotator pair, mean kappa over the four
# label tasks Bel(A), Bel(B), CG(A), CG(B).
annotations = {
    "anno1": {
        "Bel(A)": ["CT+", "PS", "CT-"],
        "Bel(B)": ["CT+", "CT-", "CT-"],
        "CG(A)": ["JA", "RT", "RT"],
        "CG(B)": ["JA", "RT", "RT"],
    },
    "anno2": {
        "Bel(A)": ["CT+", "PS", "CT-"],
        "Bel(B)": ["CT+", "CT-", "NB"],
        "CG(A)": ["JA", "RT", "RT"],
        "CG(B)": ["JA", "RT", "0"],
    },
}
report = pairwise_report(annotations)
print("\npairwise mean-kappa matrix:")
print(report.to_text())
