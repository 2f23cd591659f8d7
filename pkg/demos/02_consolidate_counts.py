"""Walk-through: consolidating noisy count candidates into one prediction.

Run with: python demos/02_consolidate_counts.py
"""

from coqex import CountCandidate, Strategy, consolidate

# Three passages proposed different counts with different confidences.
candidates = [
    CountCandidate(value=5, confidence=0.2, passage_id="p3", passage_rank=3),
    CountCandidate(value=150, confidence=0.5, passage_id="p2", passage_rank=2),
    CountCandidate(value=180, confidence=0.9, passage_id="p1", passage_rank=1),
]

print("Candidates (value, confidence):", [(c.value, c.confidence) for c in candidates])
print()
for strategy in Strategy:
    prediction = consolidate(candidates, strategy)
    support = sorted({c.value for c in prediction.support})
    print(f"  {strategy.value:18} -> {prediction.value}  (support values: {support})")

print(
    "\nThe weighted median resists the low-confidence outlier (5) and the\n"
    "single mid-confidence value (150): cumulative confidence reaches half\n"
    "of the total only at 180."
)
