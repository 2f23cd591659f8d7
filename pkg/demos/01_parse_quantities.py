"""Walk-through: turning surface forms into normalized quantities.

Run with: python demos/01_parse_quantities.py
"""

from coqex import parse_quantity, split_cnp

FORMS = [
    "approximately 180",
    "more than 150 songs",
    "an estimated 700 languages",
    "85 million native speakers",
    "five children",
    "150 to 180 songs",
    "50 km from Paris",      # measurement, not a count
    "30% of voters",         # measurement, not a count
]

print("Parsing surface forms:")
for text in FORMS:
    q = parse_quantity(text)
    if q is None:
        print(f"  {text!r:35} -> no count (measurement or no number)")
    else:
        bounds = f" bounds={q.range_bounds}" if q.range_bounds else ""
        print(f"  {text!r:35} -> {q.value} ({q.modifier.value}){bounds}")

print("\nSplitting answer spans into count + modified noun phrase:")
for text in ["17 regional languages", "an estimated 700 languages", "700"]:
    cs = split_cnp(text)
    print(f"  {text!r:35} -> count={cs.quantity.value}, phrase={cs.modifier_phrase!r}")
