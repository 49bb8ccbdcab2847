"""Square-function, pointwise and lattice-sum stability checks.

    python3 demos/lemma_bundle.py
"""

from besovbilin.experiments import run_lemma_checks

rep = run_lemma_checks()
for c in rep.checks:
    print(f"{'ok ' if c.passed else 'BAD'} {c.name:45s} {c.value:8.3f}  (limit {c.relation} {c.limit:g})")
print(rep.summary())
