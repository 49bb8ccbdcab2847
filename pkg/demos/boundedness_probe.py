"""Ratio R(j) for admissible and inadmissible exponents.

Admissible tuples keep R(j) flat; the diagonal tuple with s1 + s2 = -1
grows like 2^{j/2}.

    python3 demos/boundedness_probe.py
"""

from besovbilin.experiments import default_boundedness_configs, run_boundedness_probe

for cfg in default_boundedness_configs():
    rep = run_boundedness_probe(cfg)
    R = [r.ratio for r in rep.records if r.label == "R"]
    tag = "admissible" if cfg.admissible() else "inadmissible"
    print(f"{rep.name:60s} {tag:13s} R = {', '.join(f'{v:.3f}' for v in R)}  slope {rep.slope:+.3f}")
