"""Bootstrap intervals and paired McNemar tests on a small simulated comparison."""
import numpy as np

from cobbie.evalkit import CRITERIA, EvalRecord, PairedOutcomes, bootstrap_ci, mcnemar, significance_stars

rng = np.random.default_rng(7)


def records(p):
    out = []
    for i, ok in enumerate(rng.random(120) < p):
        out.append(EvalRecord(f"t{i}", 1, False, **{c: bool(ok) for c in CRITERIA}))
    return out


a, b = records(0.7), records(0.55)
for name, rs in (("A", a), ("B", b)):
    lo, hi = bootstrap_ci(rs, "accuracy", 10_000, seed=42)
    print(f"{name}: accuracy {sum(r.correct for r in rs) / len(rs):.3f}  95% CI [{lo:.3f}, {hi:.3f}]")

res = mcnemar(PairedOutcomes.from_records(a, b))
print(f"\nMcNemar ({res.method}): b={res.b} c={res.c} p={res.p_value:.4f} {significance_stars(res.p_value)}")
