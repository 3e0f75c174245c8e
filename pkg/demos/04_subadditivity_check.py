"""Verify margin-class subadditivity by exact enumeration.

The complexity of the induced margin class never exceeds the sum of the
per-class complexities.  One hand-built instance shows the two sides, and
a randomized sweep confirms the inequality over many small instances.
"""
import numpy as np

from mbl.core import TabulatedClass
from mbl.margin import MarginClassSpec, lemma1_sweep, materialize_margin_class, verify_lemma1

# Three classes of score functions on a 4-point sample.
f1 = TabulatedClass([[1, 1, -1, -1], [1, -1, 1, -1]])
f2 = TabulatedClass([[-1, -1, 1, 1], [0, 0, 0, 0]])
f3 = TabulatedClass([[1, 0, -1, 0]])
spec = MarginClassSpec((f1, f2, f3))
labels = np.array([1, 2, 3, 1])

mclass = materialize_margin_class(spec, labels)
print(f"margin class: {mclass.m} functions on {mclass.n} points "
      f"(product of class sizes {spec.product_size})")

report = verify_lemma1(spec, labels)
print(f"lhs (margin class)      {report.lhs:.6f}")
for j, value in enumerate(report.per_class, start=1):
    print(f"rhs term (class {j})      {value:.6f}")
print(f"rhs (sum)               {report.rhs:.6f}")
print(f"subadditivity holds: {report.passed}")

# Randomized sweep: every instance must satisfy lhs <= rhs + 1e-12.
sweep = lemma1_sweep(seeds=200, max_k=3, max_n=8, max_class_size=4)
print(f"\nsweep: {sweep['instances']} instances, "
      f"failures {len(sweep['failures'])}, worst slack {sweep['worst_slack']:.2e}")
