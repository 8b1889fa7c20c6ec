"""Check the CR-submanifold machinery on three examples: the coordinate
leaf x = 0, the invariant surface x = y^2 loaded from a manifest file, and
the xi-line, which is totally real.

Run with ``python3 demos/04_cr_submanifolds.py``.
"""

from pathlib import Path

import numpy as np

from lpsasakian import (
    DistributionSplit,
    EmbeddingSpec,
    build_example3,
    build_example3_leaf,
    build_submanifold,
    generalized_connection,
    levi_civita,
    load_manifest,
    second_fundamental_form,
)
from lpsasakian.submanifold import (
    cr_structure_suite,
    generalized_gauss_weingarten_residuals,
    integrability_tests,
    lemma54_and_prop59_residuals,
)

np.set_printoptions(precision=6, suppress=True)

SUITES = (cr_structure_suite, generalized_gauss_weingarten_residuals, integrability_tests, lemma54_and_prop59_residuals)

leaf = build_example3_leaf()
surface = load_manifest((Path(__file__).parent / "surface.manifest").read_text()).submanifold
line = build_submanifold(
    EmbeddingSpec(build_example3(), ("u",), (0, 0, "u"), ((0, 0, 1),)),
    DistributionSplit((), (0,)),
)

for name, sub in (("leaf x = 0", leaf), ("surface x = y^2", surface), ("xi-line", line)):
    print(f"== {name}: orientation {sub.orientation}")
    for params in [(0.0, 0.0), (0.7, -1.3)]:
        counts = {}
        for suite in SUITES:
            for entry in suite(sub, params).entries:
                counts[entry.status] = counts.get(entry.status, 0) + 1
        print(f"   (alpha, beta) = {params}: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))

# Second fundamental form of the leaf for both connections.
p = (0.2, 0.1)
for label, conn in (("Levi-Civita", levi_civita(leaf.ambient)),
                    ("generalized (0.7, -1.3)", generalized_connection(leaf.ambient, (0.7, -1.3)))):
    sf = second_fundamental_form(leaf, conn, 0, 1, p)
    print(f"\n{label} on the leaf at {p}: h(e1, e2) = {sf.h_value.components + 0.0}")

print("\nIntegrability report for the xi-line, where D_perp is non-trivial, at (0.7, -1.3):")
print(integrability_tests(line, (0.7, -1.3)))
