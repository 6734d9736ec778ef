"""Cross-checks of a DP run against the brute-force oracle on one instance."""

from __future__ import annotations

from dataclasses import dataclass

from .decomp import AnnotatedTree, width_report
from .oracle import DEFAULT_BUDGET, OracleBudget, brute_count, n_z_oracle, proper_shapes
from .shapedp import EMPTY, Shape, restricted_shapes, run_dp, shape_bound


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tail = f": {self.detail}" if self.detail else ""
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}{tail}"


def run_checks(at: AnnotatedTree, budget: OracleBudget = DEFAULT_BUDGET) -> list:
    F, T, G = at.formula, at.tree, at.graph
    results = []
    expected = brute_count(F, budget)
    tables = run_dp(at, "scan")
    fast = run_dp(at, "indexed")
    got = tables[T.root].get(EMPTY, 0)
    results.append(CheckResult("count", got == expected, f"dp={got} brute={expected}"))
    results.append(CheckResult("indexed-combine", tables == fast))

    root_proper = proper_shapes(F, at.root, budget)
    results.append(CheckResult("root-proper-shapes", root_proper == {EMPTY},
                               f"{sorted(root_proper)}"))

    wr = width_report(T, G)
    bounded = wr.rankwidth <= wr.index <= 2 ** wr.rankwidth
    results.append(CheckResult("width-bounds", bounded,
                               f"rankwidth={wr.rankwidth} index={wr.index}"))

    bound = shape_bound(F.m, at.k)
    contain = size = exact = leaf = True
    notes = []
    for z in T.postorder():
        cz = at.contexts[z]
        rz = restricted_shapes(F, cz)
        pz = proper_shapes(F, cz, budget)
        if not pz <= rz:
            contain = False
            notes.append(f"node {z}: proper shape outside R_z")
        if len(rz) > bound:
            size = False
            notes.append(f"node {z}: |R_z|={len(rz)} > {bound}")
        table = tables[z]
        if set(table) != rz:
            exact = False
            notes.append(f"node {z}: table keys differ from R_z")
        for s in rz:
            n = n_z_oracle(F, cz, s, budget)
            v = table.get(s, 0)
            if v > n or (s in pz and v != n):
                exact = False
                notes.append(f"node {z}: l={v} n={n} at {tuple(s)}")
        if T.is_leaf(z):
            for s, v in table.items():
                if v != n_z_oracle(F, cz, Shape(*s), budget):
                    leaf = False
    results.append(CheckResult("proper-in-restricted", contain))
    results.append(CheckResult("restricted-size-bound", size, f"bound={bound}"))
    results.append(CheckResult("lower-bounding-tables", exact))
    results.append(CheckResult("leaf-tables", leaf))
    for r in results:
        if not r.ok and notes and not r.detail:
            r.detail = notes[0]
    return results
