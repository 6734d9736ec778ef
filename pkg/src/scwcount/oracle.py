"""Brute-force ground truth for model counts and shape quantities.

Everything here enumerates assignments directly from the definitions and
shares no code with the dynamic program beyond the formula data model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .cnf import Assignment, CnfFormula, bits
from .decomp import AnnotatedTree, BudgetExceeded, NodeContext
from .shapedp import Shape


@dataclass(frozen=True)
class OracleBudget:
    max_variables: int = 20
    max_total_assignment_pairs: int = 1 << 22
    max_full_shape_clauses: int = 6


DEFAULT_BUDGET = OracleBudget()


def submasks(domain: int):
    """All subsets of ``domain`` (as true-sets of assignments over it)."""
    s = 0
    while True:
        yield s
        if s == domain:
            return
        s = (s - domain) & domain


def _check_vars(n: int, budget: OracleBudget) -> None:
    if n > budget.max_variables:
        raise BudgetExceeded(f"oracle refused: {n} variables exceeds budget {budget.max_variables}")


def satisfies_all(F: CnfFormula, true: int) -> bool:
    for c in F.clauses:
        if not any((lit > 0) == bool(true >> abs(lit) & 1) for lit in c.literals):
            return False
    return True


def brute_count(F: CnfFormula, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    dom = F.var_mask
    _check_vars(bin(dom).count("1"), budget)
    return sum(1 for t in submasks(dom) if satisfies_all(F, t))


def _satisfied(F: CnfFormula, cset: int, domain: int, true: int) -> int:
    out = 0
    for j in bits(cset):
        c = F.clauses[j]
        for lit in c.literals:
            v = abs(lit)
            if domain >> v & 1 and (lit > 0) == bool(true >> v & 1):
                out |= 1 << j
                break
    return out


def shapes_of(F: CnfFormula, tau: Assignment, z: NodeContext) -> Callable[[Shape], bool]:
    """Predicate: does ``tau`` (an assignment of var_z) have the given shape at z?"""
    if tau.domain != z.var_mask:
        raise ValueError("assignment domain must be exactly var_z")
    sat_out = _satisfied(F, z.clause_bar, tau.domain, tau.true)
    unsat_in = z.clause_mask & ~_satisfied(F, z.clause_mask, tau.domain, tau.true)

    def has(s: Shape) -> bool:
        out, in_ = s
        return out == sat_out and unsat_in & ~in_ == 0

    return has


def proper_shapes(F: CnfFormula, z: NodeContext, budget: OracleBudget = DEFAULT_BUDGET) -> set:
    inside, outside = bin(z.var_mask).count("1"), bin(z.var_bar).count("1")
    _check_vars(max(inside, outside), budget)
    if (1 << inside) + (1 << outside) > budget.max_total_assignment_pairs:
        raise BudgetExceeded("oracle refused: too many assignments")
    outs = {_satisfied(F, z.clause_bar, z.var_mask, s) for s in submasks(z.var_mask)}
    ins = {_satisfied(F, z.clause_mask, z.var_bar, t) for t in submasks(z.var_bar)}
    return {Shape(o, i) for o in outs for i in ins}


def n_z_oracle(F: CnfFormula, z: NodeContext, s: Shape,
               budget: OracleBudget = DEFAULT_BUDGET) -> int:
    _check_vars(bin(z.var_mask).count("1"), budget)
    return sum(1 for t in submasks(z.var_mask)
               if shapes_of(F, Assignment(z.var_mask, t), z)(s))


def all_shapes(z: NodeContext, budget: OracleBudget = DEFAULT_BUDGET) -> list:
    """The full shape space of z: every (out ⊆ F̄_z, in ⊆ F_z)."""
    m = bin(z.clause_bar | z.clause_mask).count("1")
    if m > budget.max_full_shape_clauses:
        raise BudgetExceeded(f"full shape space refused for {m} clauses")
    return [Shape(o, i) for o in submasks(z.clause_bar) for i in submasks(z.clause_mask)]


def full_n_table(F: CnfFormula, z: NodeContext, budget: OracleBudget = DEFAULT_BUDGET) -> dict:
    """n_z(s) for every shape s in the full shape space, by enumeration."""
    table = {s: 0 for s in all_shapes(z, budget)}
    _check_vars(bin(z.var_mask).count("1"), budget)
    for t in submasks(z.var_mask):
        has = shapes_of(F, Assignment(z.var_mask, t), z)
        for s in table:
            if has(s):
                table[s] += 1
    return table


def _generates(sx, sy, sz, cx, cy, cz) -> bool:
    # restated from the definition, independently of the DP module
    fx, fy, fbar = cx.clause_mask, cy.clause_mask, cz.clause_bar
    return (sz[0] == ((sx[0] | sy[0]) & fbar)
            and sx[1] == ((sz[1] | sy[0]) & fx)
            and sy[1] == ((sz[1] | sx[0]) & fy))


def counting_identity_violations(at: AnnotatedTree, z: int, proper_only: bool = False,
                                 budget: OracleBudget = DEFAULT_BUDGET) -> list:
    """Shapes s of inner node z where n_z(s) differs from the sum of n_x·n_y.

    The sum runs over all generating pairs of the full shape spaces of the
    children, or only over pairs of proper shapes when ``proper_only`` (then
    only proper s are checked).
    """
    F = at.formula
    x, y = at.tree.children[z]
    cx, cy, cz = at.contexts[x], at.contexts[y], at.contexts[z]
    nx, ny, nz = (full_n_table(F, c, budget) for c in (cx, cy, cz))
    if proper_only:
        px, py, pz = (proper_shapes(F, c, budget) for c in (cx, cy, cz))
        sx_list = [s for s in nx if s in px]
        sy_list = [s for s in ny if s in py]
        targets = [s for s in nz if s in pz]
    else:
        sx_list, sy_list, targets = list(nx), list(ny), list(nz)
    bad = []
    for s in targets:
        total = sum(nx[a] * ny[b] for a in sx_list for b in sy_list
                    if _generates(a, b, s, cx, cy, cz))
        if total != nz[s]:
            bad.append((s, nz[s], total))
    return bad


def unique_generator_violations(at: AnnotatedTree, z: int, shapes_z: Optional[set] = None,
                                budget: OracleBudget = DEFAULT_BUDGET) -> list:
    """Assignments of var_z whose split into children is not witnessed by exactly one pair."""
    F = at.formula
    x, y = at.tree.children[z]
    cx, cy, cz = at.contexts[x], at.contexts[y], at.contexts[z]
    sx_all, sy_all = all_shapes(cx, budget), all_shapes(cy, budget)
    targets = shapes_z if shapes_z is not None else all_shapes(cz, budget)
    bad = []
    for t in submasks(cz.var_mask):
        has_z = shapes_of(F, Assignment(cz.var_mask, t), cz)
        has_x = shapes_of(F, Assignment(cx.var_mask, t & cx.var_mask), cx)
        has_y = shapes_of(F, Assignment(cy.var_mask, t & cy.var_mask), cy)
        xs = [a for a in sx_all if has_x(a)]
        ys = [b for b in sy_all if has_y(b)]
        for s in targets:
            if not has_z(s):
                continue
            n = sum(1 for a in xs for b in ys if _generates(a, b, s, cx, cy, cz))
            if n != 1:
                bad.append((t, s, n))
    return bad
