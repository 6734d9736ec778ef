"""Model counting by dynamic programming over shapes.

For a tree node z, a shape is a pair (out, in) of clause sets: ``out`` is the
set of clauses outside the subtree satisfied by an assignment of var_z, and
``in`` the clauses inside the subtree that are left for an assignment from
outside to satisfy.  Each node gets a table over its restricted shapes that
is exact on every shape realizable from both sides and never overcounts on
the rest; the count is read off the root entry for (∅, ∅).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

from .cnf import CnfFormula, ContractError, bits, clauses_with_vars, projection_set
from .decomp import AnnotatedTree, DecompositionTree, NodeContext, annotate
from .incidence import build_incidence


class Shape(NamedTuple):
    out: int
    in_: int


EMPTY = Shape(0, 0)


@dataclass(frozen=True)
class CutFamilies:
    top: tuple  # var_z ∩ var(C) for C outside the subtree
    bot: tuple  # var̄_z ∩ var(C) for C inside


def cut_families(F: CnfFormula, z: NodeContext) -> CutFamilies:
    # clauses not crossing the cut all contribute the empty set
    top = {F.clause_var_mask(j + 1) & z.var_mask for j in bits(z.touch_out)}
    if z.clause_bar & ~z.touch_out:
        top.add(0)
    bot = {F.clause_var_mask(j + 1) & z.var_bar for j in bits(z.touch_in)}
    if z.clause_mask & ~z.touch_in:
        bot.add(0)
    return CutFamilies(tuple(sorted(top)), tuple(sorted(bot)))


def projection_choices(F: CnfFormula, z: NodeContext) -> tuple[dict, dict]:
    """For each cut-family member X, the projections a choice function may pick."""
    fam = cut_families(F, z)
    top = {X: projection_set(F, clauses_with_vars(F, X, within=z.clause_bar), X) for X in fam.top}
    bot = {X: projection_set(F, clauses_with_vars(F, X, within=z.clause_mask), X) for X in fam.bot}
    return top, bot


def _unions(choices: dict) -> set:
    # fold member by member; deduplicating partial unions keeps this small
    acc = {0}
    for X in sorted(choices):
        acc = {a | c for a in acc for c in choices[X]}
    return acc


def restricted_shapes(F: CnfFormula, z: NodeContext) -> set:
    top, bot = projection_choices(F, z)
    return {Shape(o, i) for o in _unions(top) for i in _unions(bot)}


def choice_function_unions(choices: dict) -> set:
    """Unions over every choice function, enumerated one function at a time."""
    keys = sorted(choices)
    out = set()
    for picks in itertools.product(*(sorted(choices[X]) for X in keys)):
        u = 0
        for p in picks:
            u |= p
        out.add(u)
    return out


def generates(sx: Shape, sy: Shape, sz: Shape,
              cx: NodeContext, cy: NodeContext, cz: NodeContext) -> bool:
    return (sz.out == (sx.out | sy.out) & cz.clause_bar
            and sx.in_ == (sz.in_ | sy.out) & cx.clause_mask
            and sy.in_ == (sz.in_ | sx.out) & cy.clause_mask)


def leaf_table(F: CnfFormula, at: AnnotatedTree, z: int) -> dict:
    T, G = at.tree, at.graph
    v = T.leaf_vertex[z]
    if not G.is_variable(v):
        c = 1 << (v - G.n_vars)
        return {EMPTY: 0, Shape(0, c): 1}
    plus, minus = F.occurrences(G.variables[v])
    if plus == minus:
        return {Shape(plus, 0): 2}
    return {Shape(plus, 0): 1, Shape(minus, 0): 1}


def combine_tables(at: AnnotatedTree, z: int, table_x: dict, table_y: dict,
                   method: str = "scan") -> dict:
    """Table for inner node z from its children's tables.

    ``scan`` tests every (s_x, s_y, s_z) triple; ``indexed`` only visits the
    s_z whose out-component equals (out_x | out_y) minus F_z.  Both give the
    same table.
    """
    F = at.formula
    x, y = at.tree.children[z]
    cx, cy, cz = at.contexts[x], at.contexts[y], at.contexts[z]
    rz = sorted(restricted_shapes(F, cz))
    table = {s: 0 for s in rz}
    px = [(s, v) for s, v in table_x.items() if v]
    py = [(s, v) for s, v in table_y.items() if v]
    if method == "scan":
        for sx, vx in px:
            for sy, vy in py:
                prod = vx * vy
                for sz in rz:
                    if generates(sx, sy, sz, cx, cy, cz):
                        table[sz] += prod
    elif method == "indexed":
        by_out: dict = {}
        for s in rz:
            by_out.setdefault(s.out, []).append(s.in_)
        fx, fy, fbar = cx.clause_mask, cy.clause_mask, cz.clause_bar
        for sx, vx in px:
            for sy, vy in py:
                out_z = (sx.out | sy.out) & fbar
                ins = by_out.get(out_z)
                if not ins:
                    continue
                for in_z in ins:
                    if (sx.in_ == (in_z | sy.out) & fx
                            and sy.in_ == (in_z | sx.out) & fy):
                        table[Shape(out_z, in_z)] += vx * vy
    else:
        raise ValueError(f"unknown combine method {method!r}")
    return table


def run_dp(at: AnnotatedTree, method: str = "scan", threads: int = 0) -> list:
    """Tables for every node of the annotated tree, indexed by node id."""
    T = at.tree
    F = at.formula
    tables: list = [None] * T.size

    def solve(z):
        if T.children[z] is None:
            tables[z] = leaf_table(F, at, z)
        else:
            x, y = T.children[z]
            solve(x)
            solve(y)
            tables[z] = combine_tables(at, z, tables[x], tables[y], method)

    if threads and threads > 1:
        depth = int(math.log2(threads))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            def par(z, d):
                if T.children[z] is None or d == 0:
                    solve(z)
                    return
                x, y = T.children[z]
                fut = pool.submit(par, x, d - 1)
                par(y, d - 1)
                fut.result()
                tables[z] = combine_tables(at, z, tables[x], tables[y], method)
            par(T.root, depth)
    else:
        for z in T.postorder():
            if T.children[z] is None:
                tables[z] = leaf_table(F, at, z)
            else:
                x, y = T.children[z]
                tables[z] = combine_tables(at, z, tables[x], tables[y], method)
    return tables


def count_models(F: CnfFormula, T, method: str = "scan", threads: int = 0) -> int:
    """Number of satisfying total assignments of F over var(F).

    ``T`` is a DecompositionTree of the incidence graph of F, or an already
    annotated tree.
    """
    if F.m == 0:
        return 1
    if isinstance(T, DecompositionTree):
        T = annotate(T, F, build_incidence(F))
    elif T.formula is not F and T.formula != F:
        raise ContractError("annotated tree belongs to a different formula")
    tables = run_dp(T, method, threads)
    return tables[T.tree.root].get(EMPTY, 0)


def shape_bound(m: int, k: int) -> int:
    return (m + 1) ** (2 * k)


__all__ = [
    "Shape", "EMPTY", "CutFamilies", "cut_families", "projection_choices",
    "restricted_shapes", "choice_function_unions", "generates", "leaf_table",
    "combine_tables", "run_dp", "count_models", "shape_bound",
]
