"""Incidence graphs of CNF formulas and their GF(2) cut functions.

Vertex order is fixed: variables by ascending id, then clauses by ascending
id.  Vertex sets are int bitmasks over that order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnf import CnfFormula, bits


@dataclass(frozen=True)
class IncidenceGraph:
    variables: tuple   # variable id of vertex i, for i < n_vars
    n_clauses: int
    adjacency: tuple   # row i: bitmask of neighbours of vertex i

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def is_variable(self, v: int) -> bool:
        return v < self.n_vars

    def clause_vertex(self, cid: int) -> int:
        return self.n_vars + cid - 1

    def variable_vertex(self, var: int) -> int:
        return self.variables.index(var)

    def label(self, v: int) -> str:
        if v < self.n_vars:
            return f"v{self.variables[v]}"
        return f"c{v - self.n_vars + 1}"

    def vertex_of_label(self, label: str) -> int:
        kind, num = label[:1], label[1:]
        if not num.isdigit():
            raise KeyError(label)
        k = int(num)
        if kind == "v" and k in self.variables:
            return self.variables.index(k)
        if kind == "c" and 1 <= k <= self.n_clauses:
            return self.n_vars + k - 1
        raise KeyError(label)

    def edge_count(self) -> int:
        return sum(bin(r).count("1") for r in self.adjacency) // 2


def build_incidence(formula: CnfFormula) -> IncidenceGraph:
    variables = tuple(sorted(formula.var_set))
    pos = {v: i for i, v in enumerate(variables)}
    nv = len(variables)
    rows = [0] * (nv + formula.m)
    for j, c in enumerate(formula.clauses):
        cv = nv + j
        for var in c.variables:
            rows[pos[var]] |= 1 << cv
            rows[cv] |= 1 << pos[var]
    return IncidenceGraph(variables, formula.m, tuple(rows))


def gf2_rank(rows: list) -> int:
    """Rank over GF(2) of int-bitset rows."""
    work = [r for r in rows if r]
    rank = 0
    while work:
        pivot = work.pop()
        if not pivot:
            continue
        rank += 1
        low = pivot & -pivot
        work = [r ^ pivot if r & low else r for r in work]
        work = [r for r in work if r]
    return rank


def cut_rank(G: IncidenceGraph, X: int) -> int:
    """GF(2) rank of the adjacency submatrix A[X, V \\ X]."""
    X &= G.full
    outside = G.full & ~X
    if not X or not outside:
        return 0
    return gf2_rank([G.adjacency[v] & outside for v in bits(X)])


def _require_proper(G: IncidenceGraph, X: int) -> int:
    X &= G.full
    if not X or X == G.full:
        raise ValueError("index is defined only for proper nonempty vertex subsets")
    return X


def index_of(G: IncidenceGraph, X: int) -> int:
    """Number of distinct neighbourhoods outside X among the vertices of X."""
    X = _require_proper(G, X)
    outside = G.full & ~X
    return len({G.adjacency[v] & outside for v in bits(X)})


def iota(G: IncidenceGraph, X: int) -> int:
    X = _require_proper(G, X)
    return max(index_of(G, X), index_of(G, G.full & ~X))
