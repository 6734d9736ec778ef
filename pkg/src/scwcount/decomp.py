"""Decomposition trees over incidence graphs.

A tree is stored as flat tuples indexed by node id: ``children[z]`` is a
``(left, right)`` pair for inner nodes and ``None`` for leaves, and
``leaf_vertex[z]`` is the graph vertex a leaf is mapped to.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

from .cnf import CnfFormula, bits
from .incidence import IncidenceGraph, cut_rank, iota

DEFAULT_EXACT_BOUND = 10


class DecompositionError(ValueError):
    """A decomposition tree does not fit its graph, or its file is malformed."""


class BudgetExceeded(RuntimeError):
    """An exhaustive computation was refused because the input is too large."""


Nested = Union[int, tuple]


@dataclass(frozen=True)
class DecompositionTree:
    root: int
    children: tuple
    leaf_vertex: tuple

    @property
    def size(self) -> int:
        return len(self.children)

    def is_leaf(self, z: int) -> bool:
        return self.children[z] is None

    def leaves(self) -> list[int]:
        return [z for z in self.postorder() if self.children[z] is None]

    def postorder(self) -> list[int]:
        order, stack = [], [(self.root, False)]
        while stack:
            z, done = stack.pop()
            if done or self.children[z] is None:
                order.append(z)
                continue
            stack.append((z, True))
            left, right = self.children[z]
            stack.append((right, False))
            stack.append((left, False))
        return order

    def leafsets(self) -> list[int]:
        """Vertex bitmask below each node."""
        sets = [0] * self.size
        for z in self.postorder():
            if self.children[z] is None:
                sets[z] = 1 << self.leaf_vertex[z]
            else:
                left, right = self.children[z]
                sets[z] = sets[left] | sets[right]
        return sets

    def validate(self, n_vertices: int) -> None:
        """Check binarity, acyclicity and that leaves biject onto the vertices."""
        seen = set()
        stack = [self.root]
        covered = 0
        while stack:
            z = stack.pop()
            if not 0 <= z < self.size:
                raise DecompositionError(f"node {z} does not exist")
            if z in seen:
                raise DecompositionError(f"node {z} is reachable twice (cycle or shared subtree)")
            seen.add(z)
            ch = self.children[z]
            if ch is None:
                v = self.leaf_vertex[z]
                if v is None or not 0 <= v < n_vertices:
                    raise DecompositionError(f"leaf {z} has no valid vertex")
                if covered >> v & 1:
                    raise DecompositionError(f"vertex {v} labels two leaves")
                covered |= 1 << v
            else:
                if len(ch) != 2:
                    raise DecompositionError(f"node {z} is not binary")
                stack.extend(ch)
        if len(seen) != self.size:
            raise DecompositionError("tree has nodes unreachable from the root")
        if covered != (1 << n_vertices) - 1:
            missing = bits(((1 << n_vertices) - 1) & ~covered)
            raise DecompositionError(f"missing vertex {missing[0]}")

    @classmethod
    def from_nested(cls, nested: Nested) -> "DecompositionTree":
        """Build from nested pairs of vertex indices, e.g. ``((0, 1), 2)``."""
        children: list = []
        leaf_vertex: list = []

        def build(t):
            z = len(children)
            children.append(None)
            leaf_vertex.append(None)
            if isinstance(t, int):
                leaf_vertex[z] = t
            else:
                left, right = t
                children[z] = (build(left), build(right))
            return z

        root = build(nested)
        return cls(root, tuple(children), tuple(leaf_vertex))

    def to_nested(self, z: Optional[int] = None) -> Nested:
        z = self.root if z is None else z
        if self.children[z] is None:
            return self.leaf_vertex[z]
        left, right = self.children[z]
        return (self.to_nested(left), self.to_nested(right))


@dataclass(frozen=True)
class WidthReport:
    rankwidth: int
    index: int


def _cut_function(f) -> Callable:
    if f in ("cutrank", "rank"):
        return cut_rank
    if f in ("iota", "index"):
        return iota
    return f


def f_width(T: DecompositionTree, G: IncidenceGraph, f="iota") -> int:
    """Maximum of the symmetric cut function ``f`` over the tree's edges."""
    if G.n <= 1:
        return 0
    fn = _cut_function(f)
    sets = T.leafsets()
    return max(fn(G, sets[z]) for z in range(T.size) if z != T.root)


def width_report(T: DecompositionTree, G: IncidenceGraph) -> WidthReport:
    return WidthReport(f_width(T, G, "cutrank"), f_width(T, G, "iota"))


def _induced_iota(adj: list, A: int, B: int) -> int:
    ia = len({adj[v] & B for v in bits(A)})
    ib = len({adj[v] & A for v in bits(B)})
    return ia if ia > ib else ib


def exact_min_index_tree(G: IncidenceGraph, bound: int = DEFAULT_EXACT_BOUND) -> DecompositionTree:
    """A decomposition tree of minimum index, by exhaustive branch and bound.

    Unrooted trees are generated by inserting vertices 0, 1, 2, ... one at a
    time into an edge of the tree built so far; the sequence of chosen edge
    positions is the canonical encoding.  The index of a partial tree over
    the induced subgraph never exceeds that of any completion, so subtrees
    that cannot beat the incumbent are cut.  Among minimum trees the one with
    the lexicographically smallest encoding is returned.
    """
    n = G.n
    if n > bound:
        raise BudgetExceeded(
            f"exact search refused: {n} vertices exceeds bound {bound}; use the heuristic strategy")
    if n < 2:
        raise DecompositionError("a decomposition tree needs at least 2 vertices")
    if n == 2:
        return DecompositionTree.from_nested((0, 1))

    adj = list(G.adjacency)
    upper = f_width(heuristic_tree(G), G, "iota")
    best: list = [None, upper + 1]  # (edges, width)

    # edge = (a, b, side): side is the leaf set on a's side of the edge
    center = n
    start = [(0, center, 0b001), (1, center, 0b010), (2, center, 0b100)]

    def width_of(edges, S, limit):
        w = 0
        for _, _, side in edges:
            c = _induced_iota(adj, side, S & ~side)
            if c > w:
                w = c
                if w >= limit:
                    return w
        return w

    def search(edges, i, S, next_node):
        if i == n:
            w = width_of(edges, S, best[1])
            if w < best[1]:
                best[0], best[1] = edges, w
            return
        bi = 1 << i
        S2 = S | bi
        for j, (a, b, side) in enumerate(edges):
            other = S & ~side
            new = []
            for k, (fa, fb, fside) in enumerate(edges):
                if k == j:
                    continue
                fother = S & ~fside
                # i lands on the side of f that holds edge j
                if fother & ~side == 0 or fother & ~other == 0:
                    new.append((fa, fb, fside | bi))
                else:
                    new.append((fa, fb, fside))
            w = next_node
            new.insert(j, (a, w, side))
            new.append((w, b, side | bi))
            new.append((i, w, bi))
            if width_of(new, S2, best[1]) >= best[1]:
                continue
            search(new, i + 1, S2, next_node + 1)

    if width_of(start, 0b111, best[1]) < best[1]:
        search(start, 3, 0b111, center + 1)
    # the heuristic's own tree has width <= upper, so something was found
    return _root_unrooted(best[0], n)


def _root_unrooted(edges, n: int) -> DecompositionTree:
    nbrs: dict = {}
    for a, b, _ in edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)

    def build(node, parent):
        if node < n:
            return node
        kids = [c for c in nbrs[node] if c != parent]
        return (build(kids[0], node), build(kids[1], node))

    anchor = nbrs[0][0]
    return DecompositionTree.from_nested((0, build(anchor, 0)))


def _nested_width(nested: Nested, adj: list, full: int, limit: int) -> int:
    w = 0
    sets = []

    def collect(t):
        if isinstance(t, int):
            s = 1 << t
        else:
            s = collect(t[0]) | collect(t[1])
        sets.append(s)
        return s

    collect(nested)
    sets.pop()  # the root has no parent edge
    for s in sets:
        c = _induced_iota(adj, s, full & ~s)
        if c > w:
            w = c
            if w >= limit:
                return w
    return w


def _remove_leaf(t: Nested, v: int) -> Optional[Nested]:
    if isinstance(t, int):
        return None if t == v else t
    left, right = _remove_leaf(t[0], v), _remove_leaf(t[1], v)
    if left is None:
        return right
    if right is None:
        return left
    return (left, right)


def _insertions(t: Nested, v: int) -> list:
    """Every tree obtained by hanging leaf ``v`` above some node of ``t``."""
    out = [(t, v)]
    if not isinstance(t, int):
        left, right = t
        out += [(x, right) for x in _insertions(left, v)]
        out += [(left, x) for x in _insertions(right, v)]
    return out


def heuristic_tree(G: IncidenceGraph, local_search_limit: int = 64) -> DecompositionTree:
    """Greedy caterpillar plus one pass of leaf relocation.

    Vertices are placed one by one, each time taking the unplaced vertex whose
    neighbourhood outside the placed set is Hamming-closest to that of some
    placed vertex (ties by vertex order).  A caterpillar over this order is
    then improved by moving each leaf in turn to the position giving the
    smallest index, accepting only strict improvements.  The relocation pass
    is skipped above ``local_search_limit`` vertices.
    """
    n = G.n
    if n < 2:
        raise DecompositionError("a decomposition tree needs at least 2 vertices")
    adj = list(G.adjacency)
    full = G.full
    order = [0]
    placed = 1
    remaining = list(range(1, n))
    while remaining:
        best_v, best_d = None, None
        for v in remaining:
            outside = full & ~placed & ~(1 << v)
            row = adj[v] & outside
            d = min(bin((adj[u] & outside) ^ row).count("1") for u in order)
            if best_d is None or d < best_d:
                best_v, best_d = v, d
        order.append(best_v)
        placed |= 1 << best_v
        remaining.remove(best_v)

    tree: Nested = order[0]
    for v in order[1:]:
        tree = (tree, v)

    if n > 2 and n <= local_search_limit:
        width = _nested_width(tree, adj, full, n + 1)
        for v in range(n):
            rest = _remove_leaf(tree, v)
            for cand in _insertions(rest, v):
                w = _nested_width(cand, adj, full, width)
                if w < width:
                    tree, width = cand, w
    return DecompositionTree.from_nested(tree)


def random_tree(n_vertices: int, rng: random.Random) -> DecompositionTree:
    """A random decomposition tree built by merging random pairs of subtrees."""
    if n_vertices < 2:
        raise DecompositionError("a decomposition tree needs at least 2 vertices")
    parts: list = list(range(n_vertices))
    rng.shuffle(parts)
    while len(parts) > 1:
        i, j = sorted(rng.sample(range(len(parts)), 2))
        b = parts.pop(j)
        a = parts.pop(i)
        parts.append((a, b))
    return DecompositionTree.from_nested(parts[0])


def emit_decomposition(T: DecompositionTree, G: IncidenceGraph, comments=()) -> str:
    """Text form: ``root <id>``, ``node <id> inner <l> <r>``, ``node <id> leaf <label>``."""
    lines = [f"# {c}" for c in comments]
    ids: dict = {}
    stack = [T.root]
    order = []
    while stack:
        z = stack.pop()
        ids[z] = len(ids) + 1
        order.append(z)
        if T.children[z] is not None:
            left, right = T.children[z]
            stack.extend([right, left])
    lines.append(f"root {ids[T.root]}")
    for z in order:
        if T.children[z] is None:
            lines.append(f"node {ids[z]} leaf {G.label(T.leaf_vertex[z])}")
        else:
            left, right = T.children[z]
            lines.append(f"node {ids[z]} inner {ids[left]} {ids[right]}")
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str, G: IncidenceGraph) -> DecompositionTree:
    root = None
    inner: dict = {}
    leaf: dict = {}
    labels_seen: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        f = s.split()
        try:
            if f[0] == "root" and len(f) == 2:
                if root is not None:
                    raise DecompositionError(f"line {lineno}: duplicate root")
                root = int(f[1])
            elif f[0] == "node" and len(f) >= 3:
                z = int(f[1])
                if z in inner or z in leaf:
                    raise DecompositionError(f"line {lineno}: node {z} defined twice")
                if f[2] == "inner":
                    if len(f) != 5:
                        raise DecompositionError(f"line {lineno}: non-binary node {z}")
                    inner[z] = (int(f[3]), int(f[4]))
                elif f[2] == "leaf" and len(f) == 4:
                    label = f[3]
                    try:
                        v = G.vertex_of_label(label)
                    except KeyError:
                        raise DecompositionError(
                            f"line {lineno}: unknown vertex label {label!r}") from None
                    if v in labels_seen:
                        raise DecompositionError(f"line {lineno}: duplicate leaf label {label!r}")
                    labels_seen[v] = z
                    leaf[z] = v
                else:
                    raise DecompositionError(f"line {lineno}: cannot parse {s!r}")
            else:
                raise DecompositionError(f"line {lineno}: cannot parse {s!r}")
        except ValueError as e:
            if isinstance(e, DecompositionError):
                raise
            raise DecompositionError(f"line {lineno}: bad node id in {s!r}") from None
    if root is None:
        raise DecompositionError("no root line")
    for z, (a, b) in inner.items():
        for c in (a, b):
            if c not in inner and c not in leaf:
                raise DecompositionError(f"node {z} references undefined node {c}")
    if root not in inner and root not in leaf:
        raise DecompositionError(f"root {root} is undefined")
    missing = [v for v in range(G.n) if v not in labels_seen]
    if missing:
        raise DecompositionError(f"missing vertex {G.label(missing[0])}")

    idx = {z: i for i, z in enumerate(sorted(set(inner) | set(leaf)))}
    children = [None] * len(idx)
    leaf_vertex = [None] * len(idx)
    for z, (a, b) in inner.items():
        children[idx[z]] = (idx[a], idx[b])
    for z, v in leaf.items():
        leaf_vertex[idx[z]] = v
    T = DecompositionTree(idx[root], tuple(children), tuple(leaf_vertex))
    T.validate(G.n)
    return T


@dataclass(frozen=True)
class NodeContext:
    node: int
    var_mask: int        # var_z
    clause_mask: int     # F_z
    var_bar: int         # var(F) \ var_z
    clause_bar: int      # F \ F_z
    vertices: int        # δ(L(T_z)) as a vertex bitmask
    touch_out: int = 0   # clauses of F \ F_z sharing a variable with var_z
    touch_in: int = 0    # clauses of F_z with a variable outside var_z


@dataclass(frozen=True)
class AnnotatedTree:
    tree: DecompositionTree
    formula: CnfFormula
    graph: IncidenceGraph
    contexts: tuple

    @property
    def root(self) -> NodeContext:
        return self.contexts[self.tree.root]

    def children(self, z: int):
        return self.tree.children[z]

    @cached_property
    def cut_ranks(self) -> tuple:
        """Cut-rank of the edge above each node (None at the root)."""
        return tuple(None if z == self.tree.root else cut_rank(self.graph, c.vertices)
                     for z, c in enumerate(self.contexts))

    @cached_property
    def indices(self) -> tuple:
        """ι of the edge above each node (None at the root)."""
        return tuple(None if z == self.tree.root else iota(self.graph, c.vertices)
                     for z, c in enumerate(self.contexts))

    @property
    def rankwidth(self) -> int:
        return max((r for r in self.cut_ranks if r is not None), default=0)

    @property
    def k(self) -> int:
        """index(T, δ)."""
        return max((i for i in self.indices if i is not None), default=0)


def annotate(T: DecompositionTree, F: CnfFormula, G: IncidenceGraph) -> AnnotatedTree:
    """Per-node variable and clause sets, computed bottom-up.

    Cut widths are evaluated lazily on first access to ``k`` or ``rankwidth``.
    """
    if T.size != 2 * G.n - 1:
        raise DecompositionError(
            f"tree has {T.size} nodes but a graph on {G.n} vertices needs {2 * G.n - 1}")
    T.validate(G.n)
    if G.variables != tuple(sorted(F.var_set)) or G.n_clauses != F.m:
        raise DecompositionError("incidence graph does not belong to the formula")
    all_vars = F.var_mask
    all_cls = F.all_clauses
    nv = G.n_vars
    ctx: list = [None] * T.size
    for z in T.postorder():
        if T.children[z] is None:
            v = T.leaf_vertex[z]
            if v < nv:
                var = G.variables[v]
                pos, neg = F.occurrences(var)
                var_mask, cls = 1 << var, 0
                t_out, t_in = pos | neg, 0
            else:
                j = v - nv
                var_mask, cls = 0, 1 << j
                t_out, t_in = 0, cls
            vs = 1 << v
        else:
            a, b = (ctx[c] for c in T.children[z])
            var_mask = a.var_mask | b.var_mask
            cls = a.clause_mask | b.clause_mask
            vs = a.vertices | b.vertices
            t_out = (a.touch_out | b.touch_out) & ~cls
            t_in = 0
            for j in bits(a.touch_in | b.touch_in):
                if F.clause_var_mask(j + 1) & ~var_mask:
                    t_in |= 1 << j
        ctx[z] = NodeContext(z, var_mask, cls, all_vars & ~var_mask, all_cls & ~cls, vs,
                             t_out, t_in)
    return AnnotatedTree(T, F, G, tuple(ctx))
