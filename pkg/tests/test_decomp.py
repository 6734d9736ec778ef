import random

import pytest

from conftest import all_rooted_trees, graph_edges, naive_index, random_formula
from scwcount.cnf import CnfFormula
from scwcount.decomp import (BudgetExceeded, DecompositionError, DecompositionTree, annotate,
                             emit_decomposition, exact_min_index_tree, f_width, heuristic_tree,
                             parse_decomposition, random_tree, width_report)
from scwcount.incidence import build_incidence


def naive_index_width(G, nested):
    """ι-width of a nested tree from the pairwise-comparison index oracle."""
    edges, verts = graph_edges(G), list(range(G.n))
    cuts = []

    def walk(t):
        s = {t} if isinstance(t, int) else walk(t[0]) | walk(t[1])
        cuts.append(s)
        return s

    walk(nested)
    cuts.pop()
    return max(max(naive_index(edges, verts, c), naive_index(edges, verts, set(verts) - c))
               for c in cuts)


def brute_min_index(G):
    return min(naive_index_width(G, t) for t in all_rooted_trees(range(G.n)))


def graph(clauses):
    return build_incidence(CnfFormula.from_lists(clauses))


class TestWidth:
    def test_single_edge(self):
        G = graph([[1]])
        T = DecompositionTree.from_nested((0, 1))
        assert f_width(T, G, "cutrank") == 1 and f_width(T, G, "iota") == 1

    def test_k22_caterpillar(self):
        G = graph([[1, 2], [-1, -2]])
        nested = (((0, 1), 2), 3)
        T = DecompositionTree.from_nested(nested)
        assert naive_index_width(G, nested) == 2
        assert f_width(T, G, "iota") == 2

    def test_rank_below_index_below_power(self, rng):
        for _ in range(40):
            F = random_formula(rng)
            G = build_incidence(F)
            for _ in range(3):
                T = random_tree(G.n, rng)
                wr = width_report(T, G)
                assert wr.rankwidth <= wr.index <= 2 ** wr.rankwidth

    def test_tiny_graph_width_zero(self):
        T = DecompositionTree.from_nested(0)
        G = build_incidence(CnfFormula.from_lists([]))
        assert f_width(T, G) == 0


class TestExact:
    def test_single_clause(self):
        # the cut {x1} | {x2, C1} splits the complement into {x2} and {C1}
        G = graph([[1, 2]])
        T = exact_min_index_tree(G)
        assert f_width(T, G) == 2 == brute_min_index(G)

    def test_two_vertices(self):
        T = exact_min_index_tree(graph([[1]]))
        assert T.to_nested() == (0, 1)

    def test_fstar(self, fstar):
        G = build_incidence(fstar)
        T = exact_min_index_tree(G)
        T.validate(G.n)
        assert f_width(T, G) == brute_min_index(G)

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(3)
        done = 0
        while done < 25:
            F = random_formula(rng, nvars_range=(2, 4), m_range=(1, 4))
            G = build_incidence(F)
            if not 3 <= G.n <= 7:
                continue
            T = exact_min_index_tree(G)
            T.validate(G.n)
            assert f_width(T, G) == brute_min_index(G)
            done += 1

    def test_budget(self):
        G = graph([[1, 2, 3], [-1, 4], [2, -4], [3, 5], [-5, 1]])
        with pytest.raises(BudgetExceeded):
            exact_min_index_tree(G, bound=6)

    def test_deterministic(self, rng):
        for _ in range(10):
            G = build_incidence(random_formula(rng, m_range=(1, 4)))
            if 2 <= G.n <= 9:
                assert exact_min_index_tree(G) == exact_min_index_tree(G)


class TestHeuristic:
    def test_k22(self):
        G = graph([[1, 2], [-1, -2]])
        assert f_width(heuristic_tree(G), G) <= 2

    def test_path(self):
        G = graph([[1], [1, 2]])
        T = heuristic_tree(G)
        T.validate(G.n)
        assert f_width(T, G) <= f_width(exact_min_index_tree(G), G) + 1

    def test_cherry(self):
        assert heuristic_tree(graph([[1]])).to_nested() == (0, 1)

    def test_never_beats_exact(self, rng):
        for _ in range(40):
            G = build_incidence(random_formula(rng))
            if G.n > 10:
                continue
            H = heuristic_tree(G)
            H.validate(G.n)
            assert f_width(exact_min_index_tree(G), G) <= f_width(H, G)
            assert heuristic_tree(G) == H


SINGLE = "root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 leaf c1\n"


class TestFileFormat:
    def test_parse_single(self):
        G = graph([[1]])
        T = parse_decomposition(SINGLE, G)
        assert T.to_nested() == (0, 1)

    def test_roundtrip(self, rng):
        for _ in range(30):
            F = random_formula(rng)
            G = build_incidence(F)
            T = random_tree(G.n, rng)
            text = emit_decomposition(T, G, ["a comment"])
            T2 = parse_decomposition(text, G)
            assert T2.to_nested() == T.to_nested()
            assert emit_decomposition(T2, G, ["a comment"]) == text

    def test_comments_and_renumbering(self):
        G = graph([[1]])
        text = "# tree\nroot 7 # top\n\nnode 7 inner 9 8\nnode 9 leaf c1\nnode 8 leaf v1\n"
        assert parse_decomposition(text, G).to_nested() == (1, 0)

    @pytest.mark.parametrize("text, needle", [
        ("root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 leaf v1\n", "duplicate leaf"),
        ("root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 leaf c9\n", "unknown vertex"),
        ("root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 inner 4\n", "non-binary"),
        ("root 1\nnode 1 leaf v1\n", "missing vertex c1"),
        ("root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 inner 1 4\nnode 4 leaf c1\n",
         "reachable twice"),
        ("root 1\nnode 1 inner 2 5\nnode 2 leaf v1\nnode 3 leaf c1\n", "undefined node"),
        ("node 1 inner 2 3\nnode 2 leaf v1\nnode 3 leaf c1\n", "no root"),
        ("root 1\nnode 1 inner 2 3\nnode 2 leaf v1\nnode 3 leaf c1\nnode 4 inner 2 3\n",
         "unreachable"),
        ("root 1\nnode 1 frob\n", "cannot parse"),
    ])
    def test_errors(self, text, needle):
        with pytest.raises(DecompositionError, match=needle):
            parse_decomposition(text, graph([[1]]))


class TestAnnotate:
    def test_root_and_leaves(self, fstar, rng):
        G = build_incidence(fstar)
        for _ in range(5):
            at = annotate(random_tree(G.n, rng), fstar, G)
            assert at.root.clause_bar == 0 and at.root.var_bar == 0
            assert at.root.var_mask == 0b1110 and at.root.clause_mask == 0b111
            total = 0
            for z in at.tree.leaves():
                c = at.contexts[z]
                total += bin(c.var_mask).count("1") + bin(c.clause_mask).count("1")
                v = at.tree.leaf_vertex[z]
                if not G.is_variable(v):
                    assert c.var_mask == 0 and c.clause_mask == 1 << (v - G.n_vars)
            assert total == 6

    def test_children_partition_parent(self, rng):
        for _ in range(30):
            F = random_formula(rng)
            G = build_incidence(F)
            at = annotate(random_tree(G.n, rng), F, G)
            for z in range(at.tree.size):
                ch = at.tree.children[z]
                if ch is None:
                    continue
                a, b = (at.contexts[c] for c in ch)
                c = at.contexts[z]
                assert a.var_mask & b.var_mask == 0 and a.clause_mask & b.clause_mask == 0
                assert c.var_mask == a.var_mask | b.var_mask
                assert c.clause_mask == a.clause_mask | b.clause_mask
            wr = width_report(at.tree, G)
            assert (at.rankwidth, at.k) == (wr.rankwidth, wr.index)

    def test_boundary_sets(self, rng):
        for _ in range(30):
            F = random_formula(rng)
            G = build_incidence(F)
            at = annotate(random_tree(G.n, rng), F, G)
            for c in at.contexts:
                out = [j for j in range(F.m) if c.clause_bar >> j & 1
                       and F.clause_var_mask(j + 1) & c.var_mask]
                inn = [j for j in range(F.m) if c.clause_mask >> j & 1
                       and F.clause_var_mask(j + 1) & ~c.var_mask]
                assert c.touch_out == sum(1 << j for j in out)
                assert c.touch_in == sum(1 << j for j in inn)

    def test_mismatch(self, fstar):
        G = build_incidence(fstar)
        with pytest.raises(DecompositionError):
            annotate(DecompositionTree.from_nested((0, 1)), fstar, G)
        other = build_incidence(CnfFormula.from_lists([[1, 2], [2, 3], [-3, 4]]))
        with pytest.raises(DecompositionError):
            annotate(random_tree(G.n, random.Random(0)), fstar, other)
