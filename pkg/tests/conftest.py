import itertools
import random

import pytest
from hypothesis import strategies as st

from scwcount.cnf import CnfFormula, normalize


# F*: C1 = {x1, x2}, C2 = {-x1, x2}, C3 = {-x2, x3}
FSTAR = [[1, 2], [-1, 2], [-2, 3]]


@pytest.fixture
def fstar():
    return CnfFormula.from_lists(FSTAR)


def random_raw_clauses(rng, nvars_range=(3, 6), m_range=(1, 8), width=(1, 3), pollute=True):
    """Random clause lists, optionally seeded with tautologies and duplicates."""
    nv = rng.randint(*nvars_range)
    m = rng.randint(*m_range)
    cls = []
    for _ in range(m):
        vs = rng.sample(range(1, nv + 1), rng.randint(width[0], min(width[1], nv)))
        cls.append([v if rng.random() < 0.5 else -v for v in vs])
    if pollute and cls and rng.random() < 0.3:
        cls.insert(rng.randrange(len(cls) + 1), list(rng.choice(cls)))
    if pollute and rng.random() < 0.2:
        v = rng.randint(1, nv)
        cls.insert(rng.randrange(len(cls) + 1), [v, -v])
    return nv, cls


def random_formula(rng, **kw):
    nv, cls = random_raw_clauses(rng, **kw)
    F, _ = normalize(CnfFormula.from_lists(cls, nv))
    return F


@st.composite
def clause_lists(draw, max_vars=5, max_clauses=6, max_width=3):
    nv = draw(st.integers(1, max_vars))
    lit = st.builds(lambda v, s: v if s else -v, st.integers(1, nv), st.booleans())
    clause = st.lists(lit, min_size=1, max_size=max_width)
    return nv, draw(st.lists(clause, min_size=0, max_size=max_clauses))


def naive_count(clauses, nvars):
    """Model count over variables 1..nvars by listing every assignment."""
    total = 0
    for bits in itertools.product([False, True], repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            total += 1
    return total


def naive_satisfied(clauses, assignment):
    """Indices (0-based) of clauses satisfied by a dict var -> bool."""
    return frozenset(i for i, c in enumerate(clauses)
                     if any(abs(l) in assignment and assignment[abs(l)] == (l > 0) for l in c))


def naive_rank_mod2(matrix):
    """Row reduction over GF(2) on a list of 0/1 lists."""
    m = [list(r) for r in matrix]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] % 2), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] % 2:
                m[r] = [(a + b) % 2 for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def naive_index(edges, vertices, X):
    """Classes of X under 'same neighbours outside X', by pairwise comparison."""
    X = list(X)
    outside = [v for v in vertices if v not in X]
    adj = {(a, b) for a, b in edges} | {(b, a) for a, b in edges}
    reps = []
    for x in X:
        if not any(all(((x, o) in adj) == ((r, o) in adj) for o in outside) for r in reps):
            reps.append(x)
    return len(reps)


def graph_edges(G):
    return [(u, v) for u in range(G.n) for v in range(u + 1, G.n) if G.adjacency[u] >> v & 1]


def all_rooted_trees(leaves):
    """Every rooted binary tree (as nested pairs) with the given leaf labels."""
    leaves = tuple(leaves)
    if len(leaves) == 1:
        yield leaves[0]
        return
    first, rest = leaves[0], leaves[1:]
    # split off a nonempty proper subset containing `first`, once per unordered split
    for r in range(0, len(rest)):
        for comb in itertools.combinations(rest, r):
            left = (first,) + comb
            right = tuple(v for v in rest if v not in comb)
            for lt in all_rooted_trees(left):
                for rt in all_rooted_trees(right):
                    yield (lt, rt)


@pytest.fixture
def rng():
    return random.Random(20240611)
