"""CNF formulas: DIMACS reading/writing, normalization and projections.

Literals are signed DIMACS integers (``k`` is variable ``k`` positive, ``-k``
its negation).  Variable sets are int bitmasks with bit ``v`` set for variable
``v``; clause sets are int bitmasks with bit ``j - 1`` set for clause id ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


class DimacsError(ValueError):
    """Malformed DIMACS input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyClauseError(ValueError):
    """The formula contains an empty clause and is trivially unsatisfiable."""


class ContractError(ValueError):
    """A caller broke an operation's precondition."""


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def bits(mask: int) -> list[int]:
    """Positions of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def clause_ids(cset: int) -> list[int]:
    return [b + 1 for b in bits(cset)]


def clause_mask(ids: Iterable[int]) -> int:
    return mask_of(j - 1 for j in ids)


@dataclass(frozen=True)
class Clause:
    id: int
    literals: frozenset

    @property
    def variables(self) -> frozenset:
        return frozenset(abs(lit) for lit in self.literals)

    @property
    def var_mask(self) -> int:
        return mask_of(abs(lit) for lit in self.literals)

    @property
    def pos_mask(self) -> int:
        return mask_of(lit for lit in self.literals if lit > 0)

    @property
    def neg_mask(self) -> int:
        return mask_of(-lit for lit in self.literals if lit < 0)

    @property
    def is_tautology(self) -> bool:
        return any(-lit in self.literals for lit in self.literals)

    def sorted_literals(self) -> list[int]:
        return sorted(self.literals, key=lambda lit: (abs(lit), lit < 0))


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple
    declared_variables: int = 0
    # per-clause (var_mask, pos_mask, neg_mask), cached for the hot loops
    _masks: tuple = field(init=False, repr=False, compare=False)
    # variable -> (clauses with v positive, clauses with v negative)
    _occ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        masks = tuple((c.var_mask, c.pos_mask, c.neg_mask) for c in self.clauses)
        object.__setattr__(self, "_masks", masks)
        occ: dict = {}
        for j, c in enumerate(self.clauses):
            for lit in c.literals:
                pos, neg = occ.get(abs(lit), (0, 0))
                occ[abs(lit)] = (pos | 1 << j, neg) if lit > 0 else (pos, neg | 1 << j)
        object.__setattr__(self, "_occ", occ)

    @classmethod
    def from_lists(cls, clauses: Iterable[Iterable[int]], declared_variables: Optional[int] = None):
        cl = tuple(Clause(i + 1, frozenset(c)) for i, c in enumerate(clauses))
        if declared_variables is None:
            declared_variables = max((abs(lit) for c in cl for lit in c.literals), default=0)
        return cls(cl, declared_variables)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def l(self) -> int:
        return sum(len(c.literals) for c in self.clauses)

    @property
    def var_mask(self) -> int:
        out = 0
        for vm, _, _ in self._masks:
            out |= vm
        return out

    @property
    def var_set(self) -> frozenset:
        return frozenset(bits(self.var_mask))

    @property
    def all_clauses(self) -> int:
        return (1 << self.m) - 1

    def clause(self, cid: int) -> Clause:
        return self.clauses[cid - 1]

    def clause_var_mask(self, cid: int) -> int:
        return self._masks[cid - 1][0]

    def occurrences(self, var: int) -> tuple[int, int]:
        """Clause sets with a positive / negative occurrence of ``var``."""
        return self._occ.get(var, (0, 0))

    def satisfied(self, cset: int, domain: int, true: int) -> int:
        """Clauses of ``cset`` satisfied by the assignment (domain, true-set)."""
        out = 0
        masks = self._masks
        while cset:
            low = cset & -cset
            _, pos, neg = masks[low.bit_length() - 1]
            if pos & true or neg & domain & ~true:
                out |= low
            cset ^= low
        return out

    def to_lists(self) -> list[list[int]]:
        return [c.sorted_literals() for c in self.clauses]


@dataclass(frozen=True)
class Assignment:
    """A truth assignment given by its domain and the subset mapped to 1."""

    domain: int
    true: int = 0

    @classmethod
    def from_dict(cls, bindings: dict) -> "Assignment":
        return cls(mask_of(bindings), mask_of(v for v, b in bindings.items() if b))

    def to_dict(self) -> dict:
        return {v: int(bool(self.true >> v & 1)) for v in bits(self.domain)}

    def is_total(self, formula: CnfFormula) -> bool:
        return self.domain == formula.var_mask


@dataclass(frozen=True)
class NormalizationReport:
    dropped_tautologies: int
    merged_duplicates: int
    free_variables: frozenset
    # raw clause id (1-based) -> normalized id, or None when dropped
    id_map: tuple = ()


def parse_dimacs(text) -> CnfFormula:
    """Parse DIMACS CNF text (str or bytes) into a raw, unnormalized formula."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8", errors="replace")
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    current_line = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            fields = s.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsError(f"malformed header {s!r}", lineno)
            try:
                nvars, ncls = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsError(f"malformed header {s!r}", lineno) from None
            if nvars < 0 or ncls < 0:
                raise DimacsError(f"malformed header {s!r}", lineno)
            header = (nvars, ncls)
            continue
        if header is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(current)
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(
                    f"literal {lit} exceeds declared variable count {header[0]}", lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if header is None:
        raise DimacsError("empty input: no 'p cnf' header", 1 if text.strip() else 0)
    if current:
        raise DimacsError("clause not terminated by 0", current_line)
    cl = tuple(Clause(i + 1, frozenset(c)) for i, c in enumerate(clauses))
    return CnfFormula(cl, header[0])


def normalize(raw: CnfFormula) -> tuple[CnfFormula, NormalizationReport]:
    """Drop tautologies, merge duplicate clauses (first wins), renumber 1..m.

    Raises EmptyClauseError if any clause has no literals.
    """
    for c in raw.clauses:
        if not c.literals:
            raise EmptyClauseError(f"clause {c.id} is empty")
    kept: list[frozenset] = []
    seen: dict[frozenset, int] = {}
    id_map = []
    taut = dup = 0
    for c in raw.clauses:
        if c.is_tautology:
            taut += 1
            id_map.append(None)
        elif c.literals in seen:
            dup += 1
            id_map.append(seen[c.literals])
        else:
            kept.append(c.literals)
            seen[c.literals] = len(kept)
            id_map.append(len(kept))
    out = CnfFormula(tuple(Clause(i + 1, lits) for i, lits in enumerate(kept)),
                     raw.declared_variables)
    free = frozenset(range(1, raw.declared_variables + 1)) - out.var_set
    return out, NormalizationReport(taut, dup, free, tuple(id_map))


def emit_dimacs(formula: CnfFormula, report: Optional[NormalizationReport] = None) -> str:
    """Write ``formula`` as DIMACS; with a report, record the raw->normalized id map."""
    lines = []
    if report is not None:
        for raw_id, new_id in enumerate(report.id_map, start=1):
            lines.append(f"c map {raw_id} {'dropped' if new_id is None else new_id}")
    nvars = max(formula.declared_variables, max(formula.var_set, default=0))
    lines.append(f"p cnf {nvars} {formula.m}")
    for c in formula.clauses:
        lines.append(" ".join(map(str, c.sorted_literals() + [0])))
    return "\n".join(lines) + "\n"


def clauses_with_vars(formula: CnfFormula, X: int, within: Optional[int] = None) -> int:
    """Clause set of the clauses C (optionally restricted to ``within``) with X ⊆ var(C)."""
    out = formula.all_clauses if within is None else within
    for v in bits(X):
        pos, neg = formula._occ.get(v, (0, 0))
        out &= pos | neg
    return out


def projection_set(formula: CnfFormula, G: int, X: int) -> set:
    """All projections G(σ) for σ ∈ 2^X, without enumerating 2^X.

    Every clause of G must contain every variable of X.  Clauses are grouped
    by their literals over X; an assignment of X falsifies exactly one group
    (the one whose X-literals it all negates) or none of them.
    """
    if X == 0:
        # only the empty assignment, which satisfies nothing
        return {0}
    classes: dict[tuple[int, int], int] = {}
    masks = formula._masks
    g = G
    while g:
        low = g & -g
        vm, pos, neg = masks[low.bit_length() - 1]
        if vm & X != X:
            raise ContractError(
                f"clause {low.bit_length()} does not contain all variables of the projection set")
        key = (pos & X, neg & X)
        classes[key] = classes.get(key, 0) | low
        g ^= low
    out = {G & ~members for members in classes.values()}
    if len(classes) < (1 << bin(X).count("1")):
        out.add(G)
    return out
